// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "splitrx/harness.hpp"

namespace splitrx {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string canonical(std::string_view s) {
  std::string out(trim(s));
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '_') c = '-';
  }
  return out;
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view why) {
  throw Error(ErrorCode::config_parse, std::string(key) + " = '" + std::string(value) + "': " + std::string(why));
}

double number(std::string_view key, std::string_view text) {
  const std::string_view t = trim(text);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size() || t.empty()) bad(key, text, "not a number");
  return v;
}

std::uint64_t count(std::string_view key, std::string_view text) {
  const double v = number(key, text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) bad(key, text, "not a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

bool boolean(std::string_view key, std::string_view text) {
  const std::string v = canonical(text);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, text, "not a boolean");
}

std::vector<Method> methods(std::string_view key, std::string_view text) {
  std::vector<Method> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const std::string name = canonical(rest.substr(0, comma));
    bool found = false;
    for (Method m : {Method::closed_form, Method::monte_carlo, Method::cd_baseline, Method::max, Method::egc,
                     Method::mrc, Method::gain}) {
      if (name == method_name(m)) {
        out.push_back(m);
        found = true;
      }
    }
    if (!found) bad(key, text, "unknown method '" + name + "'");
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(number("list", rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

void apply_config_value(SweepSpec& spec, std::string_view key_text, std::string_view value) {
  const std::string key = canonical(key_text);
  const std::string v = canonical(value);
  if (key == "variable") {
    if (v == "rho-shared" || v == "rho") spec.variable = SweepVariable::rho_shared;
    else if (v == "rho-2d") spec.variable = SweepVariable::rho_2d;
    else if (v == "power") spec.variable = SweepVariable::power;
    else if (v == "antennas") spec.variable = SweepVariable::antennas;
    else bad(key, value, "expected rho-shared, rho-2d, power or antennas");
  } else if (key == "grid.start") {
    spec.grid.start = number(key, value);
  } else if (key == "grid.stop") {
    spec.grid.stop = number(key, value);
  } else if (key == "grid.count") {
    spec.grid.count = count(key, value);
  } else if (key == "grid.log") {
    spec.grid.log = boolean(key, value);
  } else if (key == "grid.values") {
    spec.grid.values = parse_number_list(value);
  } else if (key == "series") {
    if (v == "none") spec.series = SeriesVariable::none;
    else if (v == "power") spec.series = SeriesVariable::power;
    else if (v == "antennas") spec.series = SeriesVariable::antennas;
    else bad(key, value, "expected none, power or antennas");
  } else if (key == "series-values") {
    spec.series_values = parse_number_list(value);
  } else if (key == "channel" || key == "channel.magnitudes") {
    spec.channel.magnitudes = parse_number_list(value);
  } else if (key == "channel.phases") {
    spec.channel.phases = parse_number_list(value);
  } else if (key == "channel-gain") {
    spec.channel_gain = number(key, value);
  } else if (key == "noise.sigma-a-sq") {
    spec.noise.sigma_a_sq = number(key, value);
  } else if (key == "noise.sigma-cov-sq") {
    spec.noise.sigma_cov_sq = number(key, value);
  } else if (key == "noise.sigma-rec-sq") {
    spec.noise.sigma_rec_sq = number(key, value);
  } else if (key == "power") {
    spec.power = number(key, value);
  } else if (key == "scheme") {
    if (v == "optimal") spec.scheme = WeightScheme::optimal;
    else if (v == "egc") spec.scheme = WeightScheme::egc;
    else if (v == "mrc") spec.scheme = WeightScheme::mrc;
    else if (v == "explicit") spec.scheme = WeightScheme::explicit_weights;
    else bad(key, value, "expected optimal, egc, mrc or explicit");
  } else if (key == "alpha") {
    spec.alpha = parse_number_list(value);
  } else if (key == "beta") {
    spec.beta = parse_number_list(value);
  } else if (key == "rho") {
    if (v.empty() || v == "optimal") spec.rho.reset();
    else spec.rho = number(key, value);
  } else if (key == "methods") {
    spec.methods = methods(key, value);
  } else if (key == "mc.n-joint") {
    spec.mc.n_joint = count(key, value);
  } else if (key == "mc.n-outer") {
    spec.mc.n_outer = static_cast<std::uint32_t>(count(key, value));
  } else if (key == "mc.n-inner") {
    spec.mc.n_inner = static_cast<std::uint32_t>(count(key, value));
  } else if (key == "mc.bins-per-dim") {
    if (v == "auto") spec.mc.bins_per_dim.reset();
    else spec.mc.bins_per_dim = static_cast<std::uint32_t>(count(key, value));
  } else if (key == "mc.cond-bins-per-dim") {
    if (v == "auto") spec.mc.cond_bins_per_dim.reset();
    else spec.mc.cond_bins_per_dim = static_cast<std::uint32_t>(count(key, value));
  } else if (key == "mc.target-occupancy") {
    spec.mc.target_occupancy = number(key, value);
  } else if (key == "seed") {
    spec.seed = count(key, value);
  } else if (key == "threads") {
    spec.threads = static_cast<unsigned>(count(key, value));
  } else if (key == "output-path") {
    spec.output_path = std::string(trim(value));
  } else {
    bad(key_text, value, "unknown key");
  }
}

SweepSpec parse_sweep_config(std::string_view text, SweepSpec base) {
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view l = line;
    if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::config_parse, "line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply_config_value(base, trim(l.substr(0, eq)), trim(l.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(ErrorCode::config_parse, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

SweepSpec load_sweep_config(const std::string& path, SweepSpec base) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::io, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_sweep_config(ss.str(), std::move(base));
}

}  // namespace splitrx
