// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "splitrx/harness.hpp"
#include "splitrx/mi_closed.hpp"
#include "splitrx/optimizer.hpp"
#include "splitrx/parallel.hpp"
#include "splitrx/rng.hpp"

namespace splitrx {

std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::closed_form: return "closed-form";
    case Method::monte_carlo: return "monte-carlo";
    case Method::cd_baseline: return "cd-baseline";
    case Method::max: return "max";
    case Method::egc: return "egc";
    case Method::mrc: return "mrc";
    case Method::gain: return "gain";
  }
  return "unknown";
}

std::string_view variable_name(SweepVariable v) noexcept {
  switch (v) {
    case SweepVariable::rho_shared: return "rho-shared";
    case SweepVariable::rho_2d: return "rho-2d";
    case SweepVariable::power: return "power";
    case SweepVariable::antennas: return "antennas";
  }
  return "unknown";
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::vector<double> GridSpec::points() const {
  if (!values.empty()) return values;
  std::vector<double> out;
  if (count == 0) return out;
  if (count == 1) return {start};
  const double n = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double k = static_cast<double>(i);
    // The weighted form is exact whenever the point is an integer.
    out.push_back(log ? start * std::pow(stop / start, k / n) : (start * (n - k) + stop * k) / n);
  }
  // Pin the end point against rounding.
  out.back() = stop;
  return out;
}

namespace {

bool is_rho(SweepVariable v) { return v == SweepVariable::rho_shared || v == SweepVariable::rho_2d; }

void check_value(std::string_view what, double v, bool rho, bool power, bool antennas) {
  const auto fail = [&](const char* domain) {
    throw Error(ErrorCode::invalid_spec, std::string(what) + " value " + format_number(v) + " outside " + domain);
  };
  if (!std::isfinite(v)) fail("the finite numbers");
  if (rho && !(v > 0.0 && v < 1.0)) fail("(0, 1)");
  if (power && !(v > 0.0)) fail("(0, inf)");
  if (antennas && !(v >= 1.0 && v == std::floor(v) && v <= 1e6)) fail("the positive integers");
}

struct Point {
  std::size_t index;
  std::optional<double> series;
  double coord[2];
};

}  // namespace

void SweepSpec::validate() const {
  const std::vector<double> pts = grid.points();
  if (pts.empty()) throw Error(ErrorCode::invalid_spec, "grid is empty");
  if (grid.log && grid.values.empty() && !(grid.start > 0.0 && grid.stop > 0.0)) {
    throw Error(ErrorCode::invalid_spec, "log grid needs positive end points");
  }
  for (double v : pts) {
    check_value(variable_name(variable), v, is_rho(variable), variable == SweepVariable::power,
                variable == SweepVariable::antennas);
  }
  if (series != SeriesVariable::none) {
    if (series_values.empty()) throw Error(ErrorCode::invalid_spec, "series has no values");
    if ((series == SeriesVariable::power && variable == SweepVariable::power) ||
        (series == SeriesVariable::antennas && variable == SweepVariable::antennas)) {
      throw Error(ErrorCode::invalid_spec, "series variable equals the swept variable");
    }
    for (double v : series_values) {
      check_value("series", v, false, series == SeriesVariable::power, series == SeriesVariable::antennas);
    }
  }
  if (methods.empty()) throw Error(ErrorCode::invalid_spec, "no methods requested");

  const bool varying_k = variable == SweepVariable::antennas || series == SeriesVariable::antennas;
  if (varying_k) {
    if (!(channel_gain > 0.0) || !std::isfinite(channel_gain)) {
      throw Error(ErrorCode::invalid_spec, "channel_gain must be positive");
    }
    if (scheme == WeightScheme::explicit_weights) {
      throw Error(ErrorCode::invalid_spec, "explicit weights need a fixed antenna count");
    }
  } else {
    validate_channel(channel);
    if (scheme == WeightScheme::explicit_weights &&
        (alpha.size() != channel.size() || beta.size() != channel.size())) {
      throw Error(ErrorCode::invalid_spec, "explicit alpha and beta must have one entry per antenna");
    }
  }
  if (variable == SweepVariable::rho_2d) {
    if (varying_k || channel.size() != 2) throw Error(ErrorCode::invalid_spec, "rho-2d sweeps need exactly 2 antennas");
    for (Method m : methods) {
      if (m == Method::max || m == Method::egc || m == Method::mrc || m == Method::gain) {
        throw Error(ErrorCode::invalid_spec,
                    std::string(method_name(m)) + " needs a shared splitting ratio; not available for rho-2d");
      }
    }
  }
  if (rho) check_value("rho", *rho, true, false, false);
  if (!(power > 0.0) || !std::isfinite(power)) throw Error(ErrorCode::invalid_spec, "power must be positive");
  validate_noise(noise);
  mc.validate();
}

std::size_t ResultTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw Error(ErrorCode::invalid_spec, "no column named " + std::string(name));
}

void ResultTable::write_csv(std::ostream& os) const {
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
}

std::string ResultTable::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

namespace {

std::string_view series_name(SeriesVariable s) {
  return s == SeriesVariable::power ? "power" : "antennas";
}

std::string describe(const SweepSpec& spec, const Point& p) {
  std::string s = "grid point " + std::to_string(p.index) + " (";
  if (p.series) s += std::string(series_name(spec.series)) + "=" + format_number(*p.series) + ", ";
  if (spec.variable == SweepVariable::rho_2d) {
    s += "rho1=" + format_number(p.coord[0]) + ", rho2=" + format_number(p.coord[1]);
  } else {
    s += std::string(variable_name(spec.variable)) + "=" + format_number(p.coord[0]);
  }
  return s + ")";
}

std::vector<double> evaluate(const SweepSpec& spec, const Point& p, unsigned mc_threads) {
  ChannelVector channel = spec.channel;
  double power = spec.power;
  std::optional<std::size_t> antennas;
  if (spec.series == SeriesVariable::power) power = *p.series;
  if (spec.series == SeriesVariable::antennas) antennas = static_cast<std::size_t>(*p.series);
  if (spec.variable == SweepVariable::power) power = p.coord[0];
  if (spec.variable == SweepVariable::antennas) antennas = static_cast<std::size_t>(p.coord[0]);
  if (antennas) channel = ChannelVector::from_magnitudes(std::vector<double>(*antennas, spec.channel_gain));
  const std::size_t K = channel.size();
  const TransmitConfig tx{power};

  // Splitting ratios for the design-based methods, and the shared ratio for
  // the optimized-MI formulas.
  std::vector<double> rho(K);
  double shared_rho = 0.0;
  if (spec.variable == SweepVariable::rho_2d) {
    rho = {p.coord[0], p.coord[1]};
  } else {
    shared_rho = spec.variable == SweepVariable::rho_shared ? p.coord[0]
                 : spec.rho                                  ? *spec.rho
                                                             : optimal_rho(spec.noise).rho_star;
    rho.assign(K, shared_rho);
  }

  auto design = [&]() {
    CombiningWeights w;
    switch (spec.scheme) {
      case WeightScheme::optimal: w = optimal_weights(channel); break;
      case WeightScheme::egc: w = {egc_weights(K), egc_weights(K)}; break;
      case WeightScheme::mrc: w = {mrc_weights(channel), mrc_weights(channel)}; break;
      case WeightScheme::explicit_weights: w = {spec.alpha, spec.beta}; break;
    }
    return validate(channel, spec.noise, ReceiverDesign::splitting(rho, w.alpha, w.beta), tx);
  };

  std::vector<double> values;
  std::optional<double> stderr_value;
  for (Method m : spec.methods) {
    switch (m) {
      case Method::closed_form: values.push_back(mi_approx(design()).value); break;
      case Method::monte_carlo: {
        McSettings mc = spec.mc;
        mc.seed = derive_seed(spec.seed, Stream::sweep_point, p.index);
        mc.threads = mc_threads;
        const MiEstimate e = estimate_mi(design(), mc);
        values.push_back(e.value);
        stderr_value = e.std_error;
        break;
      }
      case Method::cd_baseline: values.push_back(mi_cd(channel, spec.noise, tx).value); break;
      case Method::max: values.push_back(mi_max(channel, spec.noise, tx, shared_rho).value); break;
      case Method::egc: values.push_back(mi_egc(channel, spec.noise, tx, shared_rho).value); break;
      case Method::mrc: values.push_back(mi_mrc(channel, spec.noise, tx, shared_rho).value); break;
      case Method::gain: values.push_back(gain_finite(channel, spec.noise, tx).gain_bits); break;
    }
  }
  if (stderr_value) values.push_back(*stderr_value);
  return values;
}

}  // namespace

ResultTable run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::vector<double> grid = spec.grid.points();

  ResultTable table;
  if (spec.series != SeriesVariable::none) table.columns.emplace_back(series_name(spec.series));
  if (spec.variable == SweepVariable::rho_2d) {
    table.columns.insert(table.columns.end(), {"rho1", "rho2"});
  } else if (spec.variable == SweepVariable::rho_shared) {
    table.columns.emplace_back("rho");
  } else {
    table.columns.emplace_back(variable_name(spec.variable));
  }
  bool has_mc = false;
  for (Method m : spec.methods) {
    table.columns.emplace_back(method_name(m));
    has_mc = has_mc || m == Method::monte_carlo;
  }
  if (has_mc) table.columns.emplace_back(std::string(method_name(Method::monte_carlo)) + "_stderr");

  std::vector<Point> points;
  std::vector<std::optional<double>> series{std::nullopt};
  if (spec.series != SeriesVariable::none) series.assign(spec.series_values.begin(), spec.series_values.end());
  for (const auto& s : series) {
    for (double a : grid) {
      if (spec.variable == SweepVariable::rho_2d) {
        for (double b : grid) points.push_back({points.size(), s, {a, b}});
      } else {
        points.push_back({points.size(), s, {a, 0.0}});
      }
    }
  }

  table.rows.resize(points.size());
  const unsigned threads = spec.threads ? spec.threads : default_threads();
  auto run_point = [&](std::size_t i, unsigned mc_threads) {
    const Point& p = points[i];
    std::vector<double> row;
    if (p.series) row.push_back(*p.series);
    row.push_back(p.coord[0]);
    if (spec.variable == SweepVariable::rho_2d) row.push_back(p.coord[1]);
    std::vector<double> vals;
    try {
      vals = evaluate(spec, p, mc_threads);
    } catch (const Error& e) {
      throw Error(e.code(), describe(spec, p) + ": " + e.what());
    }
    row.insert(row.end(), vals.begin(), vals.end());
    table.rows[i] = std::move(row);
  };
  // Monte Carlo points parallelize internally; closed-form points are cheap
  // and are spread over the pool instead.
  if (has_mc) {
    for (std::size_t i = 0; i < points.size(); ++i) run_point(i, threads);
  } else {
    parallel_for(points.size(), threads, [&](std::size_t i) { run_point(i, 1); });
  }
  return table;
}

}  // namespace splitrx
