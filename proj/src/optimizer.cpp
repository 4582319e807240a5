// SPDX-License-Identifier: Apache-2.0
#include "splitrx/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "splitrx/parallel.hpp"
#include "splitrx/rng.hpp"

namespace splitrx {

std::optional<StationaryRoots> stationary_roots(const NoiseProfile& noise) {
  const double a = noise.sigma_a_sq, c = noise.sigma_cov_sq, r = noise.sigma_rec_sq;
  const double denom = a * (c - 4.0 * r) * (c - 2.0 * r);
  const double scale = std::max({a, c, r});
  if (std::abs(denom) <= 1e-12 * scale * scale * scale) return std::nullopt;
  const double psi = c * c * (a + c - 2.0 * r) * (c - 2.0 * r) * r * (a + 2.0 * r);
  if (psi < 0.0) return std::nullopt;
  const double lead = c * (c - 2.0 * r) * (a + 2.0 * r);
  const double root = std::sqrt(2.0 * psi);
  return StationaryRoots{(lead - root) / denom, (lead + root) / denom, psi};
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tolerance) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
    if (x1 >= x2) break;  // interval below floating-point resolution
  }
  return 0.5 * (a + b);
}

OptimalRho optimal_rho(const NoiseProfile& noise) {
  validate_closed_form_noise(noise);
  OptimalRho out;
  out.roots = stationary_roots(noise);
  if (!(noise.sigma_cov_sq > 4.0 * noise.sigma_rec_sq)) return out;
  out.regime = Regime::splitting;
  if (out.roots && out.roots->upsilon > 0.0 && out.roots->upsilon < 1.0) {
    out.rho_star = out.roots->upsilon;
    return out;
  }
  out.upsilon_in_range = !out.roots.has_value();
  out.used_fallback = true;
  out.rho_star = golden_section_minimize([&](double rho) { return splitting_noise_factor(noise, rho); },
                                         kRhoSearchClip, 1.0 - kRhoSearchClip);
  return out;
}

CombiningWeights optimal_weights(const ChannelVector& channel, double c_alpha, double c_beta) {
  validate_channel(channel);
  if (!(c_alpha > 0.0) || !(c_beta > 0.0) || !std::isfinite(c_alpha) || !std::isfinite(c_beta)) {
    throw Error(ErrorCode::invalid_settings, "weight scale constants must be positive");
  }
  CombiningWeights w;
  for (double h : channel.magnitudes) {
    w.alpha.push_back(c_alpha * h * h);
    w.beta.push_back(c_beta * h * h);
  }
  return w;
}

CombiningWeights optimal_weights(const ChannelVector& channel) {
  validate_channel(channel);
  double g = 0.0;
  for (double h : channel.magnitudes) g += h * h;
  return optimal_weights(channel, 1.0 / g, 1.0 / g);
}

std::vector<double> egc_weights(std::size_t antennas) {
  if (antennas == 0) throw Error(ErrorCode::invalid_channel, "channel has no antennas");
  return std::vector<double>(antennas, 1.0 / static_cast<double>(antennas));
}

std::vector<double> mrc_weights(const ChannelVector& channel) {
  validate_channel(channel);
  return channel.magnitudes;
}

ReceiverDesign OptimalDesign::design(std::size_t antennas) const {
  if (rho.regime == Regime::cd_degenerate) return ReceiverDesign::cd_only(weights.alpha);
  return ReceiverDesign::splitting(std::vector<double>(antennas, rho.rho_star), weights.alpha, weights.beta);
}

OptimalDesign optimal_design(const ChannelVector& channel, const NoiseProfile& noise) {
  OptimalDesign d;
  d.rho = optimal_rho(noise);
  d.weights = optimal_weights(channel);
  d.c_alpha = d.weights.alpha.front() / (channel.magnitudes.front() * channel.magnitudes.front());
  d.c_beta = d.c_alpha;
  return d;
}

namespace {

std::vector<double> normalized(std::vector<double> w) {
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= s;
  return w;
}

// Parameter vector: splitting ratios (1 or K), then log alpha_k, log beta_k.
struct Problem {
  const ChannelVector& channel;
  const NoiseProfile& noise;
  double power;
  bool per_antenna;

  std::size_t K() const { return channel.size(); }
  std::size_t rho_count() const { return per_antenna ? K() : 1; }
  std::size_t size() const { return rho_count() + 2 * K(); }

  double value(const std::vector<double>& x) const {
    const std::size_t k = K(), nr = rho_count();
    double rho[64], alpha[64], beta[64];
    for (std::size_t i = 0; i < k; ++i) {
      rho[i] = x[per_antenna ? i : 0];
      alpha[i] = std::exp(x[nr + i]);
      beta[i] = std::exp(x[nr + k + i]);
    }
    return detail::mi_approx_bits(channel.magnitudes, noise, {rho, k}, {alpha, k}, {beta, k}, power);
  }
  bool is_rho(std::size_t i) const { return i < rho_count(); }
};

constexpr double kLogWeightReach = 8.0;

// Maximizes g on [lo, hi]; returns (argmax, value).
std::pair<double, double> line_max(const std::function<double(double)>& g, double lo, double hi) {
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima([&](double t) { return -g(t); }, lo, hi,
                                                       std::numeric_limits<double>::digits, iters);
  return {r.first, -r.second};
}

struct RunResult {
  std::vector<double> x;
  double value = -std::numeric_limits<double>::infinity();
  bool converged = false;
  unsigned sweeps = 0;
};

RunResult ascend(const Problem& p, std::vector<double> x, const NumericOptions& opt) {
  RunResult out;
  double f = p.value(x);
  const double rho_lo = kRhoSearchClip, rho_hi = 1.0 - kRhoSearchClip;
  for (unsigned sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    const std::vector<double> start = x;
    const double f_start = f;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double lo = p.is_rho(i) ? rho_lo : x[i] - kLogWeightReach;
      const double hi = p.is_rho(i) ? rho_hi : x[i] + kLogWeightReach;
      std::vector<double> y = x;
      const auto [t, v] = line_max(
          [&](double s) {
            y[i] = s;
            return p.value(y);
          },
          lo, hi);
      if (v > f) {
        x[i] = t;
        f = v;
      }
    }

    // Extrapolate along the sweep's net displacement, projected onto the
    // box of admissible splitting ratios.
    std::vector<double> dir(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) dir[i] = x[i] - start[i];
    auto along = [&](double s) {
      std::vector<double> y(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        y[i] = x[i] + s * dir[i];
        if (p.is_rho(i)) y[i] = std::clamp(y[i], rho_lo, rho_hi);
      }
      return y;
    };
    const auto [t, v] = line_max([&](double s) { return p.value(along(s)); }, 0.0, 16.0);
    if (v > f) {
      x = along(t);
      f = v;
    }

    // Keep the weights near unit sum; the objective is scale invariant.
    for (std::size_t block = 0; block < 2; ++block) {
      const std::size_t off = p.rho_count() + block * p.K();
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < p.K(); ++k) m = std::max(m, x[off + k]);
      for (std::size_t k = 0; k < p.K(); ++k) x[off + k] -= m;
    }
    f = std::max(f, p.value(x));

    out.sweeps = sweep + 1;
    if (f - f_start <= opt.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(x);
  out.value = p.value(out.x);
  return out;
}

}  // namespace

NumericOptimum numeric_optimize(const ChannelVector& channel, const NoiseProfile& noise, const TransmitConfig& tx,
                                const NumericOptions& options) {
  validate_channel(channel);
  validate_closed_form_noise(noise);
  validate_power(tx);
  if (channel.size() > 64) throw Error(ErrorCode::invalid_settings, "numeric_optimize supports up to 64 antennas");
  if (options.restarts < 1 || options.max_sweeps < 1) {
    throw Error(ErrorCode::invalid_settings, "restarts and max_sweeps must be at least 1");
  }
  const Problem p{channel, noise, tx.power, options.per_antenna_rho};
  const std::size_t K = channel.size();

  std::vector<RunResult> runs(options.restarts);
  parallel_for(options.restarts, options.threads, [&](std::size_t r) {
    std::vector<double> x(p.size(), 0.0);
    if (r == 0) {
      for (std::size_t i = 0; i < p.rho_count(); ++i) x[i] = 0.5;
    } else {
      Rng rng(derive_seed(options.seed, Stream::optimizer, r));
      std::uniform_real_distribution<double> rho(0.05, 0.95), logw(-2.0, 2.0);
      for (std::size_t i = 0; i < p.size(); ++i) x[i] = p.is_rho(i) ? rho(rng) : logw(rng);
    }
    runs[r] = ascend(p, std::move(x), options);
  });

  const double rho_ref = optimal_rho(noise).rho_star;
  auto deviation = [&](const RunResult& run) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.rho_count(); ++i) d += std::abs(run.x[i] - rho_ref);
    return d;
  };
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    const double gap = runs[r].value - runs[best].value;
    if (gap > 1e-12 || (std::abs(gap) <= 1e-12 && deviation(runs[r]) < deviation(runs[best]))) best = r;
  }

  const RunResult& win = runs[best];
  std::vector<double> rho(K), alpha(K), beta(K);
  for (std::size_t k = 0; k < K; ++k) {
    rho[k] = win.x[p.per_antenna ? k : 0];
    alpha[k] = std::exp(win.x[p.rho_count() + k]);
    beta[k] = std::exp(win.x[p.rho_count() + K + k]);
  }
  NumericOptimum out;
  out.design = ReceiverDesign::splitting(std::move(rho), normalized(std::move(alpha)), normalized(std::move(beta)));
  out.mi_bits = win.value;
  out.converged = win.converged;
  out.best_restart = static_cast<unsigned>(best);
  out.sweeps = win.sweeps;
  return out;
}

StationarityReport stationarity_check(const ReceiverDesign& design, const ChannelVector& channel,
                                      const NoiseProfile& noise, const TransmitConfig& tx,
                                      const StationarityOptions& options) {
  const ValidConfig cfg = validate(channel, noise, design, tx);
  if (cfg.mode() != ReceiverMode::splitting) {
    throw Error(ErrorCode::wrong_mode, "stationarity check needs a splitting-mode design");
  }
  validate_closed_form_noise(noise);
  if (!(options.fd_step > 0.0) || !(options.perturbation_step > 0.0)) {
    throw Error(ErrorCode::invalid_settings, "steps must be positive");
  }
  const std::size_t K = channel.size();
  std::vector<double> x(3 * K);
  const std::vector<double> alpha = normalized(design.alpha), beta = normalized(design.beta);
  for (std::size_t k = 0; k < K; ++k) {
    x[k] = design.rho[k];
    x[K + k] = alpha[k];
    x[2 * K + k] = beta[k];
  }
  auto f = [&](const std::vector<double>& y) {
    return detail::mi_approx_bits(channel.magnitudes, noise, {y.data(), K}, {y.data() + K, K},
                                  {y.data() + 2 * K, K}, tx.power);
  };
  // Remove the components that change sum(alpha) or sum(beta).
  auto project = [&](std::vector<double>& v) {
    for (std::size_t block = 1; block < 3; ++block) {
      double mean = 0.0;
      for (std::size_t k = 0; k < K; ++k) mean += v[block * K + k];
      mean /= static_cast<double>(K);
      for (std::size_t k = 0; k < K; ++k) v[block * K + k] -= mean;
    }
  };
  auto name = [&](std::size_t i) {
    static const char* kinds[] = {"rho", "alpha", "beta"};
    return std::string(kinds[i / K]) + "[" + std::to_string(i % K) + "]";
  };

  StationarityReport rep;
  const double f0 = f(x);
  rep.gradient.resize(3 * K);
  for (std::size_t i = 0; i < 3 * K; ++i) {
    std::vector<double> up = x, down = x;
    up[i] += options.fd_step;
    down[i] -= options.fd_step;
    rep.gradient[i] = (f(up) - f(down)) / (2.0 * options.fd_step);
  }
  project(rep.gradient);
  for (std::size_t i = 0; i < 3 * K; ++i) {
    if (std::abs(rep.gradient[i]) > rep.max_gradient) {
      rep.max_gradient = std::abs(rep.gradient[i]);
      if (rep.max_gradient > options.gradient_tolerance && !rep.offending) {
        rep.offending = "gradient along " + name(i) + " is " + std::to_string(rep.gradient[i]);
      }
    }
  }

  Rng rng(derive_seed(options.seed, Stream::perturbation, 0));
  std::normal_distribution<double> normal;
  rep.worst_increase = -std::numeric_limits<double>::infinity();
  for (unsigned j = 0; j < options.perturbations; ++j) {
    std::vector<double> d(3 * K);
    for (double& v : d) v = normal(rng);
    project(d);
    double norm = 0.0;
    for (double v : d) norm += v * v;
    norm = std::sqrt(norm);
    std::vector<double> y = x;
    for (std::size_t i = 0; i < 3 * K; ++i) y[i] += options.perturbation_step * d[i] / norm;
    const double change = f(y) - f0;
    ++rep.perturbations;
    rep.worst_increase = std::max(rep.worst_increase, change);
    if (change < 0.0) {
      ++rep.decreased;
    } else if (!rep.offending) {
      rep.offending = "perturbation " + std::to_string(j) + " increased MI by " + std::to_string(change);
    }
  }

  std::vector<double> scaled = x;
  for (std::size_t k = 0; k < K; ++k) scaled[K + k] *= 1.0 + options.perturbation_step;
  rep.scaling_change = std::abs(f(scaled) - f0);
  if (rep.scaling_change > 1e-9 && !rep.offending) {
    rep.offending = "scaling alpha changed MI by " + std::to_string(rep.scaling_change);
  }
  return rep;
}

void require_stationary(const ReceiverDesign& design, const ChannelVector& channel, const NoiseProfile& noise,
                        const TransmitConfig& tx, const StationarityOptions& options) {
  const StationarityReport rep = stationarity_check(design, channel, noise, tx, options);
  if (!rep.passed()) throw Error(ErrorCode::check_failed, *rep.offending);
}

}  // namespace splitrx
