// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "splitrx/harness.hpp"
#include "splitrx/mi_closed.hpp"
#include "splitrx/optimizer.hpp"
#include "splitrx/rng.hpp"

namespace splitrx {

namespace {

const NoiseProfile kDefaultNoise{};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

// --- 1 ---------------------------------------------------------------------
Outcome optimal_ratio() {
  Outcome o;
  const OptimalRho r = optimal_rho(kDefaultNoise);
  const double golden = golden_section_minimize(
      [](double rho) { return splitting_noise_factor(kDefaultNoise, rho); }, kRhoSearchClip, 1.0 - kRhoSearchClip);
  o.require(std::abs(r.rho_star - 0.5605) <= 1e-3, fmt("rho*=%.7f (target 0.5605 +- 1e-3)", r.rho_star));
  o.require(std::abs(r.rho_star - golden) <= 1e-6, fmt("golden-section argmin %.9f, diff %.2e", golden,
                                                       std::abs(r.rho_star - golden)));
  return o;
}

// --- 2 ---------------------------------------------------------------------
Outcome fig3_peak() {
  Outcome o;
  const ChannelVector h = ChannelVector::from_magnitudes({1.0, 3.0});
  const double rho = optimal_rho(kDefaultNoise).rho_star;
  const double peak = mi_max(h, kDefaultNoise, TransmitConfig{1000.0}, rho).value;
  o.require(std::abs(peak - 14.96) <= 0.05, fmt("mi_max=%.4f (target 14.96 +- 0.05)", peak));

  const ResultTable t = figure("fig3");
  const std::size_t col = t.column_index("closed-form");
  const auto best = std::max_element(t.rows.begin(), t.rows.end(),
                                     [&](const auto& a, const auto& b) { return a[col] < b[col]; });
  const double r1 = (*best)[0], r2 = (*best)[1];
  o.require(std::abs(r1 - 0.56) <= 0.01 && std::abs(r2 - 0.56) <= 0.01,
            fmt("grid peak %.4f at (%.2f, %.2f) over %g points", (*best)[col], r1, r2,
                static_cast<double>(t.rows.size())));
  return o;
}

// --- 3 ---------------------------------------------------------------------
Outcome fig5_gap() {
  Outcome o;
  const ChannelVector h = ChannelVector::from_magnitudes(std::vector<double>(10, 1.0));
  const TransmitConfig tx{100.0};
  const double max = mi_max(h, kDefaultNoise, tx, optimal_rho(kDefaultNoise).rho_star).value;
  const double cd = mi_cd(h, kDefaultNoise, tx).value;
  const double gap = max - cd;
  o.require(std::abs(gap - 1.69) <= 0.02, fmt("mi_max=%.4f mi_cd=%.4f gap=%.4f (target 1.69 +- 0.02)", max, cd, gap));
  o.require(std::abs(gap / cd - 0.17) <= 0.01, fmt("relative gap %.2f%% (target 17 +- 1%%)", 100.0 * gap / cd));
  return o;
}

// --- 4 ---------------------------------------------------------------------
Outcome approximation_accuracy(const SelftestOptions& opt) {
  Outcome o;
  McSettings mc;
  if (opt.quick) {
    mc.n_joint = 1'000'000;
    mc.n_outer = 50;
    mc.n_inner = 50'000;
  }
  mc.threads = opt.threads;
  double worst = 0.0;
  std::size_t index = 0;
  for (std::size_t K : {1u, 2u}) {
    const ChannelVector h = ChannelVector::from_magnitudes(std::vector<double>(K, 1.0));
    const std::vector<double> w(K, 1.0 / static_cast<double>(K));
    for (double rho : {0.2, 0.4, 0.56, 0.8}) {
      for (double P : {100.0, 1000.0}) {
        const ValidConfig cfg =
            validate(h, kDefaultNoise, ReceiverDesign::splitting(std::vector<double>(K, rho), w, w), TransmitConfig{P});
        mc.seed = derive_seed(opt.seed, Stream::sweep_point, index++);
        const double approx = mi_approx(cfg).value;
        const MiEstimate est = estimate_mi(cfg, mc);
        const double err = est.value - approx;
        worst = std::max(worst, std::abs(err));
        if (std::abs(err) > 0.2) {
          o.require(false, fmt("K=%g rho=%.2f P=%g: mc-approx=%.3f", static_cast<double>(K), rho, P, err));
        }
      }
    }
  }
  o.require(worst <= 0.2, fmt("max |mi_mc - mi_approx| = %.4f over 16 points (limit 0.2)", worst));
  return o;
}

// --- 5 ---------------------------------------------------------------------
Outcome estimator_calibration(const SelftestOptions& opt) {
  Outcome o;
  McSettings mc;
  mc.threads = opt.threads;
  mc.seed = derive_seed(opt.seed, Stream::sweep_point, 100);
  if (opt.quick) {
    mc.n_joint = 1'000'000;
    mc.n_outer = 50;
    mc.n_inner = 50'000;
  }
  const ValidConfig cd = validate(ChannelVector::from_magnitudes({1.0}), kDefaultNoise,
                                  ReceiverDesign::cd_only({1.0}), TransmitConfig{100.0});
  const double exact = std::log2(1.0 + 100.0 / 1.01);
  const double est = estimate_mi(cd, mc).value;
  o.require(std::abs(est - exact) <= 0.15, fmt("CD-only MC %.4f vs %.4f (limit 0.15)", est, exact));

  // The calibration runs at the joint sample count used by the estimator.
  PointCloud g(3, static_cast<std::size_t>(mc.n_joint));
  Rng rng(derive_seed(opt.seed, Stream::single, 5));
  for (std::size_t j = 0; j < 3; ++j) fill_standard_normal(rng, g.column(j));
  const double h = estimate_entropy_histogram(g, 64, opt.threads).bits;
  const double target = 1.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e);
  o.require(std::abs(h - target) <= 0.05, fmt("3-D Gaussian entropy %.4f vs %.4f (limit 0.05)", h, target));
  return o;
}

// --- 6 ---------------------------------------------------------------------
Outcome optimality_oracle(const SelftestOptions& opt) {
  Outcome o;
  Rng rng(derive_seed(opt.seed, Stream::single, 6));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_mi = 0.0, worst_rho = 0.0, worst_w = 0.0;
  int failures = 0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t K = 1 + static_cast<std::size_t>(u(rng) * 4.0) % 4;
    std::vector<double> mags(K);
    for (double& m : mags) m = 0.3 + 2.7 * u(rng);
    NoiseProfile n;
    n.sigma_rec_sq = std::pow(10.0, -3.0 + 2.0 * u(rng));
    n.sigma_cov_sq = n.sigma_rec_sq * (4.5 + u(rng) * (1.0 / n.sigma_rec_sq - 4.5));
    n.sigma_a_sq = std::pow(10.0, -3.0 + 2.5 * u(rng));
    const TransmitConfig tx{std::pow(10.0, 1.0 + 3.0 * u(rng))};
    const ChannelVector h = ChannelVector::from_magnitudes(mags);

    NumericOptions no;
    no.threads = opt.threads;
    no.seed = derive_seed(opt.seed, Stream::optimizer, static_cast<std::uint64_t>(i));
    const NumericOptimum num = numeric_optimize(h, n, tx, no);
    const double rho_star = optimal_rho(n).rho_star;
    const double closed = mi_max(h, n, tx, rho_star).value;
    const CombiningWeights w = optimal_weights(h);

    const double d_mi = std::abs(num.mi_bits - closed);
    const auto [lo, hi] = std::minmax_element(num.design.rho.begin(), num.design.rho.end());
    const double d_rho = *hi - *lo;
    double d_w = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      d_w = std::max({d_w, std::abs(num.design.alpha[k] / w.alpha[k] - 1.0),
                      std::abs(num.design.beta[k] / w.beta[k] - 1.0)});
    }
    worst_mi = std::max(worst_mi, d_mi);
    worst_rho = std::max(worst_rho, d_rho);
    worst_w = std::max(worst_w, d_w);
    if (d_mi > 1e-3 || d_rho > 1e-3 || d_w > 1e-3) ++failures;
  }
  o.require(worst_mi <= 1e-3, fmt("max |numeric - mi_max(rho*)| = %.2e bits", worst_mi));
  o.require(worst_rho <= 1e-3, fmt("max rho_k spread %.2e", worst_rho));
  o.require(worst_w <= 1e-3, fmt("max relative weight deviation from |h|^2 %.2e", worst_w));
  o.require(failures == 0, fmt("%g of 50 instances outside tolerance", failures));
  return o;
}

// --- 7 ---------------------------------------------------------------------
Outcome ordering(const SelftestOptions& opt) {
  Outcome o;
  Rng rng(derive_seed(opt.seed, Stream::single, 7));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0, equal_cases = 0;
  double min_strict_gap = 1e300;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t K = 1 + static_cast<std::size_t>(u(rng) * 8.0) % 8;
    std::vector<double> mags(K);
    const bool equal = i % 10 == 0 || K == 1;
    const double common = 0.1 + 2.9 * u(rng);
    for (double& m : mags) m = equal ? common : 0.1 + 2.9 * u(rng);
    const ChannelVector h = ChannelVector::from_magnitudes(mags);
    const TransmitConfig tx{std::pow(10.0, 4.0 * u(rng))};
    const double rho = optimal_rho(kDefaultNoise).rho_star;
    const double e = mi_egc(h, kDefaultNoise, tx, rho).value;
    const double m = mi_mrc(h, kDefaultNoise, tx, rho).value;
    const double x = mi_max(h, kDefaultNoise, tx, rho).value;
    const double tol = 1e-9;
    if (equal) {
      ++equal_cases;
      if (std::abs(x - e) > tol || std::abs(x - m) > tol) ++violations;
    } else {
      const double gap = std::min(m - e, x - m);
      min_strict_gap = std::min(min_strict_gap, gap);
      if (!(gap > tol)) ++violations;
    }
  }
  o.require(violations == 0, fmt("%g violations over 1000 channels (%g with equal gains)", violations, equal_cases));
  o.require(min_strict_gap > 1e-9, fmt("smallest strict gap for unequal gains %.2e", min_strict_gap));
  return o;
}

// --- 8 ---------------------------------------------------------------------
Outcome gain_regimes(const SelftestOptions& opt) {
  Outcome o;
  Rng rng(derive_seed(opt.seed, Stream::single, 8));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int nonzero = 0;
  for (int i = 0; i < 200; ++i) {
    NoiseProfile n;
    n.sigma_rec_sq = std::pow(10.0, -3.0 + 3.0 * u(rng));
    n.sigma_cov_sq = n.sigma_rec_sq * 4.0 * u(rng);
    if (i == 0) n.sigma_cov_sq = 4.0 * n.sigma_rec_sq;
    n.sigma_a_sq = std::pow(10.0, -3.0 + 3.0 * u(rng));
    const GainReport g = gain_asymptotic(n, optimal_rho(n).rho_star);
    if (g.gain_bits != 0.0 || g.regime != Regime::cd_degenerate) ++nonzero;
  }
  const GainReport corner = gain_asymptotic({0.01, 1.0, 0.5}, 1.0);
  if (corner.gain_bits != 0.0) ++nonzero;
  o.require(nonzero == 0, fmt("%g nonzero asymptotic gains with sigma_cov^2 <= 4 sigma_rec^2", nonzero));

  const double rho = optimal_rho(kDefaultNoise).rho_star;
  const double asym = gain_asymptotic(kDefaultNoise, rho).gain_bits;
  o.require(std::abs(asym - 1.69) <= 0.01, fmt("asymptotic gain %.4f (target 1.69 +- 0.01)", asym));

  double worst = 0.0, spread = 0.0;
  for (double P : {1e4, 3e4, 1e5, 1e6}) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t K : {1u, 2u, 4u, 8u}) {
      const ChannelVector h = ChannelVector::from_magnitudes(std::vector<double>(K, 1.0));
      const double g = gain_finite(h, kDefaultNoise, TransmitConfig{P}).gain_bits;
      worst = std::max(worst, std::abs(g - asym));
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    spread = std::max(spread, hi - lo);
  }
  o.require(worst <= 0.01, fmt("max |gain_finite - asymptote| for P >= 1e4: %.2e", worst));
  o.require(spread <= 0.01, fmt("max spread over K in {1,2,4,8}: %.2e", spread));
  return o;
}

// --- 9 ---------------------------------------------------------------------
Outcome invariance(const SelftestOptions& opt) {
  Outcome o;
  Rng rng(derive_seed(opt.seed, Stream::single, 9));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_scale = 0.0, worst_phase = 0.0, worst_perm = 0.0, worst_identity = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t K = 1 + static_cast<std::size_t>(u(rng) * 6.0) % 6;
    std::vector<double> mags(K), rho(K), alpha(K), beta(K), phases(K);
    for (std::size_t k = 0; k < K; ++k) {
      mags[k] = 0.2 + 3.0 * u(rng);
      rho[k] = 0.05 + 0.9 * u(rng);
      alpha[k] = 0.05 + u(rng);
      beta[k] = 0.05 + u(rng);
      phases[k] = 2.0 * std::numbers::pi * u(rng);
    }
    NoiseProfile n{std::pow(10.0, -3.0 + 2.0 * u(rng)), 0.1 + u(rng), std::pow(10.0, -3.0 + 2.0 * u(rng))};
    const TransmitConfig tx{std::pow(10.0, 1.0 + 3.0 * u(rng))};
    const ChannelVector h = ChannelVector::from_magnitudes(mags);
    const ValidConfig base = validate(h, n, ReceiverDesign::splitting(rho, alpha, beta), tx);
    const double v = mi_approx(base).value;

    const double c = 0.01 + 100.0 * u(rng), d = 0.01 + 100.0 * u(rng);
    std::vector<double> ca = alpha, db = beta;
    for (double& x : ca) x *= c;
    for (double& x : db) x *= d;
    worst_scale = std::max(worst_scale,
                           std::abs(mi_approx(validate(h, n, ReceiverDesign::splitting(rho, ca, db), tx)).value - v));

    const ChannelVector rotated{mags, phases};
    worst_phase = std::max(
        worst_phase, std::abs(mi_approx(validate(rotated, n, ReceiverDesign::splitting(rho, alpha, beta), tx)).value - v));

    std::vector<std::size_t> perm(K);
    for (std::size_t k = 0; k < K; ++k) perm[k] = k;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> pm(K), pr(K), pa(K), pb(K);
    for (std::size_t k = 0; k < K; ++k) {
      pm[k] = mags[perm[k]];
      pr[k] = rho[perm[k]];
      pa[k] = alpha[perm[k]];
      pb[k] = beta[perm[k]];
    }
    worst_perm = std::max(worst_perm, std::abs(mi_approx(validate(ChannelVector::from_magnitudes(pm), n,
                                                                  ReceiverDesign::splitting(pr, pa, pb), tx))
                                                   .value -
                                               v));

    const AuxQuantities q = aux_quantities(base);
    const double lhs = 2.0 * q.c_prime * q.c_prime * n.sigma_rec_sq;
    const double rhs = q.c * q.c * n.sigma_cov_sq;
    worst_identity = std::max(worst_identity, std::abs(lhs - rhs) / rhs);
  }
  o.require(worst_scale <= 1e-9, fmt("scale invariance max change %.2e bits", worst_scale));
  o.require(worst_phase <= 1e-9, fmt("phase invariance max change %.2e bits", worst_phase));
  o.require(worst_perm <= 1e-9, fmt("permutation invariance max change %.2e bits", worst_perm));
  o.require(worst_identity <= 1e-12, fmt("aux identity max relative error %.2e", worst_identity));

  // Sampler: second moments under random channel phases.
  {
    const std::size_t n_samples = 200'000;
    const ChannelVector h0 = ChannelVector::from_magnitudes({1.0, 2.0});
    const ChannelVector h1{{1.0, 2.0}, {1.3, -2.4}};
    const ReceiverDesign d = ReceiverDesign::splitting({0.4, 0.7}, {0.3, 0.7}, {0.5, 0.5});
    const NoiseProfile n{0.5, 1.0, 0.3};
    auto moments = [&](const ChannelVector& h, std::uint64_t stream) {
      const ValidConfig cfg = validate(h, n, d, TransmitConfig{2.0});
      double m[4] = {0, 0, 0, 0};
      for (std::size_t s = 0; s < n_samples; ++s) {
        const Observation obs = sample_observation(cfg, derive_seed(opt.seed, Stream::single, stream + s));
        const double e = std::norm(*obs.r1 - cfg.alpha_sum() * obs.x);
        const double cross = (obs.r1->real() * obs.x.real() + obs.r1->imag() * obs.x.imag());
        m[0] += e;
        m[1] += *obs.r2;
        m[2] += *obs.r2 * *obs.r2;
        m[3] += cross;
      }
      for (double& x : m) x /= static_cast<double>(n_samples);
      return std::vector<double>(m, m + 4);
    };
    const auto a = moments(h0, 1'000'000), b = moments(h1, 5'000'000);
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])));
    o.require(worst <= 0.02, fmt("sampler moments under channel phases, max relative difference %.2e", worst));
  }

  const ChannelVector h = ChannelVector::from_magnitudes({1.0, 3.0});
  const OptimalDesign best = optimal_design(h, kDefaultNoise);
  const StationarityReport rep = stationarity_check(best.design(2), h, kDefaultNoise, TransmitConfig{1000.0});
  o.require(rep.max_gradient <= 1e-3, fmt("stationarity gradient %.2e (limit 1e-3)", rep.max_gradient));
  o.require(rep.decreased == rep.perturbations && rep.perturbations == 100,
            fmt("%g/%g perturbations decreased MI", rep.decreased, rep.perturbations));
  o.require(rep.scaling_change <= 1e-9, fmt("pure scaling change %.2e bits", rep.scaling_change));
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget;
  Outcome (*run)(const SelftestOptions&);
};

const Criterion kCriteria[] = {
    {1, "optimal splitting ratio", 1.0, [](const SelftestOptions&) { return optimal_ratio(); }},
    {2, "fig3 peak", 10.0, [](const SelftestOptions&) { return fig3_peak(); }},
    {3, "fig5 gap", 1.0, [](const SelftestOptions&) { return fig5_gap(); }},
    {4, "approximation accuracy", 600.0, approximation_accuracy},
    {5, "estimator calibration", 120.0, estimator_calibration},
    {6, "optimality oracle", 300.0, optimality_oracle},
    {7, "ordering property", 5.0, ordering},
    {8, "gain regimes", 5.0, gain_regimes},
    {9, "invariance suite", 60.0, invariance},
};

}  // namespace

std::vector<CriterionResult> run_selftest(const SelftestOptions& options,
                                          void (*on_result)(const CriterionResult&)) {
  std::vector<CriterionResult> out;
  for (const Criterion& c : kCriteria) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), c.id) == options.only.end()) {
      continue;
    }
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    r.budget_seconds = c.budget;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Outcome o = c.run(options);
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const Error& e) {
      r.passed = false;
      r.detail = std::string("ERROR ") + std::string(error_code_name(e.code())) + ": " + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > r.budget_seconds) {
      r.passed = false;
      r.detail += fmt("; FAILED runtime %.1f s over budget %.0f s", r.seconds, r.budget_seconds);
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_criterion(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.name << ") ["
     << fmt("%.2f", r.seconds) << " s / " << fmt("%.0f", r.budget_seconds) << " s]: " << r.detail;
  return os.str();
}

}  // namespace splitrx
