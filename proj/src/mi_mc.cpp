// SPDX-License-Identifier: Apache-2.0
#include "splitrx/mi_mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sampler.hpp"
#include "splitrx/parallel.hpp"
#include "splitrx/rng.hpp"

namespace splitrx {

namespace {

constexpr std::size_t kJointChunk = 65536;

EntropyEstimate entropy(const PointCloud& points, std::optional<std::uint32_t> bins, double occupancy,
                        unsigned threads) {
  return bins ? estimate_entropy_histogram(points, *bins, threads)
              : estimate_entropy_auto(points, occupancy, threads);
}

}  // namespace

void McSettings::validate() const {
  if (n_joint < 1 || n_outer < 1 || n_inner < 1) {
    throw Error(ErrorCode::invalid_settings, "sample counts must be at least 1");
  }
  if ((bins_per_dim && *bins_per_dim < 2) || (cond_bins_per_dim && *cond_bins_per_dim < 2)) {
    throw Error(ErrorCode::invalid_settings, "bins_per_dim must be at least 2");
  }
  if (!(target_occupancy >= 1.0) || !std::isfinite(target_occupancy)) {
    throw Error(ErrorCode::invalid_settings, "target_occupancy must be a finite value >= 1");
  }
}

MiEstimate estimate_mi(const ValidConfig& config, const McSettings& settings) {
  settings.validate();
  const unsigned threads = settings.threads ? settings.threads : default_threads();
  const std::size_t dims = config.dims();

  PointCloud joint(dims, settings.n_joint);
  const std::size_t chunks = (settings.n_joint + kJointChunk - 1) / kJointChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    Rng rng(derive_seed(settings.seed, Stream::joint, c));
    detail::BlockSampler sampler(config);
    const std::size_t begin = c * kJointChunk;
    sampler.fill(rng, std::nullopt, joint, begin, std::min<std::size_t>(kJointChunk, settings.n_joint - begin));
  });
  const EntropyEstimate hj = entropy(joint, settings.bins_per_dim, settings.target_occupancy, threads);
  joint = PointCloud();

  const std::size_t n_outer = settings.n_outer;
  std::vector<double> hc(n_outer);
  std::vector<std::uint32_t> cond_bins(n_outer);
  const auto cond_fixed = settings.cond_bins_per_dim ? settings.cond_bins_per_dim : settings.bins_per_dim;
  parallel_for(n_outer, threads, [&](std::size_t j) {
    Rng symbol_rng(derive_seed(settings.seed, Stream::symbol, j));
    double xs[2];
    fill_standard_normal(symbol_rng, xs);
    const std::complex<double> x(xs[0] * std::sqrt(0.5), xs[1] * std::sqrt(0.5));

    PointCloud inner(dims, settings.n_inner);
    Rng rng(derive_seed(settings.seed, Stream::conditional, j));
    detail::BlockSampler sampler(config);
    sampler.fill(rng, x, inner, 0, settings.n_inner);
    const EntropyEstimate e = entropy(inner, cond_fixed, settings.target_occupancy, 1);
    hc[j] = e.bits;
    cond_bins[j] = e.bins_per_dim;
  });

  const double sum_hc = std::accumulate(hc.begin(), hc.end(), 0.0);
  const double mean_hc = sum_hc / static_cast<double>(n_outer);

  double se = std::numeric_limits<double>::infinity();
  if (n_outer > 1) {
    const double n = static_cast<double>(n_outer);
    std::vector<double> loo(n_outer);
    for (std::size_t j = 0; j < n_outer; ++j) loo[j] = hj.bits - (sum_hc - hc[j]) / (n - 1.0);
    const double mean = std::accumulate(loo.begin(), loo.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : loo) ss += (v - mean) * (v - mean);
    se = std::sqrt((n - 1.0) / n * ss);
  }

  McDiagnostics diag;
  diag.settings = settings;
  diag.joint_entropy = hj.bits;
  diag.conditional_entropy = mean_hc;
  diag.joint_bins = hj.bins_per_dim;
  diag.cond_bins_min = *std::min_element(cond_bins.begin(), cond_bins.end());
  diag.cond_bins_max = *std::max_element(cond_bins.begin(), cond_bins.end());
  return MiEstimate{hj.bits - mean_hc, se, MiMethod::monte_carlo, diag};
}

}  // namespace splitrx
