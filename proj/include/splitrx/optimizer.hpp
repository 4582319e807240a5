// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "splitrx/mi_closed.hpp"
#include "splitrx/model.hpp"

namespace splitrx {

/// Both roots of ds/drho = 0. `upsilon` is the one of interest.
struct StationaryRoots {
  double upsilon = 0.0;
  double phi = 0.0;
  double psi = 0.0;
};

/// nullopt when the root formula's denominator vanishes (sigma_A^2 = 0,
/// sigma_cov^2 = 4 sigma_rec^2 or 2 sigma_rec^2, within 1e-12 relative).
std::optional<StationaryRoots> stationary_roots(const NoiseProfile& noise);

struct OptimalRho {
  double rho_star = 1.0;
  Regime regime = Regime::cd_degenerate;
  std::optional<StationaryRoots> roots;
  bool used_fallback = false;     // golden-section search instead of the root formula
  bool upsilon_in_range = true;   // false flags a root outside (0,1)
};

OptimalRho optimal_rho(const NoiseProfile& noise);

/// Minimizer of a unimodal f on [lo, hi] to within `tolerance`.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tolerance = 1e-12);

/// Lower clip of the fallback search interval, [clip, 1 - clip].
inline constexpr double kRhoSearchClip = 1e-6;

struct CombiningWeights {
  std::vector<double> alpha;
  std::vector<double> beta;
};

/// alpha_k = c_alpha |h_k|^2, beta_k = c_beta |h_k|^2.
CombiningWeights optimal_weights(const ChannelVector& channel, double c_alpha, double c_beta);
/// Normalized so that both weight vectors sum to one.
CombiningWeights optimal_weights(const ChannelVector& channel);

std::vector<double> egc_weights(std::size_t antennas);
std::vector<double> mrc_weights(const ChannelVector& channel);

struct OptimalDesign {
  OptimalRho rho;
  CombiningWeights weights;
  double c_alpha = 0.0;
  double c_beta = 0.0;

  /// Splitting-mode design (shared rho*), or a CD-only design when degenerate.
  ReceiverDesign design(std::size_t antennas) const;
};

OptimalDesign optimal_design(const ChannelVector& channel, const NoiseProfile& noise);

struct NumericOptions {
  unsigned restarts = 8;
  double tolerance = 1e-13;  // stop when a sweep gains less than this (bits)
  unsigned max_sweeps = 2000;
  bool per_antenna_rho = true;
  std::uint64_t seed = 7;
  unsigned threads = 0;
};

struct NumericOptimum {
  ReceiverDesign design;  // weights normalized to unit sum
  double mi_bits = 0.0;
  bool converged = false;
  unsigned best_restart = 0;
  unsigned sweeps = 0;
};

/// Multi-start coordinate ascent on the closed-form approximation over
/// (rho, alpha, beta), independent of the closed-form optimum.
NumericOptimum numeric_optimize(const ChannelVector& channel, const NoiseProfile& noise,
                                const TransmitConfig& tx, const NumericOptions& options = {});

struct StationarityOptions {
  double fd_step = 1e-4;
  double perturbation_step = 1e-2;
  unsigned perturbations = 100;
  double gradient_tolerance = 1e-3;
  std::uint64_t seed = 11;
};

struct StationarityReport {
  std::vector<double> gradient;  // (rho_k, alpha_k, beta_k), scale directions projected out
  double max_gradient = 0.0;
  unsigned perturbations = 0;
  unsigned decreased = 0;
  double worst_increase = 0.0;        // largest MI change over the perturbations
  double scaling_change = 0.0;        // |MI change| along alpha -> (1+eps) alpha
  std::optional<std::string> offending;
  bool passed() const noexcept { return !offending.has_value(); }
};

/// Local-maximum check of mi_approx at `design` (normalized internally).
StationarityReport stationarity_check(const ReceiverDesign& design, const ChannelVector& channel,
                                      const NoiseProfile& noise, const TransmitConfig& tx,
                                      const StationarityOptions& options = {});

/// As above but throws check-failed naming the offending direction.
void require_stationary(const ReceiverDesign& design, const ChannelVector& channel,
                        const NoiseProfile& noise, const TransmitConfig& tx,
                        const StationarityOptions& options = {});

}  // namespace splitrx
