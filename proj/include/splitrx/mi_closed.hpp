// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "splitrx/mi_mc.hpp"
#include "splitrx/model.hpp"

namespace splitrx {

/// Scalars of the high-SNR approximation.
struct AuxQuantities {
  double a = 0.0;
  std::vector<double> b;
  double c = 0.0;
  double a_prime = 0.0;
  std::vector<double> b_prime;
  double c_prime = 0.0;
  double gamma = 0.0;
};

enum class Regime {
  splitting,      // sigma_cov^2 > 4 sigma_rec^2, an interior splitting ratio is optimal
  cd_degenerate,  // the plain CD receiver (rho = 1) is optimal
};

struct GainReport {
  double gain_bits = 0.0;
  Regime regime = Regime::cd_degenerate;
  bool asymptotic = false;
};

/// Requires a splitting-mode config with positive sigma_cov^2, sigma_rec^2.
AuxQuantities aux_quantities(const ValidConfig& config);

/// High-SNR closed-form MI of the splitting receiver for an arbitrary design.
MiEstimate mi_approx(const ValidConfig& config);

/// MI of the conventional CD receiver, log2(1 + sum P|h|^2 / (sigma_cov^2 + sigma_A^2)).
/// Accepts P = 0.
MiEstimate mi_cd(const ChannelVector& channel, const NoiseProfile& noise,
                 const TransmitConfig& tx);

/// Noise factor s(rho) shared by the optimized MI expressions, evaluated in
/// its rational form (finite at rho = 1).
double splitting_noise_factor(const NoiseProfile& noise, double rho);

/// Maximum MI with optimal combining at the given shared splitting ratio.
/// rho_star = 1 gives mi_cd.
MiEstimate mi_max(const ChannelVector& channel, const NoiseProfile& noise,
                  const TransmitConfig& tx, double rho_star);
MiEstimate mi_egc(const ChannelVector& channel, const NoiseProfile& noise,
                  const TransmitConfig& tx, double rho_star);
MiEstimate mi_mrc(const ChannelVector& channel, const NoiseProfile& noise,
                  const TransmitConfig& tx, double rho_star);

/// High-SNR limit of the MI gain over the CD receiver; 0 unless
/// sigma_cov^2 > 4 sigma_rec^2.
GainReport gain_asymptotic(const NoiseProfile& noise, double rho_star);

/// mi_max(rho*) - max(mi_cd, mi_ed). The ED-only benchmark is estimated by
/// Monte Carlo only when `ed_benchmark` is given; otherwise the CD term is used.
GainReport gain_finite(const ChannelVector& channel, const NoiseProfile& noise,
                       const TransmitConfig& tx,
                       const std::optional<McSettings>& ed_benchmark = std::nullopt);

namespace detail {

/// Unchecked evaluation of the approximation, used in optimizer inner loops.
double mi_approx_bits(std::span<const double> magnitudes, const NoiseProfile& noise,
                      std::span<const double> rho, std::span<const double> alpha,
                      std::span<const double> beta, double power);

}  // namespace detail

}  // namespace splitrx
