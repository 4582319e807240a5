// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "splitrx/error.hpp"

namespace splitrx {

/// Per-antenna channel coefficients h_k = |h_k| exp(j phi_k).
struct ChannelVector {
  std::vector<double> magnitudes;
  std::vector<double> phases;  // radians; empty means all zero

  static ChannelVector from_magnitudes(std::vector<double> magnitudes);
  std::size_t size() const noexcept { return magnitudes.size(); }
  double phase(std::size_t k) const noexcept { return phases.empty() ? 0.0 : phases[k]; }
};

/// Antenna, CD conversion and ED rectifier noise powers (linear).
/// Defaults are the noise powers used throughout the figure presets.
struct NoiseProfile {
  double sigma_a_sq = 0.01;
  double sigma_cov_sq = 1.0;
  double sigma_rec_sq = 0.01;
};

enum class ReceiverMode {
  splitting,  // every rho_k strictly inside (0,1)
  cd_only,    // rho_k = 1 everywhere, R2 absent
  ed_only,    // rho_k = 0 everywhere, R1 absent
};

/// Splitting ratios and combining weights. In cd_only mode `rho` and `beta`
/// are ignored and may be empty; in ed_only mode `rho` and `alpha` are.
struct ReceiverDesign {
  std::vector<double> rho;
  std::vector<double> alpha;
  std::vector<double> beta;
  ReceiverMode mode = ReceiverMode::splitting;

  static ReceiverDesign splitting(std::vector<double> rho, std::vector<double> alpha,
                                  std::vector<double> beta);
  static ReceiverDesign cd_only(std::vector<double> alpha);
  static ReceiverDesign ed_only(std::vector<double> beta);
};

struct TransmitConfig {
  double power = 1.0;
};

struct SystemConfig {
  ChannelVector channel;
  NoiseProfile noise;
  ReceiverDesign design;
  TransmitConfig tx;
};

/// One draw of the transmitted symbol and the combined observations.
struct Observation {
  std::complex<double> x;
  std::optional<std::complex<double>> r1;  // absent in ed_only mode
  std::optional<double> r2;                // absent in cd_only mode
};

/// Per-antenna coefficients of the combined observation, precomputed once.
/// With standard normal draws u (complex noises use two of them, derotated by
/// exp(-j phi_k) to undo the channel phase):
///   R1 = alpha_sum X + sum_k [alpha_w_scale_k U_k + z_scale_k V_k]
///   R2 = sum_k [beta_k |X + w_scale_k U_k| + n_scale_k u_k]
struct AntennaTerm {
  double alpha = 0.0;
  double beta = 0.0;
  double w_scale = 0.0;        // sigma_A / (sqrt(2 P) |h_k|)
  double alpha_w_scale = 0.0;  // alpha_k * w_scale
  double z_scale = 0.0;        // alpha_k sigma_cov / (sqrt(2 rho_k P) |h_k|)
  double n_scale = 0.0;        // beta_k sigma_rec / (sqrt((1 - rho_k) P) |h_k|)
  double cos_phi = 1.0;
  double sin_phi = 0.0;
};

/// A configuration that passed `validate`. Immutable; cheap to copy.
class ValidConfig {
 public:
  const SystemConfig& config() const noexcept { return config_; }
  const ChannelVector& channel() const noexcept { return config_.channel; }
  const NoiseProfile& noise() const noexcept { return config_.noise; }
  const ReceiverDesign& design() const noexcept { return config_.design; }
  const TransmitConfig& tx() const noexcept { return config_.tx; }
  ReceiverMode mode() const noexcept { return config_.design.mode; }
  std::size_t antennas() const noexcept { return config_.channel.size(); }

  bool has_cd() const noexcept { return mode() != ReceiverMode::ed_only; }
  bool has_ed() const noexcept { return mode() != ReceiverMode::cd_only; }
  /// Observation dimensionality: 3 (splitting), 2 (cd_only), 1 (ed_only).
  std::size_t dims() const noexcept;

  const std::vector<AntennaTerm>& terms() const noexcept { return terms_; }
  double alpha_sum() const noexcept { return alpha_sum_; }
  double beta_sum() const noexcept { return beta_sum_; }

 private:
  friend ValidConfig validate(SystemConfig config);
  explicit ValidConfig(SystemConfig config);

  SystemConfig config_;
  std::vector<AntennaTerm> terms_;
  double alpha_sum_ = 0.0;
  double beta_sum_ = 0.0;
};

/// Checks every invariant of the domain types; throws splitrx::Error.
ValidConfig validate(SystemConfig config);
ValidConfig validate(const ChannelVector& channel, const NoiseProfile& noise,
                     const ReceiverDesign& design, const TransmitConfig& tx);

/// Validation of the pieces used by the closed forms, which additionally need
/// strictly positive conversion and rectifier noise.
void validate_channel(const ChannelVector& channel);
void validate_noise(const NoiseProfile& noise);
void validate_closed_form_noise(const NoiseProfile& noise);
void validate_power(const TransmitConfig& tx);

/// Exact draw from the per-branch model (no high-SNR approximation).
Observation sample_observation(const ValidConfig& config, std::uint64_t seed);
/// As above with the transmitted symbol fixed to `x`.
Observation sample_observation_given_x(const ValidConfig& config, std::complex<double> x,
                                       std::uint64_t seed);

}  // namespace splitrx
