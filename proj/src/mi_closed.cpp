// SPDX-License-Identifier: Apache-2.0
#include "splitrx/mi_closed.hpp"

#include <cmath>
#include <string>

#include "splitrx/optimizer.hpp"

namespace splitrx {

namespace {

struct Aux {
  double a, c, a_prime, c_prime, gamma;
};

// Scalars shared by aux_quantities and the MI evaluation; B_k and B'_k are
// formed on the fly by the callers.
Aux aux_scalars(std::span<const double> h, const NoiseProfile& noise, std::span<const double> rho,
                std::span<const double> alpha, std::span<const double> beta, double power) {
  double a_prime = 0.0, beta_sum = 0.0, cd = 0.0, ed = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double h2 = h[k] * h[k];
    a_prime += alpha[k];
    beta_sum += beta[k];
    cd += alpha[k] * alpha[k] / (rho[k] * power * h2);
    ed += beta[k] * beta[k] / ((1.0 - rho[k]) * power * h2);
  }
  const double cd_norm = std::sqrt(cd);
  const double ed_norm = std::sqrt(ed);
  Aux x{};
  x.a_prime = a_prime;
  x.c = cd_norm / a_prime;
  x.gamma = cd_norm * std::sqrt(noise.sigma_cov_sq) /
            (std::sqrt(2.0) * ed_norm * a_prime * std::sqrt(noise.sigma_rec_sq));
  x.a = x.gamma * beta_sum;
  x.c_prime = x.gamma * ed_norm;
  return x;
}

void require_splitting(const ValidConfig& config) {
  if (config.mode() != ReceiverMode::splitting) {
    throw Error(ErrorCode::wrong_mode, "the approximation needs a splitting-mode design");
  }
  validate_closed_form_noise(config.noise());
}

void check_rho_star(double rho_star) {
  if (!std::isfinite(rho_star) || !(rho_star > 0.0) || rho_star > 1.0) {
    throw Error(ErrorCode::rho_out_of_range, "rho* = " + std::to_string(rho_star) + " outside (0, 1]");
  }
}

MiEstimate closed(double bits) { return MiEstimate{bits, 0.0, MiMethod::closed_form, std::nullopt}; }

// Shared tail of the optimized-MI expressions for a combining scheme with
// effective array gain `gain`.
MiEstimate optimized(double gain, const NoiseProfile& noise, double rho_star) {
  check_rho_star(rho_star);
  if (rho_star == 1.0) return closed(std::log2(1.0 + gain / (noise.sigma_cov_sq + noise.sigma_a_sq)));
  return closed(std::log2(gain) - 0.5 * std::log2(splitting_noise_factor(noise, rho_star)));
}

void check_inputs(const ChannelVector& channel, const NoiseProfile& noise, const TransmitConfig& tx) {
  validate_channel(channel);
  validate_closed_form_noise(noise);
  validate_power(tx);
}

}  // namespace

namespace detail {

double mi_approx_bits(std::span<const double> h, const NoiseProfile& noise, std::span<const double> rho,
                      std::span<const double> alpha, std::span<const double> beta, double power) {
  const Aux x = aux_scalars(h, noise, rho, alpha, beta, power);
  const double sp = std::sqrt(power);
  const double norm = std::sqrt(1.0 + x.a * x.a);
  const double c_term = x.c * x.c * noise.sigma_cov_sq;
  double b2 = 0.0, mixed2 = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double b = alpha[k] / (x.a_prime * sp * h[k]);
    const double bp = x.gamma * beta[k] / (sp * h[k]);
    const double m = b / norm + bp * x.a / norm;
    b2 += b * b;
    mixed2 += m * m;
  }
  return 0.5 * std::log2(x.a * x.a + 1.0) - 0.5 * std::log2(b2 * noise.sigma_a_sq + c_term) -
         0.5 * std::log2(mixed2 * noise.sigma_a_sq + c_term);
}

}  // namespace detail

AuxQuantities aux_quantities(const ValidConfig& config) {
  require_splitting(config);
  const auto& h = config.channel().magnitudes;
  const auto& d = config.design();
  const double P = config.tx().power;
  const Aux x = aux_scalars(h, config.noise(), d.rho, d.alpha, d.beta, P);
  AuxQuantities q;
  q.a = x.a;
  q.c = x.c;
  q.a_prime = x.a_prime;
  q.c_prime = x.c_prime;
  q.gamma = x.gamma;
  for (std::size_t k = 0; k < h.size(); ++k) {
    q.b.push_back(d.alpha[k] / (x.a_prime * std::sqrt(P) * h[k]));
    q.b_prime.push_back(x.gamma * d.beta[k] / (std::sqrt(P) * h[k]));
  }
  return q;
}

MiEstimate mi_approx(const ValidConfig& config) {
  require_splitting(config);
  const auto& d = config.design();
  return closed(detail::mi_approx_bits(config.channel().magnitudes, config.noise(), d.rho, d.alpha, d.beta,
                                       config.tx().power));
}

MiEstimate mi_cd(const ChannelVector& channel, const NoiseProfile& noise, const TransmitConfig& tx) {
  validate_channel(channel);
  validate_noise(noise);
  if (!std::isfinite(tx.power)) throw Error(ErrorCode::non_finite, "transmit power is not finite");
  if (tx.power < 0.0) throw Error(ErrorCode::nonpositive_power, "transmit power must be nonnegative");
  const double denom = noise.sigma_cov_sq + noise.sigma_a_sq;
  if (!(denom > 0.0)) throw Error(ErrorCode::invalid_noise, "CD receiver needs positive total noise");
  double g = 0.0;
  for (double h : channel.magnitudes) g += tx.power * h * h;
  return closed(std::log2(1.0 + g / denom));
}

double splitting_noise_factor(const NoiseProfile& noise, double rho) {
  const double a = noise.sigma_a_sq, c = noise.sigma_cov_sq, r = noise.sigma_rec_sq;
  return (rho * a + c) * ((rho - 1.0) * a * c - 2.0 * rho * a * r - 2.0 * c * r) /
         (rho * ((rho - 1.0) * c - 2.0 * rho * r));
}

MiEstimate mi_max(const ChannelVector& channel, const NoiseProfile& noise, const TransmitConfig& tx,
                  double rho_star) {
  check_inputs(channel, noise, tx);
  double g = 0.0;
  for (double h : channel.magnitudes) g += h * h;
  return optimized(tx.power * g, noise, rho_star);
}

MiEstimate mi_egc(const ChannelVector& channel, const NoiseProfile& noise, const TransmitConfig& tx,
                  double rho_star) {
  check_inputs(channel, noise, tx);
  const double K = static_cast<double>(channel.size());
  double inv = 0.0;
  for (double h : channel.magnitudes) inv += 1.0 / (h * h);
  return optimized(tx.power * K * K / inv, noise, rho_star);
}

MiEstimate mi_mrc(const ChannelVector& channel, const NoiseProfile& noise, const TransmitConfig& tx,
                  double rho_star) {
  check_inputs(channel, noise, tx);
  const double K = static_cast<double>(channel.size());
  double sum = 0.0;
  for (double h : channel.magnitudes) sum += h;
  return optimized(tx.power * sum * sum / K, noise, rho_star);
}

GainReport gain_asymptotic(const NoiseProfile& noise, double rho_star) {
  validate_closed_form_noise(noise);
  const double a = noise.sigma_a_sq, c = noise.sigma_cov_sq, r = noise.sigma_rec_sq;
  if (!(c > 4.0 * r)) return GainReport{0.0, Regime::cd_degenerate, true};
  check_rho_star(rho_star);
  const double p = rho_star;
  const double num = p * ((1.0 - p) * c + 2.0 * p * r) * (a + c) * (a + c);
  const double den = (p * a + c) * (2.0 * p * r * a + (1.0 - p) * c * a + 2.0 * c * r);
  return GainReport{0.5 * std::log2(num / den), Regime::splitting, true};
}

GainReport gain_finite(const ChannelVector& channel, const NoiseProfile& noise, const TransmitConfig& tx,
                       const std::optional<McSettings>& ed_benchmark) {
  check_inputs(channel, noise, tx);
  const OptimalRho opt = optimal_rho(noise);
  if (opt.regime == Regime::cd_degenerate) return GainReport{0.0, Regime::cd_degenerate, false};
  double baseline = mi_cd(channel, noise, tx).value;
  if (ed_benchmark) {
    const CombiningWeights w = optimal_weights(channel);
    const ValidConfig ed = validate(channel, noise, ReceiverDesign::ed_only(w.beta), tx);
    baseline = std::max(baseline, estimate_mi(ed, *ed_benchmark).value);
  }
  return GainReport{mi_max(channel, noise, tx, opt.rho_star).value - baseline, Regime::splitting, false};
}

}  // namespace splitrx
