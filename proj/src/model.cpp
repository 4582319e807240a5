// SPDX-License-Identifier: Apache-2.0
#include "splitrx/model.hpp"

#include <cmath>
#include <string>

#include "sampler.hpp"
#include "splitrx/kernels.hpp"

namespace splitrx {

namespace {

std::string at(std::size_t k) { return " (antenna " + std::to_string(k) + ")"; }

void check_weights(const std::vector<double>& w, std::size_t K, const char* name) {
  if (w.size() != K) {
    throw Error(ErrorCode::dimension_mismatch, std::string(name) + " has " +
                                                   std::to_string(w.size()) + " entries, channel has " +
                                                   std::to_string(K));
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (!std::isfinite(w[k])) throw Error(ErrorCode::non_finite, std::string(name) + " is not finite" + at(k));
    if (w[k] < 0.0) throw Error(ErrorCode::negative_weight, std::string(name) + " is negative" + at(k));
    sum += w[k];
  }
  if (!(sum > 0.0)) throw Error(ErrorCode::zero_weight_sum, std::string(name) + " weights sum to zero");
}

void check_rho(const std::vector<double>& rho, std::size_t K) {
  if (rho.size() != K) {
    throw Error(ErrorCode::dimension_mismatch,
                "rho has " + std::to_string(rho.size()) + " entries, channel has " + std::to_string(K));
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (!std::isfinite(rho[k])) throw Error(ErrorCode::non_finite, "rho is not finite" + at(k));
    if (rho[k] < 0.0 || rho[k] > 1.0) {
      throw Error(ErrorCode::rho_out_of_range, "rho = " + std::to_string(rho[k]) + " outside [0, 1]" + at(k));
    }
    if (rho[k] == 0.0 || rho[k] == 1.0) {
      throw Error(ErrorCode::boundary_rho,
                  "rho = " + std::to_string(rho[k]) + " in splitting mode; use the cd_only or ed_only mode" + at(k));
    }
  }
}

}  // namespace

ChannelVector ChannelVector::from_magnitudes(std::vector<double> magnitudes) {
  return ChannelVector{std::move(magnitudes), {}};
}

ReceiverDesign ReceiverDesign::splitting(std::vector<double> rho, std::vector<double> alpha,
                                         std::vector<double> beta) {
  return ReceiverDesign{std::move(rho), std::move(alpha), std::move(beta), ReceiverMode::splitting};
}

ReceiverDesign ReceiverDesign::cd_only(std::vector<double> alpha) {
  return ReceiverDesign{{}, std::move(alpha), {}, ReceiverMode::cd_only};
}

ReceiverDesign ReceiverDesign::ed_only(std::vector<double> beta) {
  return ReceiverDesign{{}, {}, std::move(beta), ReceiverMode::ed_only};
}

void validate_channel(const ChannelVector& channel) {
  const std::size_t K = channel.size();
  if (K == 0) throw Error(ErrorCode::invalid_channel, "channel has no antennas");
  if (!channel.phases.empty() && channel.phases.size() != K) {
    throw Error(ErrorCode::dimension_mismatch, "channel has " + std::to_string(K) + " magnitudes but " +
                                                   std::to_string(channel.phases.size()) + " phases");
  }
  for (std::size_t k = 0; k < K; ++k) {
    const double m = channel.magnitudes[k];
    if (!std::isfinite(m) || !std::isfinite(channel.phase(k))) {
      throw Error(ErrorCode::non_finite, "channel coefficient is not finite" + at(k));
    }
    if (m == 0.0) throw Error(ErrorCode::zero_gain_antenna, "channel magnitude is zero" + at(k));
    if (m < 0.0) throw Error(ErrorCode::invalid_channel, "channel magnitude is negative" + at(k));
  }
}

void validate_noise(const NoiseProfile& noise) {
  for (double v : {noise.sigma_a_sq, noise.sigma_cov_sq, noise.sigma_rec_sq}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::invalid_noise, "noise powers must be finite and nonnegative");
    }
  }
}

void validate_closed_form_noise(const NoiseProfile& noise) {
  validate_noise(noise);
  if (!(noise.sigma_cov_sq > 0.0) || !(noise.sigma_rec_sq > 0.0)) {
    throw Error(ErrorCode::invalid_noise, "conversion and rectifier noise powers must be positive");
  }
}

void validate_power(const TransmitConfig& tx) {
  if (!std::isfinite(tx.power)) throw Error(ErrorCode::non_finite, "transmit power is not finite");
  if (!(tx.power > 0.0)) throw Error(ErrorCode::nonpositive_power, "transmit power must be positive");
}

ValidConfig validate(SystemConfig config) {
  validate_channel(config.channel);
  validate_noise(config.noise);
  validate_power(config.tx);
  const std::size_t K = config.channel.size();
  const ReceiverDesign& d = config.design;
  if (d.mode == ReceiverMode::splitting) check_rho(d.rho, K);
  if (d.mode != ReceiverMode::ed_only) check_weights(d.alpha, K, "alpha");
  if (d.mode != ReceiverMode::cd_only) check_weights(d.beta, K, "beta");
  return ValidConfig(std::move(config));
}

ValidConfig validate(const ChannelVector& channel, const NoiseProfile& noise, const ReceiverDesign& design,
                     const TransmitConfig& tx) {
  return validate(SystemConfig{channel, noise, design, tx});
}

ValidConfig::ValidConfig(SystemConfig config) : config_(std::move(config)) {
  const std::size_t K = config_.channel.size();
  const double P = config_.tx.power;
  const NoiseProfile& nz = config_.noise;
  const ReceiverDesign& d = config_.design;
  terms_.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    AntennaTerm& t = terms_[k];
    const double h = config_.channel.magnitudes[k];
    const double rho = d.mode == ReceiverMode::splitting ? d.rho[k] : (d.mode == ReceiverMode::cd_only ? 1.0 : 0.0);
    t.w_scale = std::sqrt(nz.sigma_a_sq / (2.0 * P)) / h;
    if (has_cd()) {
      t.alpha = d.alpha[k];
      t.alpha_w_scale = t.alpha * t.w_scale;
      t.z_scale = t.alpha * std::sqrt(nz.sigma_cov_sq / (2.0 * rho * P)) / h;
      alpha_sum_ += t.alpha;
    }
    if (has_ed()) {
      t.beta = d.beta[k];
      t.n_scale = t.beta * std::sqrt(nz.sigma_rec_sq / ((1.0 - rho) * P)) / h;
      beta_sum_ += t.beta;
    }
    t.cos_phi = std::cos(config_.channel.phase(k));
    t.sin_phi = std::sin(config_.channel.phase(k));
  }
}

std::size_t ValidConfig::dims() const noexcept {
  switch (mode()) {
    case ReceiverMode::splitting: return 3;
    case ReceiverMode::cd_only: return 2;
    case ReceiverMode::ed_only: return 1;
  }
  return 0;
}

namespace detail {

BlockSampler::BlockSampler(const ValidConfig& config) : config_(&config) {
  const std::size_t km = config.antennas() * kBlock;
  x_re_.resize(kBlock);
  x_im_.resize(kBlock);
  u_re_.resize(km);
  u_im_.resize(km);
  if (config.has_cd()) {
    v_re_.resize(km);
    v_im_.resize(km);
  }
  if (config.has_ed()) n_.resize(km);
}

void BlockSampler::draw(Rng& rng, std::size_t m, std::optional<std::complex<double>> fixed_x,
                        std::span<double> r1_re, std::span<double> r1_im, std::span<double> r2,
                        std::span<double> x_re, std::span<double> x_im) {
  const ValidConfig& cfg = *config_;
  const std::size_t K = cfg.antennas();
  std::span<double> xr(x_re_.data(), m), xi(x_im_.data(), m);
  if (fixed_x) {
    std::fill(xr.begin(), xr.end(), fixed_x->real());
    std::fill(xi.begin(), xi.end(), fixed_x->imag());
  } else {
    fill_standard_normal(rng, xr);
    fill_standard_normal(rng, xi);
    const double s = std::sqrt(0.5);
    for (std::size_t i = 0; i < m; ++i) {
      xr[i] *= s;
      xi[i] *= s;
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t o = k * m;
    fill_standard_normal(rng, std::span<double>(u_re_.data() + o, m));
    fill_standard_normal(rng, std::span<double>(u_im_.data() + o, m));
    if (cfg.has_cd()) {
      fill_standard_normal(rng, std::span<double>(v_re_.data() + o, m));
      fill_standard_normal(rng, std::span<double>(v_im_.data() + o, m));
    }
    if (cfg.has_ed()) fill_standard_normal(rng, std::span<double>(n_.data() + o, m));
  }

  const std::size_t km = K * m;
  kernels::BlockInputs in{xr,
                          xi,
                          {u_re_.data(), km},
                          {u_im_.data(), km},
                          cfg.has_cd() ? std::span<const double>(v_re_.data(), km) : std::span<const double>{},
                          cfg.has_cd() ? std::span<const double>(v_im_.data(), km) : std::span<const double>{},
                          cfg.has_ed() ? std::span<const double>(n_.data(), km) : std::span<const double>{}};
  kernels::BlockOutputs out{cfg.has_cd() ? r1_re.first(m) : std::span<double>{},
                            cfg.has_cd() ? r1_im.first(m) : std::span<double>{},
                            cfg.has_ed() ? r2.first(m) : std::span<double>{}};
  kernels::active().combine(cfg.terms(), cfg.alpha_sum(), in, out);
  if (!x_re.empty()) std::copy(xr.begin(), xr.end(), x_re.begin());
  if (!x_im.empty()) std::copy(xi.begin(), xi.end(), x_im.begin());
}

void BlockSampler::fill(Rng& rng, std::optional<std::complex<double>> fixed_x, PointCloud& cloud,
                        std::size_t begin, std::size_t count) {
  const ValidConfig& cfg = *config_;
  for (std::size_t done = 0; done < count;) {
    const std::size_t m = std::min(kBlock, count - done);
    const std::size_t row = begin + done;
    std::span<double> r1_re, r1_im, r2;
    if (cfg.has_cd()) {
      r1_re = cloud.column(0).subspan(row, m);
      r1_im = cloud.column(1).subspan(row, m);
    }
    if (cfg.has_ed()) r2 = cloud.column(cfg.has_cd() ? 2 : 0).subspan(row, m);
    draw(rng, m, fixed_x, r1_re, r1_im, r2);
    done += m;
  }
}

}  // namespace detail

namespace {

Observation sample_one(const ValidConfig& config, std::optional<std::complex<double>> x, std::uint64_t seed) {
  Rng rng(seed);
  detail::BlockSampler sampler(config);
  double r1_re = 0.0, r1_im = 0.0, r2 = 0.0, x_re = 0.0, x_im = 0.0;
  sampler.draw(rng, 1, x, {&r1_re, 1}, {&r1_im, 1}, {&r2, 1}, {&x_re, 1}, {&x_im, 1});
  Observation obs{{x_re, x_im}, std::nullopt, std::nullopt};
  if (config.has_cd()) obs.r1 = std::complex<double>(r1_re, r1_im);
  if (config.has_ed()) obs.r2 = r2;
  return obs;
}

}  // namespace

Observation sample_observation(const ValidConfig& config, std::uint64_t seed) {
  return sample_one(config, std::nullopt, seed);
}

Observation sample_observation_given_x(const ValidConfig& config, std::complex<double> x, std::uint64_t seed) {
  return sample_one(config, x, seed);
}

}  // namespace splitrx
