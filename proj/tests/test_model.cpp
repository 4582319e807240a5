// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles/oracles.hpp"
#include "splitrx/model.hpp"
#include "splitrx/rng.hpp"

using namespace splitrx;
using Catch::Approx;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::io;
}

ValidConfig two_antennas(double P = 100.0) {
  return validate(ChannelVector::from_magnitudes({1.0, 1.0}), NoiseProfile{},
                  ReceiverDesign::splitting({0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}), TransmitConfig{P});
}

struct Moments {
  double mean = 0, var = 0;
};

template <class F>
Moments moments(std::size_t n, F&& draw) {
  double s = 0, s2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = draw(i);
    s += v;
    s2 += v * v;
  }
  const double m = s / n;
  return {m, s2 / n - m * m};
}

}  // namespace

TEST_CASE("validate accepts a well-formed splitting design", "[model]") {
  const ValidConfig cfg = two_antennas();
  CHECK(cfg.dims() == 3);
  CHECK(cfg.alpha_sum() == Approx(1.0));
  CHECK(cfg.beta_sum() == Approx(1.0));
}

TEST_CASE("validate reports structured errors", "[model]") {
  const auto h = ChannelVector::from_magnitudes({1.0, 1.0});
  const NoiseProfile n;
  const TransmitConfig tx{100.0};
  CHECK(code_of([&] { validate(h, n, ReceiverDesign::splitting({0.5, 0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}), tx); }) ==
        ErrorCode::dimension_mismatch);
  CHECK(code_of([&] { validate(h, n, ReceiverDesign::splitting({0.0, 0.5}, {0.5, 0.5}, {0.5, 0.5}), tx); }) ==
        ErrorCode::boundary_rho);
  CHECK(code_of([&] { validate(h, n, ReceiverDesign::splitting({1.0, 0.5}, {0.5, 0.5}, {0.5, 0.5}), tx); }) ==
        ErrorCode::boundary_rho);
  CHECK(code_of([&] { validate(h, n, ReceiverDesign::splitting({1.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}), tx); }) ==
        ErrorCode::rho_out_of_range);
  CHECK(code_of([&] {
          validate(ChannelVector::from_magnitudes({1.0, 0.0}), n,
                   ReceiverDesign::splitting({0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}), tx);
        }) == ErrorCode::zero_gain_antenna);
  CHECK(code_of([&] { validate(h, n, ReceiverDesign::splitting({0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}), {0.0}); }) ==
        ErrorCode::nonpositive_power);
  CHECK(code_of([&] { validate(h, n, ReceiverDesign::splitting({0.5, 0.5}, {0.0, 0.0}, {0.5, 0.5}), tx); }) ==
        ErrorCode::zero_weight_sum);
  CHECK(code_of([&] { validate(h, n, ReceiverDesign::splitting({0.5, 0.5}, {-0.5, 1.0}, {0.5, 0.5}), tx); }) ==
        ErrorCode::negative_weight);
  CHECK(code_of([&] { validate(h, NoiseProfile{-1.0, 1.0, 0.01}, ReceiverDesign::cd_only({1.0, 1.0}), tx); }) ==
        ErrorCode::invalid_noise);
  CHECK(code_of([&] { validate(ChannelVector{{1.0, 1.0}, {0.0}}, n, ReceiverDesign::cd_only({1.0, 1.0}), tx); }) ==
        ErrorCode::dimension_mismatch);
  CHECK(code_of([&] { validate(ChannelVector{}, n, ReceiverDesign::cd_only({}), tx); }) == ErrorCode::invalid_channel);
}

TEST_CASE("boundary receivers are explicit modes", "[model]") {
  const auto h = ChannelVector::from_magnitudes({1.0, 2.0});
  const ValidConfig cd = validate(h, NoiseProfile{}, ReceiverDesign::cd_only({1.0, 1.0}), TransmitConfig{10.0});
  const ValidConfig ed = validate(h, NoiseProfile{}, ReceiverDesign::ed_only({1.0, 1.0}), TransmitConfig{10.0});
  CHECK(cd.dims() == 2);
  CHECK(ed.dims() == 1);
  const Observation a = sample_observation(cd, 3);
  const Observation b = sample_observation(ed, 3);
  CHECK(a.r1.has_value());
  CHECK_FALSE(a.r2.has_value());
  CHECK_FALSE(b.r1.has_value());
  CHECK(b.r2.has_value());
}

TEST_CASE("noiseless sampler reproduces the weighted symbol", "[model]") {
  const ValidConfig cfg = validate(ChannelVector{{1.0, 2.5}, {0.3, -1.1}}, NoiseProfile{0.0, 0.0, 0.0},
                                   ReceiverDesign::splitting({0.3, 0.7}, {0.2, 0.9}, {0.4, 0.1}), TransmitConfig{7.0});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Observation o = sample_observation(cfg, seed);
    CHECK(o.r1->real() == Approx(1.1 * o.x.real()).margin(1e-15));
    CHECK(o.r1->imag() == Approx(1.1 * o.x.imag()).margin(1e-15));
    CHECK(*o.r2 == Approx(0.5 * std::abs(o.x)).margin(1e-15));
  }
  const Observation zero = sample_observation_given_x(cfg, {0.0, 0.0}, 1);
  CHECK(std::abs(*zero.r1) == 0.0);
  CHECK(*zero.r2 == 0.0);
  const Observation unit = sample_observation_given_x(cfg, {1.0, 0.0}, 1);
  CHECK(*unit.r2 == Approx(0.5));
}

TEST_CASE("sampler is deterministic in the seed", "[model]") {
  const ValidConfig cfg = validate(ChannelVector::from_magnitudes({1.0}), NoiseProfile{},
                                   ReceiverDesign::splitting({0.5}, {1.0}, {1.0}), TransmitConfig{10.0});
  const Observation a = sample_observation(cfg, 42), b = sample_observation(cfg, 42), c = sample_observation(cfg, 43);
  CHECK(a.x == b.x);
  CHECK(*a.r1 == *b.r1);
  CHECK(*a.r2 == *b.r2);
  CHECK(*a.r2 != *c.r2);
}

TEST_CASE("symbol is unit-power circular Gaussian", "[model]") {
  const ValidConfig cfg = two_antennas();
  const std::size_t n = 200'000;
  const Moments re = moments(n, [&](std::size_t i) { return sample_observation(cfg, i).x.real(); });
  const Moments im = moments(n, [&](std::size_t i) { return sample_observation(cfg, i + n).x.imag(); });
  CHECK(re.mean == Approx(0.0).margin(0.01));
  CHECK(re.var == Approx(0.5).epsilon(0.01));
  CHECK(im.var == Approx(0.5).epsilon(0.01));
}

TEST_CASE("CD noise power matches the variance algebra", "[model]") {
  const std::vector<double> h{0.8, 1.7}, rho{0.3, 0.6}, alpha{0.4, 1.2};
  const NoiseProfile n{0.2, 0.9, 0.05};
  const double P = 3.0;
  const ValidConfig cfg = validate(ChannelVector{h, {0.4, 2.0}}, n, ReceiverDesign::splitting(rho, alpha, {1.0, 1.0}),
                                   TransmitConfig{P});
  double expected = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    expected += alpha[k] * alpha[k] * n.sigma_a_sq / (P * h[k] * h[k]) +
                alpha[k] * alpha[k] * n.sigma_cov_sq / (rho[k] * P * h[k] * h[k]);
  }
  const std::size_t N = 1'000'000;
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const Observation o = sample_observation(cfg, derive_seed(5, Stream::single, i));
    s += std::norm(*o.r1 - cfg.alpha_sum() * o.x);
  }
  CHECK(s / N == Approx(expected).epsilon(0.01));
}

TEST_CASE("conditional ED mean matches the Rician mean", "[model]") {
  const std::vector<double> h{1.0, 0.5}, beta{0.3, 0.7};
  const NoiseProfile n{0.5, 1.0, 0.2};
  const double P = 2.0;
  const std::complex<double> x(0.6, -0.3);
  const ValidConfig cfg = validate(ChannelVector{h, {1.0, -0.4}}, n,
                                   ReceiverDesign::splitting({0.5, 0.5}, {1.0, 1.0}, beta), TransmitConfig{P});
  double expected = 0.0;
  for (std::size_t k = 0; k < 2; ++k) expected += beta[k] * oracle::rician_mean(std::abs(x), n.sigma_a_sq / (P * h[k] * h[k]));
  const std::size_t N = 1'000'000;
  const Moments m = moments(N, [&](std::size_t i) {
    return *sample_observation_given_x(cfg, x, derive_seed(6, Stream::single, i)).r2;
  });
  CHECK(m.mean == Approx(expected).margin(5.0 * std::sqrt(m.var / N)));
}

TEST_CASE("distribution is invariant to channel phases and antenna order", "[model]") {
  const NoiseProfile n{0.4, 0.8, 0.3};
  const TransmitConfig tx{1.5};
  const ValidConfig base = validate(ChannelVector::from_magnitudes({1.0, 2.0, 0.7}), n,
                                    ReceiverDesign::splitting({0.2, 0.5, 0.8}, {0.1, 0.5, 0.4}, {0.6, 0.3, 0.1}), tx);
  const ValidConfig rotated = validate(ChannelVector{{1.0, 2.0, 0.7}, {2.1, -0.7, 3.0}}, n,
                                       ReceiverDesign::splitting({0.2, 0.5, 0.8}, {0.1, 0.5, 0.4}, {0.6, 0.3, 0.1}), tx);
  const ValidConfig permuted = validate(ChannelVector::from_magnitudes({0.7, 1.0, 2.0}), n,
                                        ReceiverDesign::splitting({0.8, 0.2, 0.5}, {0.4, 0.1, 0.5}, {0.1, 0.6, 0.3}), tx);
  const std::size_t N = 300'000;
  auto stats = [&](const ValidConfig& cfg, std::uint64_t salt) {
    const Moments r2 = moments(N, [&](std::size_t i) { return *sample_observation(cfg, derive_seed(salt, Stream::single, i)).r2; });
    const Moments r1 = moments(N, [&](std::size_t i) {
      const Observation o = sample_observation(cfg, derive_seed(salt + 1, Stream::single, i));
      return std::norm(*o.r1 - cfg.alpha_sum() * o.x);
    });
    return std::vector<double>{r2.mean, r2.var, r1.mean};
  };
  const auto a = stats(base, 10), b = stats(rotated, 20), c = stats(permuted, 30);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(b[i] == Approx(a[i]).epsilon(0.01));
    CHECK(c[i] == Approx(a[i]).epsilon(0.01));
  }
}

TEST_CASE("per-branch rectifier noise matches the combined noise variance", "[model]") {
  // With no antenna noise the ED output given x is sum beta |x| plus the
  // combined rectifier noise.
  const std::vector<double> h{1.0, 2.0, 0.5}, rho{0.3, 0.5, 0.9}, beta{0.2, 0.5, 0.3};
  const NoiseProfile n{0.0, 1.0, 0.4};
  const double P = 5.0;
  const ValidConfig cfg = validate(ChannelVector::from_magnitudes(h), n,
                                   ReceiverDesign::splitting(rho, {1.0, 1.0, 1.0}, beta), TransmitConfig{P});
  double combined = 0.0;
  for (std::size_t k = 0; k < 3; ++k) combined += beta[k] * beta[k] * n.sigma_rec_sq / ((1.0 - rho[k]) * P * h[k] * h[k]);
  const std::size_t N = 400'000;
  const Moments m = moments(N, [&](std::size_t i) {
    return *sample_observation_given_x(cfg, {0.3, 0.4}, derive_seed(8, Stream::single, i)).r2;
  });
  CHECK(m.mean == Approx(0.5).margin(5.0 * std::sqrt(combined / N)));
  // Variance of a sample variance is about 2 var^2 / N for Gaussian data.
  CHECK(m.var == Approx(combined).margin(5.0 * combined * std::sqrt(2.0 / N)));
}
