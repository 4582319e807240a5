// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles/oracles.hpp"
#include "splitrx/mi_closed.hpp"
#include "splitrx/optimizer.hpp"

using namespace splitrx;
using Catch::Approx;

namespace {

const NoiseProfile kDefault{};
const ChannelVector kUneven = ChannelVector::from_magnitudes({1.0, 3.0});

oracle::Noise as_oracle(const NoiseProfile& n) { return {n.sigma_a_sq, n.sigma_cov_sq, n.sigma_rec_sq}; }

ValidConfig splitting(const ChannelVector& ch, const NoiseProfile& noise, std::vector<double> rho,
                      std::vector<double> alpha, std::vector<double> beta, double P) {
  return validate(ch, noise, ReceiverDesign::splitting(std::move(rho), std::move(alpha), std::move(beta)),
                  TransmitConfig{P});
}

ValidConfig shared(const ChannelVector& ch, const NoiseProfile& noise, double rho,
                   const std::vector<double>& alpha, const std::vector<double>& beta, double P) {
  return splitting(ch, noise, std::vector<double>(ch.size(), rho), alpha, beta, P);
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::io;
}

struct RandomSetup {
  ChannelVector channel;
  NoiseProfile noise;
  double power;
};

RandomSetup random_setup(std::mt19937_64& rng, bool splitting_regime) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t K = 1 + rng() % 6;
  std::vector<double> h(K);
  for (double& v : h) v = 0.2 + 3.0 * u(rng);
  NoiseProfile n;
  n.sigma_a_sq = std::pow(10.0, -3.0 + 2.0 * u(rng));
  n.sigma_cov_sq = std::pow(10.0, -1.0 + 2.0 * u(rng));
  n.sigma_rec_sq = splitting_regime ? n.sigma_cov_sq / (4.5 + 100.0 * u(rng))
                                    : n.sigma_cov_sq / (0.5 + 3.4 * u(rng));
  return {ChannelVector::from_magnitudes(h), n, std::pow(10.0, 1.0 + 3.0 * u(rng))};
}

}  // namespace

TEST_CASE("auxiliary quantities of a hand-evaluated configuration", "[mi-closed]") {
  NoiseProfile n;
  n.sigma_cov_sq = 1.0;
  n.sigma_rec_sq = 0.5;
  const AuxQuantities q = aux_quantities(shared(ChannelVector::from_magnitudes({1.0}), n, 0.5, {1.0}, {1.0}, 4.0));
  CHECK(q.c == Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(q.gamma == Approx(1.0).epsilon(1e-14));
  CHECK(q.a == Approx(1.0).epsilon(1e-14));
  CHECK(q.a_prime == 1.0);
}

TEST_CASE("auxiliary identity and weight homogeneity", "[mi-closed]") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const RandomSetup s = random_setup(rng, trial % 2 == 0);
    std::vector<double> rho(s.channel.size()), alpha(s.channel.size()), beta(s.channel.size());
    for (std::size_t k = 0; k < rho.size(); ++k) {
      rho[k] = std::clamp(u(rng), 0.05, 0.95);
      alpha[k] = u(rng);
      beta[k] = u(rng);
    }
    const AuxQuantities q = aux_quantities(splitting(s.channel, s.noise, rho, alpha, beta, s.power));
    CHECK(2.0 * q.c_prime * q.c_prime * s.noise.sigma_rec_sq ==
          Approx(q.c * q.c * s.noise.sigma_cov_sq).epsilon(1e-12));

    std::vector<double> doubled = alpha;
    for (double& a : doubled) a *= 2.0;
    const AuxQuantities d = aux_quantities(splitting(s.channel, s.noise, rho, doubled, beta, s.power));
    CHECK(d.a_prime == Approx(2.0 * q.a_prime).epsilon(1e-14));
    CHECK(d.a == Approx(q.a).epsilon(1e-12));
    CHECK(d.c == Approx(q.c).epsilon(1e-12));
    CHECK(d.gamma == Approx(q.gamma).epsilon(1e-12));
    CHECK(d.c_prime == Approx(q.c_prime).epsilon(1e-12));
    for (std::size_t k = 0; k < rho.size(); ++k) {
      CHECK(d.b[k] == Approx(q.b[k]).epsilon(1e-12));
      CHECK(d.b_prime[k] == Approx(q.b_prime[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("approximation with two equal antennas at P = 1000", "[mi-closed]") {
  const MiEstimate e = mi_approx(shared(ChannelVector::from_magnitudes({1.0, 1.0}), kDefault, 0.56,
                                        {0.5, 0.5}, {0.5, 0.5}, 1000.0));
  CHECK(e.value == Approx(12.64).margin(0.01));
  CHECK(e.method == MiMethod::closed_form);
  CHECK(e.std_error == 0.0);
  CHECK_FALSE(e.mc.has_value());
}

TEST_CASE("approximation matches the expanded form", "[mi-closed]") {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const RandomSetup s = random_setup(rng, trial % 3 != 0);
    std::vector<double> rho(s.channel.size()), alpha(s.channel.size()), beta(s.channel.size());
    for (std::size_t k = 0; k < rho.size(); ++k) {
      rho[k] = std::clamp(u(rng), 0.02, 0.98);
      alpha[k] = u(rng);
      beta[k] = u(rng);
    }
    const double got = mi_approx(splitting(s.channel, s.noise, rho, alpha, beta, s.power)).value;
    const double want = oracle::mi_expanded(s.channel.magnitudes, as_oracle(s.noise), rho, alpha, beta, s.power);
    CHECK(got == Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("approximation is invariant to weight scaling, phases and permutation", "[mi-closed]") {
  const ChannelVector ch = ChannelVector::from_magnitudes({0.7, 1.9, 1.2});
  const std::vector<double> rho{0.3, 0.6, 0.45}, alpha{0.2, 0.5, 0.3}, beta{0.6, 0.1, 0.3};
  const double base = mi_approx(splitting(ch, kDefault, rho, alpha, beta, 300.0)).value;

  for (double c : {1e-3, 0.5, 7.0, 1e4}) {
    std::vector<double> a = alpha, b = beta;
    for (double& v : a) v *= c;
    for (double& v : b) v *= 1.0 / (c + 1.0);
    CHECK(mi_approx(splitting(ch, kDefault, rho, a, b, 300.0)).value == Approx(base).epsilon(1e-12));
  }

  ChannelVector phased = ch;
  phased.phases = {0.3, -2.0, 3.1};
  CHECK(mi_approx(splitting(phased, kDefault, rho, alpha, beta, 300.0)).value == Approx(base).epsilon(1e-14));

  std::vector<std::size_t> order{0, 1, 2};
  while (std::next_permutation(order.begin(), order.end())) {
    std::vector<double> h, r, a, b;
    for (std::size_t i : order) {
      h.push_back(ch.magnitudes[i]);
      r.push_back(rho[i]);
      a.push_back(alpha[i]);
      b.push_back(beta[i]);
    }
    CHECK(mi_approx(splitting(ChannelVector::from_magnitudes(h), kDefault, r, a, b, 300.0)).value ==
          Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("CD receiver capacity", "[mi-closed]") {
  CHECK(mi_cd(ChannelVector::from_magnitudes({1.0}), kDefault, TransmitConfig{0.0}).value == 0.0);
  CHECK(mi_cd(ChannelVector::from_magnitudes(std::vector<double>(10, 1.0)), kDefault, TransmitConfig{100.0}).value ==
        Approx(std::log2(1.0 + 1000.0 / 1.01)).epsilon(1e-14));
  const double one = mi_cd(ChannelVector::from_magnitudes({1.0}), kDefault, TransmitConfig{100.0}).value;
  CHECK(one == Approx(std::log2(1.0 + 100.0 / 1.01)).epsilon(1e-14));
  CHECK(one == Approx(6.65).margin(0.01));
  CHECK(mi_cd(ChannelVector::from_magnitudes(std::vector<double>(10, 1.0)), kDefault, TransmitConfig{100.0}).value ==
        Approx(9.95).margin(0.005));
}

TEST_CASE("noise factor rational form matches the product form", "[mi-closed]") {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const RandomSetup s = random_setup(rng, trial % 2 == 0);
    for (double rho : {1e-4, 0.1, 0.5, 0.9, 1.0 - 1e-6, u(rng)}) {
      CHECK(splitting_noise_factor(s.noise, rho) == Approx(oracle::noise_factor(as_oracle(s.noise), rho)).epsilon(1e-9));
    }
    // At rho = 1 the ED branch drops out.
    CHECK(splitting_noise_factor(s.noise, 1.0) ==
          Approx(std::pow(s.noise.sigma_cov_sq + s.noise.sigma_a_sq, 2.0)).epsilon(1e-12));
  }
}

TEST_CASE("optimized MI with channel (1, 3) at P = 1000", "[mi-closed]") {
  const double rho = optimal_rho(kDefault).rho_star;
  const TransmitConfig tx{1000.0};
  const double best = mi_max(kUneven, kDefault, tx, rho).value;
  CHECK(best == Approx(14.96).margin(0.01));
  CHECK(mi_max(kUneven, kDefault, tx, 0.5605).value == Approx(14.96).margin(0.01));
  // log2(P sum h^2) and log2(P K^2 / sum 1/h^2) plus the same noise term.
  const double noise_term = best - std::log2(10000.0);
  CHECK(noise_term == Approx(1.679).margin(0.001));
  CHECK(mi_egc(kUneven, kDefault, tx, rho).value == Approx(std::log2(3600.0) + noise_term).epsilon(1e-12));
  CHECK(mi_mrc(kUneven, kDefault, tx, rho).value == Approx(std::log2(8000.0) + noise_term).epsilon(1e-12));
  CHECK(mi_egc(kUneven, kDefault, tx, rho).value == Approx(13.49).margin(0.01));
  CHECK(mi_mrc(kUneven, kDefault, tx, rho).value == Approx(14.64).margin(0.01));
}

TEST_CASE("optimized MI with ten equal antennas", "[mi-closed]") {
  const ChannelVector ch = ChannelVector::from_magnitudes(std::vector<double>(10, 1.0));
  const double rho = optimal_rho(kDefault).rho_star;
  const TransmitConfig tx{100.0};
  const double best = mi_max(ch, kDefault, tx, rho).value;
  CHECK(best == Approx(11.64).margin(0.01));
  const double cd = mi_cd(ch, kDefault, tx).value;
  CHECK(best - cd == Approx(1.69).margin(0.01));
  CHECK((best - cd) / cd == Approx(0.17).margin(0.005));
  CHECK(mi_egc(ch, kDefault, tx, rho).value == Approx(best).epsilon(1e-14));
  CHECK(mi_mrc(ch, kDefault, tx, rho).value == Approx(best).epsilon(1e-14));
}

TEST_CASE("optimized MI at rho = 1 is the CD capacity", "[mi-closed]") {
  for (double P : {0.5, 10.0, 1e4}) {
    const TransmitConfig tx{P};
    const double cd = mi_cd(kUneven, kDefault, tx).value;
    CHECK(mi_max(kUneven, kDefault, tx, 1.0).value == Approx(cd).epsilon(1e-15));
  }
}

TEST_CASE("closed forms agree with the approximation at their designs", "[mi-closed]") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    const RandomSetup s = random_setup(rng, true);
    const double rho = optimal_rho(s.noise).rho_star;
    REQUIRE(rho < 1.0);
    const TransmitConfig tx{s.power};
    const std::size_t K = s.channel.size();

    const CombiningWeights opt = optimal_weights(s.channel);
    CHECK(mi_approx(shared(s.channel, s.noise, rho, opt.alpha, opt.beta, s.power)).value ==
          Approx(mi_max(s.channel, s.noise, tx, rho).value).epsilon(1e-9));

    const std::vector<double> egc = egc_weights(K);
    CHECK(mi_approx(shared(s.channel, s.noise, rho, egc, egc, s.power)).value ==
          Approx(mi_egc(s.channel, s.noise, tx, rho).value).epsilon(1e-9));

    const std::vector<double> mrc = mrc_weights(s.channel);
    CHECK(mi_approx(shared(s.channel, s.noise, rho, mrc, mrc, s.power)).value ==
          Approx(mi_mrc(s.channel, s.noise, tx, rho).value).epsilon(1e-9));
  }
}

TEST_CASE("combining schemes are ordered", "[mi-closed]") {
  std::mt19937_64 rng(505);
  for (int trial = 0; trial < 300; ++trial) {
    const RandomSetup s = random_setup(rng, trial % 2 == 0);
    const double rho = optimal_rho(s.noise).rho_star;
    const TransmitConfig tx{s.power};
    const double egc = mi_egc(s.channel, s.noise, tx, rho).value;
    const double mrc = mi_mrc(s.channel, s.noise, tx, rho).value;
    const double best = mi_max(s.channel, s.noise, tx, rho).value;
    CHECK(egc <= mrc + 1e-12);
    CHECK(mrc <= best + 1e-12);
    const auto [lo, hi] = std::minmax_element(s.channel.magnitudes.begin(), s.channel.magnitudes.end());
    if (*hi - *lo > 1e-3) {
      CHECK(egc < mrc);
      CHECK(mrc < best);
    }
  }
}

TEST_CASE("optimized MI grows with power and antennas", "[mi-closed]") {
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    const RandomSetup s = random_setup(rng, trial % 2 == 0);
    const double rho = optimal_rho(s.noise).rho_star;
    const double v = mi_max(s.channel, s.noise, TransmitConfig{s.power}, rho).value;
    CHECK(mi_max(s.channel, s.noise, TransmitConfig{s.power * 1.01}, rho).value > v);
    ChannelVector more = s.channel;
    more.magnitudes.push_back(0.05);
    CHECK(mi_max(more, s.noise, TransmitConfig{s.power}, rho).value >= v);
    ChannelVector reversed = s.channel;
    std::reverse(reversed.magnitudes.begin(), reversed.magnitudes.end());
    CHECK(mi_max(reversed, s.noise, TransmitConfig{s.power}, rho).value == Approx(v).epsilon(1e-14));
  }
}

TEST_CASE("asymptotic gain", "[mi-closed]") {
  const GainReport g = gain_asymptotic(kDefault, optimal_rho(kDefault).rho_star);
  CHECK(g.gain_bits == Approx(1.69).margin(0.01));
  CHECK(g.regime == Regime::splitting);
  CHECK(g.asymptotic);

  NoiseProfile flat;
  flat.sigma_rec_sq = 0.5;
  const GainReport z = gain_asymptotic(flat, optimal_rho(flat).rho_star);
  CHECK(z.gain_bits == 0.0);
  CHECK(z.regime == Regime::cd_degenerate);
}

TEST_CASE("finite-SNR gain", "[mi-closed]") {
  const ChannelVector ten = ChannelVector::from_magnitudes(std::vector<double>(10, 1.0));
  const GainReport g = gain_finite(ten, kDefault, TransmitConfig{100.0});
  CHECK(g.gain_bits == Approx(1.69).margin(0.01));
  CHECK(g.regime == Regime::splitting);
  CHECK_FALSE(g.asymptotic);

  const double limit = gain_asymptotic(kDefault, optimal_rho(kDefault).rho_star).gain_bits;
  for (double P : {1e4, 1e5, 1e6}) {
    for (std::size_t K : {1u, 2u, 8u}) {
      const ChannelVector ch = ChannelVector::from_magnitudes(std::vector<double>(K, 1.0));
      CHECK(std::abs(gain_finite(ch, kDefault, TransmitConfig{P}).gain_bits - limit) <= 0.01);
    }
  }

  NoiseProfile flat;
  flat.sigma_rec_sq = 0.25;
  CHECK(gain_finite(ten, flat, TransmitConfig{100.0}).gain_bits == 0.0);
  flat.sigma_rec_sq = 0.4;
  const GainReport z = gain_finite(ten, flat, TransmitConfig{100.0});
  CHECK(z.gain_bits == 0.0);
  CHECK(z.regime == Regime::cd_degenerate);
}

TEST_CASE("finite-SNR gain with a Monte Carlo ED benchmark", "[mi-closed]") {
  McSettings mc;
  mc.n_joint = 400'000;
  mc.n_outer = 20;
  mc.n_inner = 20'000;
  const ChannelVector ch = ChannelVector::from_magnitudes({1.0, 1.0});
  const TransmitConfig tx{100.0};
  const double without = gain_finite(ch, kDefault, tx).gain_bits;
  const double with = gain_finite(ch, kDefault, tx, mc).gain_bits;
  // The ED-only receiver is weaker than CD here, so the benchmark is the CD term.
  CHECK(with == Approx(without).epsilon(1e-14));
}

TEST_CASE("closed-form errors", "[mi-closed]") {
  const TransmitConfig tx{100.0};
  for (double rho : {0.0, -0.1, 1.5, std::nan("")}) {
    CHECK(code_of([&] { mi_max(kUneven, kDefault, tx, rho); }) == ErrorCode::rho_out_of_range);
    CHECK(code_of([&] { mi_egc(kUneven, kDefault, tx, rho); }) == ErrorCode::rho_out_of_range);
    CHECK(code_of([&] { mi_mrc(kUneven, kDefault, tx, rho); }) == ErrorCode::rho_out_of_range);
  }
  const ValidConfig cd = validate(kUneven, kDefault, ReceiverDesign::cd_only({0.5, 0.5}), tx);
  CHECK(code_of([&] { mi_approx(cd); }) == ErrorCode::wrong_mode);
  CHECK(code_of([&] { aux_quantities(cd); }) == ErrorCode::wrong_mode);
  NoiseProfile noiseless_rec;
  noiseless_rec.sigma_rec_sq = 0.0;
  const ValidConfig v = shared(kUneven, noiseless_rec, 0.5, {0.5, 0.5}, {0.5, 0.5}, 100.0);
  CHECK(code_of([&] { mi_approx(v); }) == ErrorCode::invalid_noise);
}
