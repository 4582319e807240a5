// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles/oracles.hpp"
#include "splitrx/error.hpp"
#include "splitrx/histogram.hpp"
#include "splitrx/rng.hpp"

using namespace splitrx;
using Catch::Approx;

namespace {

PointCloud gaussian(std::size_t dims, std::size_t n, std::uint64_t seed) {
  PointCloud p(dims, n);
  Rng rng(seed);
  for (std::size_t j = 0; j < dims; ++j) fill_standard_normal(rng, p.column(j));
  return p;
}

}  // namespace

TEST_CASE("1-D Gaussian entropy", "[histogram]") {
  const EntropyEstimate e = estimate_entropy_histogram(gaussian(1, 1'000'000, 1), 256);
  CHECK(std::abs(e.bits - oracle::gaussian_entropy_bits(1)) <= 0.02);
  CHECK(e.bins_per_dim == 256);
  CHECK_FALSE(e.undersampled);
}

// At this sample size the plug-in bias alone is about -0.035 bits and the
// total error straddles the tolerance depending on the draw.
TEST_CASE("3-D Gaussian entropy with 1e6 samples and 64 bins", "[histogram][!mayfail]") {
  const EntropyEstimate e = estimate_entropy_histogram(gaussian(3, 1'000'000, 2), 64);
  INFO("estimate " << e.bits << " vs " << oracle::gaussian_entropy_bits(3));
  CHECK(std::abs(e.bits - oracle::gaussian_entropy_bits(3)) <= 0.05);
}

TEST_CASE("3-D Gaussian entropy with 1e7 samples and 64 bins", "[histogram]") {
  const EntropyEstimate e = estimate_entropy_histogram(gaussian(3, 10'000'000, 3), 64);
  CHECK(std::abs(e.bits - oracle::gaussian_entropy_bits(3)) <= 0.05);
}

TEST_CASE("uniform on the unit interval has zero entropy", "[histogram]") {
  // Evenly spaced points pin min = 0 and max = 1 exactly.
  const std::size_t n = 1'000'000;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  for (std::uint32_t bins : {2u, 10u, 100u, 1000u}) {
    CHECK(estimate_entropy_histogram(PointCloud::from_columns({v}), bins).bits == Approx(0.0).margin(1e-5));
  }
  // Random draws.
  Rng rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& x : v) x = u(rng);
  CHECK(estimate_entropy_histogram(PointCloud::from_columns({v}), 100).bits == Approx(0.0).margin(0.01));
}

TEST_CASE("entropy shifts by log2 of a scale factor", "[histogram]") {
  PointCloud p = gaussian(2, 200'000, 5);
  const double h0 = estimate_entropy_histogram(p, 40).bits;
  for (double& x : p.column(0)) x *= 8.0;
  CHECK(estimate_entropy_histogram(p, 40).bits == Approx(h0 + 3.0).margin(1e-9));
}

TEST_CASE("histogram input errors", "[histogram]") {
  auto code = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io;
  };
  CHECK(code([] { estimate_entropy_histogram(PointCloud(1, 0), 10); }) == ErrorCode::empty_sample_set);
  CHECK(code([] { estimate_entropy_histogram(PointCloud::from_columns({{1.0, 1.0, 1.0}}), 10); }) ==
        ErrorCode::degenerate_range);
  CHECK(code([] { estimate_entropy_histogram(PointCloud(4, 10), 10); }) == ErrorCode::unsupported_dimension);
  CHECK(code([] { estimate_entropy_histogram(PointCloud::from_columns({{0.0, 1.0}}), 1); }) ==
        ErrorCode::invalid_settings);
}

TEST_CASE("cell counts merge exactly", "[histogram]") {
  const CellCounts a = CellCounts::from_keys({5, 1, 5, 9, 1, 1});
  const CellCounts b = CellCounts::from_keys({2, 5, 100000});
  const CellCounts c = CellCounts::from_keys({9, 9, 3});
  const CellCounts all = CellCounts::from_keys({5, 1, 5, 9, 1, 1, 2, 5, 100000, 9, 9, 3});
  const CellCounts left = CellCounts::merge(CellCounts::merge(a, b), c);
  const CellCounts right = CellCounts::merge(a, CellCounts::merge(b, c));
  for (const CellCounts* m : {&left, &right}) {
    CHECK(std::vector<std::uint32_t>(m->keys().begin(), m->keys().end()) ==
          std::vector<std::uint32_t>(all.keys().begin(), all.keys().end()));
    CHECK(std::vector<std::uint64_t>(m->counts().begin(), m->counts().end()) ==
          std::vector<std::uint64_t>(all.counts().begin(), all.counts().end()));
    CHECK(m->total() == 12);
  }
  CHECK(all.occupied() == 6);
}

TEST_CASE("radix sort handles the full key range", "[histogram]") {
  std::vector<std::uint32_t> keys;
  Rng rng(6);
  for (int i = 0; i < 100000; ++i) keys.push_back(static_cast<std::uint32_t>(rng()));
  keys.push_back(0xFFFFFFFFu);
  keys.push_back(0);
  const CellCounts c = CellCounts::from_keys(keys);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  CHECK(std::vector<std::uint32_t>(c.keys().begin(), c.keys().end()) == keys);
}

TEST_CASE("plug-in entropy of cell labels", "[histogram]") {
  CHECK(CellCounts::from_keys({1, 2, 3, 4}).plugin_entropy_bits() == Approx(2.0));
  CHECK(CellCounts::from_keys({7, 7, 7}).plugin_entropy_bits() == Approx(0.0).margin(1e-15));
}

TEST_CASE("bin ladder is increasing and respects the key width", "[histogram]") {
  for (std::size_t d : {1u, 2u, 3u}) {
    const auto ladder = bin_ladder(d, 10'000'000);
    REQUIRE(ladder.size() > 10);
    CHECK(ladder.front() == 2);
    for (std::size_t i = 1; i < ladder.size(); ++i) CHECK(ladder[i] > ladder[i - 1]);
    CHECK(std::pow(static_cast<double>(ladder.back()), static_cast<double>(d)) <= 4294967295.0);
  }
  CHECK(bin_ladder(1, 50).back() <= 50);
}

TEST_CASE("automatic bin count meets the occupancy target", "[histogram]") {
  const PointCloud p = gaussian(3, 500'000, 7);
  const EntropyEstimate e = estimate_entropy_auto(p, 16.0);
  CHECK(static_cast<double>(p.size()) / e.occupied_bins >= 16.0);
  // The next ladder entry would be below target.
  const auto ladder = bin_ladder(3, p.size());
  const auto it = std::find(ladder.begin(), ladder.end(), e.bins_per_dim);
  REQUIRE(it != ladder.end());
  if (it + 1 != ladder.end()) {
    const EntropyEstimate finer = estimate_entropy_histogram(p, *(it + 1));
    CHECK(static_cast<double>(p.size()) / finer.occupied_bins < 16.0);
  }
  // Plug-in bias at occupancy T is about -1/(2 T ln 2).
  CHECK(e.bits == Approx(oracle::gaussian_entropy_bits(3) - 1.0 / (32.0 * std::log(2.0))).margin(0.05));
}

TEST_CASE("histogram does not depend on the thread count", "[histogram]") {
  const PointCloud p = gaussian(3, 3'000'000, 8);
  const EntropyEstimate a = estimate_entropy_histogram(p, 50, 1);
  const EntropyEstimate b = estimate_entropy_histogram(p, 50, 4);
  CHECK(a.bits == b.bits);
  CHECK(a.occupied_bins == b.occupied_bins);
}
