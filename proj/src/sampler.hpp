// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "splitrx/histogram.hpp"
#include "splitrx/model.hpp"
#include "splitrx/rng.hpp"

namespace splitrx::detail {

/// Block-wise draws of the combined observation. Per block of m samples the
/// variates are consumed in a fixed order: Re X, Im X (unless fixed), then per
/// antenna Re W, Im W, Re Z, Im Z (CD branch) and N (ED branch).
class BlockSampler {
 public:
  static constexpr std::size_t kBlock = 1024;

  explicit BlockSampler(const ValidConfig& config);

  /// Fills the first m entries of the outputs (m <= kBlock). Unused branch
  /// spans may be empty. `x_re`/`x_im` receive the symbols when non-empty.
  void draw(Rng& rng, std::size_t m, std::optional<std::complex<double>> fixed_x,
            std::span<double> r1_re, std::span<double> r1_im, std::span<double> r2,
            std::span<double> x_re = {}, std::span<double> x_im = {});

  /// Writes `count` observations into `cloud` rows [begin, begin + count),
  /// columns ordered (Re R1, Im R1, R2) restricted to the active branches.
  void fill(Rng& rng, std::optional<std::complex<double>> fixed_x, PointCloud& cloud,
            std::size_t begin, std::size_t count);

 private:
  const ValidConfig* config_;
  std::vector<double> x_re_, x_im_, u_re_, u_im_, v_re_, v_im_, n_;
};

}  // namespace splitrx::detail
