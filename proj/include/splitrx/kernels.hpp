// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data-parallel inner loops of the sampler and the histogram estimator.
// Every kernel has a scalar reference; SIMD variants must produce
// bit-identical output and are picked at runtime from the CPU features.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "splitrx/model.hpp"

namespace splitrx::kernels {

/// One block of m draws. Per-antenna arrays are antenna-major (K * m).
struct BlockInputs {
  std::span<const double> x_re, x_im;  // m
  std::span<const double> u_re, u_im;  // antenna noise, standard normal
  std::span<const double> v_re, v_im;  // conversion noise (CD branch)
  std::span<const double> n;           // rectifier noise (ED branch)
};

/// Empty r1 spans skip the CD branch, an empty r2 span skips the ED branch.
struct BlockOutputs {
  std::span<double> r1_re, r1_im;
  std::span<double> r2;
};

struct MinMax {
  double lo;
  double hi;
};

struct KernelTable {
  std::string_view name;
  void (*combine)(std::span<const AntennaTerm> terms, double alpha_sum, const BlockInputs& in,
                  const BlockOutputs& out);
  MinMax (*min_max)(std::span<const double> values);
  /// keys[i] = keys[i] * bins + min(floor((values[i] - lo) * inv_width), bins - 1)
  void (*accumulate_bins)(std::span<const double> values, double lo, double inv_width,
                          std::uint32_t bins, std::span<std::uint32_t> keys);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_table() noexcept;

/// All tables usable on this machine, scalar first.
std::vector<const KernelTable*> available();

/// Table used by the library. Chosen once from SPLITRX_KERNEL
/// (scalar | avx2 | auto, default auto) and the CPU features.
const KernelTable& active() noexcept;

/// Overrides the active table; returns false if `name` is not available.
bool select(std::string_view name);

}  // namespace splitrx::kernels
