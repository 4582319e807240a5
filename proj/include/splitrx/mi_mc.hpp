// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>

#include "splitrx/histogram.hpp"
#include "splitrx/model.hpp"

namespace splitrx {

struct McSettings {
  std::uint64_t n_joint = 10'000'000;
  std::uint32_t n_outer = 200;
  std::uint32_t n_inner = 100'000;
  /// Fixed bin counts; when empty the count is chosen per histogram from
  /// `target_occupancy`.
  std::optional<std::uint32_t> bins_per_dim;
  std::optional<std::uint32_t> cond_bins_per_dim;
  double target_occupancy = 16.0;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  void validate() const;
};

enum class MiMethod { monte_carlo, closed_form };

struct McDiagnostics {
  McSettings settings;
  double joint_entropy = 0.0;
  double conditional_entropy = 0.0;
  std::uint32_t joint_bins = 0;
  std::uint32_t cond_bins_min = 0;
  std::uint32_t cond_bins_max = 0;
};

struct MiEstimate {
  double value = 0.0;      // bits
  double std_error = 0.0;  // bits; 0 for closed forms
  MiMethod method = MiMethod::closed_form;
  std::optional<McDiagnostics> mc;
};

/// H(R1, R2) - H(R1, R2 | X) from histogram entropies. The joint uses n_joint
/// draws; the conditional term averages n_outer symbols with n_inner draws
/// each. std_error is the jackknife over the outer symbols (infinite when
/// n_outer == 1).
MiEstimate estimate_mi(const ValidConfig& config, const McSettings& settings);

}  // namespace splitrx
