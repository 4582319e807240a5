// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace splitrx {

enum class ErrorCode {
  dimension_mismatch,
  boundary_rho,
  rho_out_of_range,
  zero_gain_antenna,
  nonpositive_power,
  zero_weight_sum,
  negative_weight,
  invalid_noise,
  invalid_channel,
  non_finite,
  wrong_mode,
  empty_sample_set,
  degenerate_range,
  unsupported_dimension,
  invalid_settings,
  check_failed,
  unknown_figure,
  invalid_spec,
  config_parse,
  io,
};

/// Stable machine-readable name, e.g. "boundary-rho".
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace splitrx
