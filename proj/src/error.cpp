// SPDX-License-Identifier: Apache-2.0
#include "splitrx/error.hpp"

namespace splitrx {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::boundary_rho: return "boundary-rho";
    case ErrorCode::rho_out_of_range: return "rho-out-of-range";
    case ErrorCode::zero_gain_antenna: return "zero-gain-antenna";
    case ErrorCode::nonpositive_power: return "nonpositive-power";
    case ErrorCode::zero_weight_sum: return "zero-weight-sum";
    case ErrorCode::negative_weight: return "negative-weight";
    case ErrorCode::invalid_noise: return "invalid-noise";
    case ErrorCode::invalid_channel: return "invalid-channel";
    case ErrorCode::non_finite: return "non-finite";
    case ErrorCode::wrong_mode: return "wrong-mode";
    case ErrorCode::empty_sample_set: return "empty-sample-set";
    case ErrorCode::degenerate_range: return "degenerate-range";
    case ErrorCode::unsupported_dimension: return "unsupported-dimension";
    case ErrorCode::invalid_settings: return "invalid-settings";
    case ErrorCode::check_failed: return "check-failed";
    case ErrorCode::unknown_figure: return "unknown-figure";
    case ErrorCode::invalid_spec: return "invalid-spec";
    case ErrorCode::config_parse: return "config-parse";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace splitrx
