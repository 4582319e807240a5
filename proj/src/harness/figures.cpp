// SPDX-License-Identifier: Apache-2.0
#include <string>

#include "splitrx/harness.hpp"

namespace splitrx {

SweepSpec figure_spec(std::string_view name) {
  SweepSpec s;
  if (name == "fig2") {
    // MI versus a shared splitting ratio, approximation against simulation.
    s.series = SeriesVariable::power;
    s.series_values = {10.0, 100.0, 1000.0};
    s.channel = ChannelVector::from_magnitudes({1.0, 1.0});
    s.scheme = WeightScheme::explicit_weights;
    s.alpha = {0.5, 0.5};
    s.beta = {0.5, 0.5};
    s.methods = {Method::closed_form, Method::monte_carlo};
  } else if (name == "fig3") {
    // Contour over independent splitting ratios.
    s.variable = SweepVariable::rho_2d;
    s.channel = ChannelVector::from_magnitudes({1.0, 3.0});
    s.power = 1000.0;
    s.scheme = WeightScheme::explicit_weights;
    s.alpha = {0.1, 0.9};
    s.beta = {0.1, 0.9};
  } else if (name == "fig4") {
    // Combining schemes compared over the shared splitting ratio.
    s.channel = ChannelVector::from_magnitudes({1.0, 3.0});
    s.power = 100.0;
    s.methods = {Method::closed_form, Method::mrc, Method::egc};
  } else if (name == "fig5") {
    s.variable = SweepVariable::antennas;
    s.grid = GridSpec{1.0, 100.0, 100, false, {}};
    s.series = SeriesVariable::power;
    s.series_values = {10.0, 100.0, 1000.0};
    s.methods = {Method::max, Method::cd_baseline};
  } else if (name == "fig6") {
    s.variable = SweepVariable::power;
    s.grid = GridSpec{1.0, 1e4, 41, true, {}};
    s.series = SeriesVariable::antennas;
    s.series_values = {1.0, 2.0, 4.0, 8.0};
    s.methods = {Method::gain};
  } else {
    throw Error(ErrorCode::unknown_figure, "unknown figure '" + std::string(name) + "' (expected fig2 .. fig6)");
  }
  return s;
}

ResultTable figure(std::string_view name) { return run_sweep(figure_spec(name)); }

}  // namespace splitrx
