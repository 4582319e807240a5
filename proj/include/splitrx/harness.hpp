// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "splitrx/mi_mc.hpp"
#include "splitrx/model.hpp"

namespace splitrx {

enum class SweepVariable { rho_shared, rho_2d, power, antennas };
enum class SeriesVariable { none, power, antennas };
enum class WeightScheme { optimal, egc, mrc, explicit_weights };

enum class Method {
  closed_form,  // approximation at the point's design
  monte_carlo,  // histogram MI estimate at the point's design
  cd_baseline,  // conventional CD receiver
  max,          // optimized MI at rho*
  egc,          // approximation with equal-gain weights
  mrc,          // approximation with maximum-ratio weights
  gain,         // finite-SNR MI gain over the CD receiver
};

std::string_view method_name(Method m) noexcept;
std::string_view variable_name(SweepVariable v) noexcept;

/// Linear (or log-spaced) grid, or an explicit list when `values` is set.
struct GridSpec {
  double start = 0.02;
  double stop = 0.98;
  std::size_t count = 49;
  bool log = false;
  std::vector<double> values;

  std::vector<double> points() const;
};

struct SweepSpec {
  SweepVariable variable = SweepVariable::rho_shared;
  GridSpec grid;
  SeriesVariable series = SeriesVariable::none;
  std::vector<double> series_values;

  ChannelVector channel = ChannelVector::from_magnitudes({1.0, 1.0});
  double channel_gain = 1.0;  // |h_k| when the antenna count is swept
  NoiseProfile noise;
  double power = 100.0;
  WeightScheme scheme = WeightScheme::optimal;
  std::vector<double> alpha;  // explicit scheme only
  std::vector<double> beta;
  std::optional<double> rho;  // shared rho when not swept; rho* when empty

  std::vector<Method> methods{Method::closed_form};
  McSettings mc;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string output_path;

  /// Throws invalid-spec.
  void validate() const;
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(std::string_view name) const;
  void write_csv(std::ostream& os) const;
  std::string to_csv() const;
};

/// One row per grid point (series-major), in grid order regardless of how
/// points were scheduled. Errors name the offending grid point.
ResultTable run_sweep(const SweepSpec& spec);

/// Built-in presets for fig2 .. fig6; throws unknown-figure.
SweepSpec figure_spec(std::string_view name);
ResultTable figure(std::string_view name);

/// Flat `key = value` text with `#` comments. Keys mirror SweepSpec fields;
/// lists are comma separated. Throws config-parse.
void apply_config_value(SweepSpec& spec, std::string_view key, std::string_view value);
SweepSpec parse_sweep_config(std::string_view text, SweepSpec base = {});
SweepSpec load_sweep_config(const std::string& path, SweepSpec base = {});

std::vector<double> parse_number_list(std::string_view text);
std::string format_number(double value);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct SelftestOptions {
  unsigned threads = 0;
  std::uint64_t seed = 1;
  /// Reduced Monte Carlo effort for smoke runs; the acceptance gate uses false.
  bool quick = false;
  /// Restrict to these criterion ids (empty runs all).
  std::vector<int> only;
};

/// Runs the acceptance criteria; `on_result` is called as each one finishes.
std::vector<CriterionResult> run_selftest(const SelftestOptions& options,
                                          void (*on_result)(const CriterionResult&) = nullptr);
std::string format_criterion(const CriterionResult& r);

}  // namespace splitrx
