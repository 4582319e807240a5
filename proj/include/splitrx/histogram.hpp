// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace splitrx {

/// Column-major set of d-dimensional points.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::size_t dims, std::size_t size);
  static PointCloud from_columns(std::vector<std::vector<double>> columns);

  std::size_t dims() const noexcept { return columns_.size(); }
  std::size_t size() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }
  std::span<double> column(std::size_t j) noexcept { return columns_[j]; }
  std::span<const double> column(std::size_t j) const noexcept { return columns_[j]; }

 private:
  std::vector<std::vector<double>> columns_;
};

/// Sparse histogram: occupied cell keys in increasing order with counts.
/// Merging is exact, so partial histograms may be combined in any grouping.
class CellCounts {
 public:
  CellCounts() = default;
  static CellCounts from_keys(std::vector<std::uint32_t> keys);
  static CellCounts merge(const CellCounts& a, const CellCounts& b);

  std::size_t occupied() const noexcept { return keys_.size(); }
  std::uint64_t total() const noexcept { return total_; }
  std::span<const std::uint32_t> keys() const noexcept { return keys_; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }

  /// -sum p log2 p over occupied cells (discrete entropy of the cell labels).
  double plugin_entropy_bits() const;

 private:
  std::vector<std::uint32_t> keys_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Equal-width cells spanning the empirical [min, max] of every dimension.
struct BinGrid {
  std::uint32_t bins = 0;
  std::vector<double> lo;
  std::vector<double> hi;

  double width(std::size_t j) const noexcept { return (hi[j] - lo[j]) / bins; }
  double log2_cell_volume() const;
};

struct EntropyEstimate {
  double bits = 0.0;
  std::uint32_t bins_per_dim = 0;
  std::size_t occupied_bins = 0;
  std::size_t samples = 0;
  bool undersampled = false;  // fewer than 10 * bins^d samples
};

/// Throws empty-sample-set, unsupported-dimension (d outside 1..3) or
/// degenerate-range (some dimension has zero spread).
BinGrid make_grid(const PointCloud& points, std::uint32_t bins_per_dim);
CellCounts count_cells(const PointCloud& points, const BinGrid& grid, unsigned threads = 0);

/// Histogram differential entropy in bits with a fixed bin count.
EntropyEstimate estimate_entropy_histogram(const PointCloud& points, std::uint32_t bins_per_dim,
                                           unsigned threads = 0);

/// Bin counts tried by the automatic selection, increasing.
std::vector<std::uint32_t> bin_ladder(std::size_t dims, std::size_t samples);

/// Histogram entropy with the finest ladder bin count whose mean occupancy
/// (samples per occupied cell) is at least `target_occupancy`.
EntropyEstimate estimate_entropy_auto(const PointCloud& points, double target_occupancy,
                                      unsigned threads = 0);

}  // namespace splitrx
