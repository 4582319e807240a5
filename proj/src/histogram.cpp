// SPDX-License-Identifier: Apache-2.0
#include "splitrx/histogram.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "splitrx/error.hpp"
#include "splitrx/kernels.hpp"
#include "splitrx/parallel.hpp"

namespace splitrx {

namespace {

constexpr std::size_t kChunk = std::size_t{1} << 20;

// LSD radix sort, 11 bits per pass; passes where every key shares a digit
// are skipped.
void radix_sort(std::vector<std::uint32_t>& keys) {
  constexpr int kBits = 11;
  constexpr std::uint32_t kMask = (1u << kBits) - 1;
  std::vector<std::uint32_t> tmp(keys.size());
  for (int shift = 0; shift < 32; shift += kBits) {
    std::array<std::size_t, kMask + 1> count{};
    for (std::uint32_t k : keys) ++count[(k >> shift) & kMask];
    if (std::any_of(count.begin(), count.end(), [&](std::size_t c) { return c == keys.size(); })) continue;
    std::size_t sum = 0;
    for (auto& c : count) {
      const std::size_t v = c;
      c = sum;
      sum += v;
    }
    for (std::uint32_t k : keys) tmp[count[(k >> shift) & kMask]++] = k;
    keys.swap(tmp);
  }
}

}  // namespace

PointCloud::PointCloud(std::size_t dims, std::size_t size) : columns_(dims, std::vector<double>(size)) {}

PointCloud PointCloud::from_columns(std::vector<std::vector<double>> columns) {
  for (const auto& c : columns) {
    if (c.size() != columns.front().size()) {
      throw Error(ErrorCode::dimension_mismatch, "point cloud columns differ in length");
    }
  }
  PointCloud p;
  p.columns_ = std::move(columns);
  return p;
}

CellCounts CellCounts::from_keys(std::vector<std::uint32_t> keys) {
  radix_sort(keys);
  CellCounts out;
  out.total_ = keys.size();
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i + 1;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    out.keys_.push_back(keys[i]);
    out.counts_.push_back(j - i);
    i = j;
  }
  return out;
}

CellCounts CellCounts::merge(const CellCounts& a, const CellCounts& b) {
  CellCounts out;
  out.total_ = a.total_ + b.total_;
  out.keys_.reserve(a.occupied() + b.occupied());
  out.counts_.reserve(a.occupied() + b.occupied());
  std::size_t i = 0, j = 0;
  while (i < a.occupied() || j < b.occupied()) {
    if (j == b.occupied() || (i < a.occupied() && a.keys_[i] < b.keys_[j])) {
      out.keys_.push_back(a.keys_[i]);
      out.counts_.push_back(a.counts_[i++]);
    } else if (i == a.occupied() || b.keys_[j] < a.keys_[i]) {
      out.keys_.push_back(b.keys_[j]);
      out.counts_.push_back(b.counts_[j++]);
    } else {
      out.keys_.push_back(a.keys_[i]);
      out.counts_.push_back(a.counts_[i++] + b.counts_[j++]);
    }
  }
  return out;
}

double CellCounts::plugin_entropy_bits() const {
  if (total_ == 0) return 0.0;
  double s = 0.0;
  for (std::uint64_t c : counts_) {
    const double cd = static_cast<double>(c);
    s += cd * std::log2(cd);
  }
  const double n = static_cast<double>(total_);
  return std::log2(n) - s / n;
}

double BinGrid::log2_cell_volume() const {
  double v = 0.0;
  for (std::size_t j = 0; j < lo.size(); ++j) v += std::log2(width(j));
  return v;
}

BinGrid make_grid(const PointCloud& points, std::uint32_t bins_per_dim) {
  const std::size_t d = points.dims();
  if (d < 1 || d > 3) {
    throw Error(ErrorCode::unsupported_dimension, "histogram entropy supports 1 to 3 dimensions, got " +
                                                      std::to_string(d));
  }
  if (points.size() == 0) throw Error(ErrorCode::empty_sample_set, "no samples");
  if (bins_per_dim < 2) throw Error(ErrorCode::invalid_settings, "need at least 2 bins per dimension");
  BinGrid g;
  g.bins = bins_per_dim;
  const auto& k = kernels::active();
  for (std::size_t j = 0; j < d; ++j) {
    const kernels::MinMax mm = k.min_max(points.column(j));
    if (!std::isfinite(mm.lo) || !std::isfinite(mm.hi)) {
      throw Error(ErrorCode::non_finite, "sample column " + std::to_string(j) + " is not finite");
    }
    if (!(mm.hi > mm.lo)) {
      throw Error(ErrorCode::degenerate_range, "all samples identical in dimension " + std::to_string(j));
    }
    g.lo.push_back(mm.lo);
    g.hi.push_back(mm.hi);
  }
  return g;
}

CellCounts count_cells(const PointCloud& points, const BinGrid& grid, unsigned threads) {
  const std::size_t n = points.size();
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<CellCounts> parts(chunks);
  const auto& k = kernels::active();
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    const std::size_t m = std::min(kChunk, n - begin);
    std::vector<std::uint32_t> keys(m, 0);
    for (std::size_t j = 0; j < points.dims(); ++j) {
      k.accumulate_bins(points.column(j).subspan(begin, m), grid.lo[j], grid.bins / (grid.hi[j] - grid.lo[j]),
                        grid.bins, keys);
    }
    parts[c] = CellCounts::from_keys(std::move(keys));
  });
  // Pairwise merge in a fixed tree so the result is independent of threads.
  while (parts.size() > 1) {
    std::vector<CellCounts> next((parts.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = 2 * i + 1 < parts.size() ? CellCounts::merge(parts[2 * i], parts[2 * i + 1]) : std::move(parts[2 * i]);
    }
    parts.swap(next);
  }
  return parts.empty() ? CellCounts{} : std::move(parts.front());
}

namespace {

EntropyEstimate finish(const PointCloud& points, const BinGrid& grid, const CellCounts& cells) {
  EntropyEstimate e;
  e.bits = cells.plugin_entropy_bits() + grid.log2_cell_volume();
  e.bins_per_dim = grid.bins;
  e.occupied_bins = cells.occupied();
  e.samples = points.size();
  e.undersampled = static_cast<double>(points.size()) <
                   10.0 * std::pow(static_cast<double>(grid.bins), static_cast<double>(points.dims()));
  return e;
}

}  // namespace

EntropyEstimate estimate_entropy_histogram(const PointCloud& points, std::uint32_t bins_per_dim, unsigned threads) {
  const BinGrid grid = make_grid(points, bins_per_dim);
  return finish(points, grid, count_cells(points, grid, threads));
}

std::vector<std::uint32_t> bin_ladder(std::size_t dims, std::size_t samples) {
  // Largest count whose cell keys fit in 32 bits, and no more bins than samples.
  std::uint64_t cap = dims == 1 ? 0xFFFFFFFFull : (dims == 2 ? 65535 : 1625);
  cap = std::max<std::uint64_t>(2, std::min<std::uint64_t>(cap, samples));
  std::vector<std::uint32_t> ladder;
  for (std::uint64_t b = 2; b <= std::min<std::uint64_t>(cap, 64); ++b) ladder.push_back(static_cast<std::uint32_t>(b));
  for (double b = 64.0 * 1.04; b <= static_cast<double>(cap); b *= 1.04) {
    const auto v = static_cast<std::uint32_t>(std::ceil(b));
    if (v > ladder.back()) ladder.push_back(v);
  }
  return ladder;
}

EntropyEstimate estimate_entropy_auto(const PointCloud& points, double target_occupancy, unsigned threads) {
  if (!(target_occupancy >= 1.0)) throw Error(ErrorCode::invalid_settings, "target occupancy must be >= 1");
  const std::vector<std::uint32_t> ladder = bin_ladder(points.dims(), points.size());
  BinGrid grid = make_grid(points, 2);
  const double n = static_cast<double>(points.size());

  // Occupancy falls (almost) monotonically with the bin count: binary search
  // for the finest ladder entry that still meets the target.
  std::size_t lo = 0, hi = ladder.size();
  CellCounts best_cells = count_cells(points, grid, threads);
  std::uint32_t best_bins = 2;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    grid.bins = ladder[mid];
    CellCounts cells = count_cells(points, grid, threads);
    if (n / static_cast<double>(cells.occupied()) >= target_occupancy) {
      lo = mid;
      best_cells = std::move(cells);
      best_bins = ladder[mid];
    } else {
      hi = mid;
    }
  }
  grid.bins = best_bins;
  return finish(points, grid, best_cells);
}

}  // namespace splitrx
