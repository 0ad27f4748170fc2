// Copyright 2026 The PathPainter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PATHPAINTER__TRAVERSABILITY_HPP_
#define PATHPAINTER__TRAVERSABILITY_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "pathpainter/geometry.hpp"
#include "pathpainter/image.hpp"

namespace pathpainter
{

/// Binary grid, row-major, true = traversable.
class TraversabilityMask
{
public:
  TraversabilityMask() = default;
  TraversabilityMask(int width, int height, bool fill = false);
  TraversabilityMask(int width, int height, std::vector<std::uint8_t> cells);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return cells_.size(); }
  bool contains(const Cell & c) const { return c.col >= 0 && c.row >= 0 && c.col < width_ && c.row < height_; }

  bool at(int col, int row) const { return cells_[index(col, row)] != 0; }
  bool at(const Cell & c) const { return at(c.col, c.row); }
  void set(int col, int row, bool value) { cells_[index(col, row)] = value ? 1 : 0; }

  std::size_t index(int col, int row) const { return static_cast<std::size_t>(row) * width_ + col; }
  Cell cell(std::size_t index) const
  {
    return Cell{static_cast<int>(index % width_), static_cast<int>(index / width_)};
  }

  std::span<const std::uint8_t> cells() const { return cells_; }
  std::size_t count() const;

  friend bool operator==(const TraversabilityMask &, const TraversabilityMask &) = default;

private:
  int width_{0};
  int height_{0};
  std::vector<std::uint8_t> cells_;
};

/// Per-cell Euclidean distance (pixels) to the nearest non-traversable cell.
/// When the mask has no non-traversable cell the field is unbounded: every
/// distance is +inf and the planner applies no boundary penalty.
class DistanceField
{
public:
  static constexpr std::int64_t kInfSquared = std::numeric_limits<std::int64_t>::max();

  DistanceField(int width, int height, std::vector<std::int64_t> squared);

  int width() const { return width_; }
  int height() const { return height_; }
  bool unbounded() const { return unbounded_; }

  double at(int col, int row) const { return dist_[static_cast<std::size_t>(row) * width_ + col]; }
  double at(std::size_t index) const { return dist_[index]; }
  /// Exact squared distance; kInfSquared when unbounded.
  std::int64_t squared_at(int col, int row) const { return squared_[static_cast<std::size_t>(row) * width_ + col]; }

private:
  int width_;
  int height_;
  bool unbounded_{false};
  std::vector<std::int64_t> squared_;
  std::vector<double> dist_;
};

struct ThresholdRule
{
  enum class Kind { kLuminance, kMinChannel };

  Kind kind{Kind::kLuminance};
  double threshold{128.0};

  /// luminance = 0.299 R + 0.587 G + 0.114 B >= threshold
  static ThresholdRule luminance(double threshold = 128.0) { return {Kind::kLuminance, threshold}; }
  /// min(R, G, B) >= threshold ("white-ish")
  static ThresholdRule min_channel(double threshold = 200.0) { return {Kind::kMinChannel, threshold}; }

  bool operator()(Rgb px) const;
};

TraversabilityMask binarize(const RgbImage & image, const ThresholdRule & rule = {});

/// Exact EDT using the separable two-pass lower-envelope algorithm on squared
/// integer distances.
DistanceField distance_transform(const TraversabilityMask & mask);

TraversabilityMask erode(const TraversabilityMask & mask, int radius);
TraversabilityMask dilate(const TraversabilityMask & mask, int radius);
/// Opening followed by closing with a discrete disk (dx^2 + dy^2 <= r^2).
/// Cells outside the grid are ignored by the structuring element.
TraversabilityMask morph_open_close(const TraversabilityMask & mask, int radius);

/// 8-connected component labels. Non-traversable cells get -1.
struct ComponentLabels
{
  std::vector<int> labels;
  std::vector<std::size_t> sizes;

  int count() const { return static_cast<int>(sizes.size()); }
};

ComponentLabels label_components(const TraversabilityMask & mask);

/// Throws std::out_of_range when either endpoint lies outside the grid.
bool connected(const TraversabilityMask & mask, const PixelCoord & a, const PixelCoord & b);

/// Zhang-Suen thinning. Candidates of each sub-iteration are collected in
/// parallel and then removed in raster order, re-testing each candidate
/// against the partially thinned image, so two-pixel-thick parts cannot
/// vanish and 8-connected component count is preserved.
TraversabilityMask skeletonize(const TraversabilityMask & mask);

/// Nearest-neighbor resample, used to bind off-size masks to a map.
TraversabilityMask resize_nearest(const TraversabilityMask & mask, int width, int height);

/// 0 = non-traversable, 255 = traversable.
std::vector<std::uint8_t> encode_mask_png(const TraversabilityMask & mask);
TraversabilityMask read_mask(const std::filesystem::path & path, const ThresholdRule & rule = {});

}  // namespace pathpainter

#endif  // PATHPAINTER__TRAVERSABILITY_HPP_
