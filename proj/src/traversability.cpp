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

#include "pathpainter/traversability.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace pathpainter
{

TraversabilityMask::TraversabilityMask(int width, int height, bool fill)
: width_(width), height_(height), cells_(static_cast<std::size_t>(width) * height, fill ? 1 : 0)
{
  if (width < 0 || height < 0) {
    throw std::invalid_argument("mask dimensions must be non-negative");
  }
}

TraversabilityMask::TraversabilityMask(int width, int height, std::vector<std::uint8_t> cells)
: width_(width), height_(height), cells_(std::move(cells))
{
  if (width < 0 || height < 0 || cells_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("mask cell count does not match dimensions");
  }
  for (auto & c : cells_) {
    c = c ? 1 : 0;
  }
}

std::size_t TraversabilityMask::count() const
{
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

DistanceField::DistanceField(int width, int height, std::vector<std::int64_t> squared)
: width_(width), height_(height), squared_(std::move(squared))
{
  dist_.resize(squared_.size());
  unbounded_ = !squared_.empty();
  for (std::size_t i = 0; i < squared_.size(); ++i) {
    if (squared_[i] == kInfSquared) {
      dist_[i] = std::numeric_limits<double>::infinity();
    } else {
      unbounded_ = false;
      dist_[i] = std::sqrt(static_cast<double>(squared_[i]));
    }
  }
}

bool ThresholdRule::operator()(Rgb px) const
{
  switch (kind) {
    case Kind::kLuminance:
      return 0.299 * px.r + 0.587 * px.g + 0.114 * px.b >= threshold;
    case Kind::kMinChannel:
      return std::min({px.r, px.g, px.b}) >= threshold;
  }
  return false;
}

TraversabilityMask binarize(const RgbImage & image, const ThresholdRule & rule)
{
  if (image.empty()) {
    throw std::invalid_argument("cannot binarize an empty image");
  }
  TraversabilityMask mask(image.width(), image.height());
  for (int r = 0; r < image.height(); ++r) {
    for (int c = 0; c < image.width(); ++c) {
      mask.set(c, r, rule(image.at(c, r)));
    }
  }
  return mask;
}

namespace
{

// p / q with q > 0, or -infinity.
struct Fraction
{
  std::int64_t num;
  std::int64_t den;
  bool neg_inf{false};
};

bool less_equal(const Fraction & a, const Fraction & b)
{
  if (a.neg_inf) {
    return true;
  }
  if (b.neg_inf) {
    return false;
  }
  return static_cast<__int128>(a.num) * b.den <= static_cast<__int128>(b.num) * a.den;
}

bool less_than_int(const Fraction & a, std::int64_t x)
{
  return a.neg_inf || a.num < x * a.den;
}

// Lower envelope of parabolas f[q] + (x - q)^2 over the finite sites.
void envelope_1d(std::span<const std::int64_t> f, std::span<std::int64_t> out)
{
  const auto n = static_cast<std::int64_t>(f.size());
  std::vector<std::int64_t> sites;
  std::vector<Fraction> bounds;
  sites.reserve(f.size());
  bounds.reserve(f.size());
  for (std::int64_t q = 0; q < n; ++q) {
    if (f[q] == DistanceField::kInfSquared) {
      continue;
    }
    while (!sites.empty()) {
      const std::int64_t v = sites.back();
      const Fraction s{(f[q] + q * q) - (f[v] + v * v), 2 * (q - v)};
      if (less_equal(s, bounds.back())) {
        sites.pop_back();
        bounds.pop_back();
      } else {
        bounds.push_back(s);
        break;
      }
    }
    if (sites.empty()) {
      bounds.push_back(Fraction{0, 1, true});
    }
    sites.push_back(q);
  }
  if (sites.empty()) {
    std::fill(out.begin(), out.end(), DistanceField::kInfSquared);
    return;
  }
  std::size_t k = 0;
  for (std::int64_t x = 0; x < n; ++x) {
    while (k + 1 < sites.size() && less_than_int(bounds[k + 1], x)) {
      ++k;
    }
    const std::int64_t d = x - sites[k];
    out[x] = f[sites[k]] + d * d;
  }
}

}  // namespace

DistanceField distance_transform(const TraversabilityMask & mask)
{
  const int w = mask.width();
  const int h = mask.height();
  const auto inf = DistanceField::kInfSquared;
  std::vector<std::int64_t> column_pass(mask.size(), inf);

  // Vertical pass: squared distance to the nearest blocked cell in the column.
  for (int c = 0; c < w; ++c) {
    std::int64_t last = -1;
    for (int r = 0; r < h; ++r) {
      if (!mask.at(c, r)) {
        last = r;
        column_pass[mask.index(c, r)] = 0;
      } else if (last >= 0) {
        const std::int64_t d = r - last;
        column_pass[mask.index(c, r)] = d * d;
      }
    }
    last = -1;
    for (int r = h - 1; r >= 0; --r) {
      if (!mask.at(c, r)) {
        last = r;
      } else if (last >= 0) {
        const std::int64_t d = last - r;
        auto & v = column_pass[mask.index(c, r)];
        v = std::min(v, d * d);
      }
    }
  }

  std::vector<std::int64_t> squared(mask.size(), inf);
  std::vector<std::int64_t> row_out(static_cast<std::size_t>(w));
  for (int r = 0; r < h; ++r) {
    std::span<const std::int64_t> row_in(column_pass.data() + static_cast<std::size_t>(r) * w, w);
    envelope_1d(row_in, row_out);
    std::copy(row_out.begin(), row_out.end(), squared.begin() + static_cast<std::ptrdiff_t>(r) * w);
  }
  return DistanceField(w, h, std::move(squared));
}

namespace
{

std::vector<Cell> disk_offsets(int radius)
{
  std::vector<Cell> out;
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      if (dc * dc + dr * dr <= radius * radius) {
        out.push_back(Cell{dc, dr});
      }
    }
  }
  return out;
}

}  // namespace

TraversabilityMask erode(const TraversabilityMask & mask, int radius)
{
  if (radius < 0) {
    throw std::invalid_argument("morphology radius must be >= 0");
  }
  const auto offsets = disk_offsets(radius);
  TraversabilityMask out(mask.width(), mask.height());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.at(c, r)) {
        continue;
      }
      bool keep = true;
      for (const auto & o : offsets) {
        const Cell n{c + o.col, r + o.row};
        if (mask.contains(n) && !mask.at(n)) {
          keep = false;
          break;
        }
      }
      out.set(c, r, keep);
    }
  }
  return out;
}

TraversabilityMask dilate(const TraversabilityMask & mask, int radius)
{
  if (radius < 0) {
    throw std::invalid_argument("morphology radius must be >= 0");
  }
  const auto offsets = disk_offsets(radius);
  TraversabilityMask out(mask.width(), mask.height());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.at(c, r)) {
        continue;
      }
      for (const auto & o : offsets) {
        const Cell n{c + o.col, r + o.row};
        if (mask.contains(n)) {
          out.set(n.col, n.row, true);
        }
      }
    }
  }
  return out;
}

TraversabilityMask morph_open_close(const TraversabilityMask & mask, int radius)
{
  if (radius < 0) {
    throw std::invalid_argument("morphology radius must be >= 0");
  }
  if (radius == 0) {
    return mask;
  }
  const auto opened = dilate(erode(mask, radius), radius);
  return erode(dilate(opened, radius), radius);
}

ComponentLabels label_components(const TraversabilityMask & mask)
{
  ComponentLabels out;
  out.labels.assign(mask.size(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < mask.size(); ++seed) {
    if (!mask.cells()[seed] || out.labels[seed] >= 0) {
      continue;
    }
    const int label = out.count();
    std::size_t size = 0;
    out.labels[seed] = label;
    stack.push_back(seed);
    while (!stack.empty()) {
      const Cell c = mask.cell(stack.back());
      stack.pop_back();
      ++size;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const Cell n{c.col + dc, c.row + dr};
          if ((dc == 0 && dr == 0) || !mask.contains(n) || !mask.at(n)) {
            continue;
          }
          const auto ni = mask.index(n.col, n.row);
          if (out.labels[ni] < 0) {
            out.labels[ni] = label;
            stack.push_back(ni);
          }
        }
      }
    }
    out.sizes.push_back(size);
  }
  return out;
}

bool connected(const TraversabilityMask & mask, const PixelCoord & a, const PixelCoord & b)
{
  const Cell ca = to_cell(a);
  const Cell cb = to_cell(b);
  if (!mask.contains(ca) || !mask.contains(cb)) {
    throw std::out_of_range("connectivity query outside the mask");
  }
  if (!mask.at(ca) || !mask.at(cb)) {
    return false;
  }
  if (ca == cb) {
    return true;
  }
  // Breadth-first flood from a, stopping early at b.
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::deque<Cell> queue{ca};
  seen[mask.index(ca.col, ca.row)] = 1;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const Cell n{c.col + dc, c.row + dr};
        if (!mask.contains(n) || !mask.at(n)) {
          continue;
        }
        auto & s = seen[mask.index(n.col, n.row)];
        if (s) {
          continue;
        }
        if (n == cb) {
          return true;
        }
        s = 1;
        queue.push_back(n);
      }
    }
  }
  return false;
}

namespace
{

struct Neighborhood
{
  // P2..P9 clockwise from north.
  int p[8];

  int count() const { return std::accumulate(std::begin(p), std::end(p), 0); }

  int transitions() const
  {
    int a = 0;
    for (int i = 0; i < 8; ++i) {
      if (p[i] == 0 && p[(i + 1) % 8] == 1) {
        ++a;
      }
    }
    return a;
  }
};

Neighborhood neighborhood(const TraversabilityMask & m, int c, int r)
{
  static constexpr int kDc[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  static constexpr int kDr[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
  Neighborhood n{};
  for (int i = 0; i < 8; ++i) {
    const Cell q{c + kDc[i], r + kDr[i]};
    n.p[i] = m.contains(q) && m.at(q) ? 1 : 0;
  }
  return n;
}

bool removable(const TraversabilityMask & m, int c, int r, int pass)
{
  if (!m.at(c, r)) {
    return false;
  }
  const auto n = neighborhood(m, c, r);
  const int b = n.count();
  if (b < 2 || b > 6 || n.transitions() != 1) {
    return false;
  }
  const int p2 = n.p[0];
  const int p4 = n.p[2];
  const int p6 = n.p[4];
  const int p8 = n.p[6];
  if (pass == 0) {
    return p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0;
  }
  return p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0;
}

}  // namespace

TraversabilityMask skeletonize(const TraversabilityMask & mask)
{
  TraversabilityMask out = mask;
  std::vector<Cell> candidates;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      candidates.clear();
      for (int r = 0; r < out.height(); ++r) {
        for (int c = 0; c < out.width(); ++c) {
          if (removable(out, c, r, pass)) {
            candidates.push_back(Cell{c, r});
          }
        }
      }
      for (const auto & cand : candidates) {
        if (removable(out, cand.col, cand.row, pass)) {
          out.set(cand.col, cand.row, false);
          changed = true;
        }
      }
    }
  }
  return out;
}

TraversabilityMask resize_nearest(const TraversabilityMask & mask, int width, int height)
{
  if (width <= 0 || height <= 0 || mask.width() <= 0 || mask.height() <= 0) {
    throw std::invalid_argument("resize requires non-empty source and target");
  }
  if (width == mask.width() && height == mask.height()) {
    return mask;
  }
  TraversabilityMask out(width, height);
  for (int r = 0; r < height; ++r) {
    const int sr = std::min(mask.height() - 1, static_cast<int>((r + 0.5) * mask.height() / height));
    for (int c = 0; c < width; ++c) {
      const int sc = std::min(mask.width() - 1, static_cast<int>((c + 0.5) * mask.width() / width));
      out.set(c, r, mask.at(sc, sr));
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_mask_png(const TraversabilityMask & mask)
{
  std::vector<std::uint8_t> gray(mask.size());
  std::transform(mask.cells().begin(), mask.cells().end(), gray.begin(), [](std::uint8_t v) {
    return static_cast<std::uint8_t>(v ? 255 : 0);
  });
  return encode_gray_png(mask.width(), mask.height(), gray);
}

TraversabilityMask read_mask(const std::filesystem::path & path, const ThresholdRule & rule)
{
  return binarize(read_image(path), rule);
}

}  // namespace pathpainter
