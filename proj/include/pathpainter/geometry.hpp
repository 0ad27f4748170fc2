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

#ifndef PATHPAINTER__GEOMETRY_HPP_
#define PATHPAINTER__GEOMETRY_HPP_

#include <cmath>
#include <cstddef>

namespace pathpainter
{

/// Raster position. Integer values are pixel centers; (0, 0) is the center of
/// the upper-left pixel, matching the world-file convention.
struct PixelCoord
{
  double col{0.0};
  double row{0.0};

  friend bool operator==(const PixelCoord &, const PixelCoord &) = default;
};

/// Metric position in the map frame.
struct WorldCoord
{
  double x{0.0};
  double y{0.0};

  friend bool operator==(const WorldCoord &, const WorldCoord &) = default;
};

/// Integer grid cell.
struct Cell
{
  int col{0};
  int row{0};

  friend bool operator==(const Cell &, const Cell &) = default;
};

inline Cell to_cell(const PixelCoord & p)
{
  return Cell{static_cast<int>(std::lround(p.col)), static_cast<int>(std::lround(p.row))};
}

inline PixelCoord to_pixel(const Cell & c)
{
  return PixelCoord{static_cast<double>(c.col), static_cast<double>(c.row)};
}

inline double distance(const WorldCoord & a, const WorldCoord & b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double distance(const PixelCoord & a, const PixelCoord & b)
{
  return std::hypot(a.col - b.col, a.row - b.row);
}

}  // namespace pathpainter

#endif  // PATHPAINTER__GEOMETRY_HPP_
