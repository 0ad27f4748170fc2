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

#ifndef PATHPAINTER__BEV_MAP_HPP_
#define PATHPAINTER__BEV_MAP_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>

#include "pathpainter/geometry.hpp"
#include "pathpainter/image.hpp"

namespace pathpainter
{

class WorldFileError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class SingularAffineError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// ESRI world-file parameters. Field order follows the file (A, D, B, E, C, F):
///   x = a * col + b * row + c
///   y = d * col + e * row + f
struct Affine
{
  double a{1.0};
  double d{0.0};
  double b{0.0};
  double e{1.0};
  double c{0.0};
  double f{0.0};

  double determinant() const { return a * e - d * b; }
};

/// Parses the six numeric lines of a world file. Blank trailing lines are ignored.
Affine parse_world_file(const std::string & text);
std::string format_world_file(const Affine & affine);

/// Georeferenced BEV raster. Immutable once constructed.
class BevMap
{
public:
  /// Throws SingularAffineError when the affine cannot be inverted.
  BevMap(RgbImage raster, Affine affine);

  int width() const { return raster_.width(); }
  int height() const { return raster_.height(); }
  const Affine & affine() const { return affine_; }
  const RgbImage & raster() const { return raster_; }

  /// Ground sample distance along the column axis, meters per pixel.
  double meters_per_pixel() const;

  WorldCoord pixel_to_world(const PixelCoord & p) const;
  PixelCoord world_to_pixel(const WorldCoord & w) const;

  bool contains(const Cell & c) const { return raster_.contains(c.col, c.row); }

private:
  RgbImage raster_;
  Affine affine_;
  // Inverse linear part.
  double ia_, ib_, id_, ie_;
};

BevMap load_map(const std::filesystem::path & raster_path, const std::filesystem::path & worldfile_path);

}  // namespace pathpainter

#endif  // PATHPAINTER__BEV_MAP_HPP_
