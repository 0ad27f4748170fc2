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

#include "pathpainter/bev_map.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace pathpainter
{

namespace
{

std::string trim(const std::string & s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

Affine parse_world_file(const std::string & text)
{
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(trim(line));
  }
  while (!lines.empty() && lines.back().empty()) {
    lines.pop_back();
  }
  if (lines.size() != 6) {
    throw WorldFileError("world file must contain exactly 6 numeric lines, found " + std::to_string(lines.size()));
  }
  double v[6];
  for (std::size_t i = 0; i < 6; ++i) {
    const auto & s = lines[i];
    const char * begin = s.data();
    const char * end = s.data() + s.size();
    if (!s.empty() && *begin == '+') {
      ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, v[i]);
    if (ec != std::errc() || ptr != end || !std::isfinite(v[i])) {
      throw WorldFileError("world file line " + std::to_string(i + 1) + " is not a number: '" + s + "'");
    }
  }
  return Affine{v[0], v[1], v[2], v[3], v[4], v[5]};
}

std::string format_world_file(const Affine & affine)
{
  std::string out;
  char buf[64];
  for (double v : {affine.a, affine.d, affine.b, affine.e, affine.c, affine.f}) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out += buf;
  }
  return out;
}

BevMap::BevMap(RgbImage raster, Affine affine) : raster_(std::move(raster)), affine_(affine)
{
  if (raster_.empty()) {
    throw std::invalid_argument("map raster is empty");
  }
  const double det = affine_.determinant();
  if (det == 0.0 || !std::isfinite(det)) {
    throw SingularAffineError("world-file affine is singular (A*E - D*B = 0)");
  }
  ia_ = affine_.e / det;
  ib_ = -affine_.b / det;
  id_ = -affine_.d / det;
  ie_ = affine_.a / det;
}

double BevMap::meters_per_pixel() const
{
  return std::hypot(affine_.a, affine_.d);
}

WorldCoord BevMap::pixel_to_world(const PixelCoord & p) const
{
  return WorldCoord{
    affine_.a * p.col + affine_.b * p.row + affine_.c, affine_.d * p.col + affine_.e * p.row + affine_.f};
}

PixelCoord BevMap::world_to_pixel(const WorldCoord & w) const
{
  const double dx = w.x - affine_.c;
  const double dy = w.y - affine_.f;
  return PixelCoord{ia_ * dx + ib_ * dy, id_ * dx + ie_ * dy};
}

BevMap load_map(const std::filesystem::path & raster_path, const std::filesystem::path & worldfile_path)
{
  const auto wf_bytes = read_file_bytes(worldfile_path);
  const Affine affine = parse_world_file(std::string(wf_bytes.begin(), wf_bytes.end()));
  return BevMap(read_image(raster_path), affine);
}

}  // namespace pathpainter
