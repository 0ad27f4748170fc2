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

#ifndef PATHPAINTER_TESTS__FIXTURES_HPP_
#define PATHPAINTER_TESTS__FIXTURES_HPP_

// Synthetic on-disk scenes shared by the CLI tests and the acceptance runner.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "pathpainter/bev_map.hpp"
#include "pathpainter/generation_client.hpp"
#include "pathpainter/image.hpp"
#include "pathpainter/traversability.hpp"
#include "test_support.hpp"

namespace fixtures
{

namespace fs = std::filesystem;
using pathpainter::PixelCoord;
using pathpainter::WorldCoord;

/// 512x512 map at 0.5 m/px with an L-shaped road network: an east-west road
/// on rows 100..130 and a north-south road on columns 380..410.
struct RoadScene
{
  fs::path map_png;
  fs::path map_pgw;
  fs::path gt_png;
  fs::path goal_png;  // map + start star + goal star, as a goal backend would answer
  pathpainter::BevMap map{pathpainter::RgbImage(1, 1), pathpainter::Affine{1, 0, 0, 1, 0, 0}};
  pathpainter::TraversabilityMask gt;
  PixelCoord start_px{40, 115};
  PixelCoord goal_px{395, 440};
  WorldCoord start_w;
  WorldCoord goal_w;
};

inline RoadScene make_road_scene(const fs::path & dir)
{
  using namespace pathpainter;
  RoadScene s;
  s.gt = TraversabilityMask(512, 512, false);
  for (int r = 100; r <= 130; ++r)
    for (int c = 20; c <= 491; ++c) s.gt.set(c, r, true);
  for (int r = 100; r <= 470; ++r)
    for (int c = 380; c <= 410; ++c) s.gt.set(c, r, true);

  RgbImage raster = test_support::gray_raster(512, 512);
  for (int r = 0; r < 512; ++r)
    for (int c = 0; c < 512; ++c)
      if (s.gt.at(c, r)) raster.set(c, r, Rgb{180, 175, 170});

  const Affine affine{0.5, 0.0, 0.0, -0.5, 0.0, 256.0};
  s.map = BevMap(raster, affine);
  s.start_w = s.map.pixel_to_world(s.start_px);
  s.goal_w = s.map.pixel_to_world(s.goal_px);

  s.map_png = dir / "map.png";
  s.map_pgw = dir / "map.pgw";
  s.gt_png = dir / "gt.png";
  s.goal_png = dir / "goal.png";
  write_file_atomic(s.map_png, encode_png(raster));
  write_text_atomic(s.map_pgw, format_world_file(affine));
  write_file_atomic(s.gt_png, encode_mask_png(s.gt));
  const RgbImage with_start = annotate_start(s.map, s.start_px);
  const RgbImage with_goal = annotate_start(BevMap(with_start, affine), s.goal_px);
  write_file_atomic(s.goal_png, encode_png(with_goal));
  return s;
}

inline nlohmann::json oracle_config(const RoadScene & s)
{
  return nlohmann::json{
    {"map_image", s.map_png.string()},
    {"map_worldfile", s.map_pgw.string()},
    {"backend", "oracle"},
    {"oracle_mask", s.gt_png.string()},
    {"oracle_goal", s.goal_png.string()},
  };
}

inline fs::path write_config(const fs::path & path, const nlohmann::json & doc)
{
  pathpainter::write_text_atomic(path, doc.dump(2));
  return path;
}

inline std::string read_text(const fs::path & path)
{
  const auto bytes = pathpainter::read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace fixtures

#endif  // PATHPAINTER_TESTS__FIXTURES_HPP_
