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

#ifndef PATHPAINTER__GENERATION_CLIENT_HPP_
#define PATHPAINTER__GENERATION_CLIENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathpainter/bev_map.hpp"
#include "pathpainter/geometry.hpp"
#include "pathpainter/image.hpp"

namespace pathpainter
{

enum class GenerationTask { kMask, kGoal };

std::string to_string(GenerationTask task);
GenerationTask parse_generation_task(const std::string & text);

struct GenerationRequest
{
  std::vector<std::uint8_t> map_png;
  std::string prompt;
  GenerationTask task{GenerationTask::kMask};

  /// Throws std::invalid_argument if the image does not decode or a goal
  /// request carries an empty prompt.
  void validate() const;
};

struct GenerationResponse
{
  std::vector<std::uint8_t> image_png;
  std::string backend_id;
  double latency_s{0.0};
};

enum class BackendKind { kReplay, kHttp, kOracle };

std::string to_string(BackendKind kind);
BackendKind parse_backend_kind(const std::string & text);

struct BackendConfig
{
  BackendKind kind{BackendKind::kOracle};
  std::string endpoint_url;  // http
  std::filesystem::path replay_dir;  // replay
  std::filesystem::path oracle_mask;  // oracle, mask task
  std::filesystem::path oracle_goal;  // oracle, goal task
  double timeout_s{120.0};
  /// Sent as "Authorization: Bearer <token>" by the http backend.
  std::optional<std::string> bearer_token;

  void validate() const;
};

class FetchError : public std::runtime_error
{
public:
  enum class Kind {
    kInvalidConfig,
    kReplayMiss,
    kOracleUnavailable,
    kHttpTimeout,
    kHttpConnection,
    kHttpStatus,
    kUndecodableBody,
  };

  FetchError(Kind kind, const std::string & message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

std::string to_string(FetchError::Kind kind);

class NoGoalFound : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Star marker geometry shared by start annotation and overlays.
struct StarMarker
{
  double outer_radius{12.0};
  double inner_radius{5.0};
  Rgb color{0, 255, 0};
};

/// Draws a filled five-pointed star (point up) centered on the nearest cell.
void draw_star(RgbImage & image, const PixelCoord & center, const StarMarker & star = {});

/// Copy of the map raster with the start marked by a green star.
/// Throws std::out_of_range when start lies outside the map.
RgbImage annotate_start(const BevMap & map, const PixelCoord & start);

struct GoalExtractionParams
{
  int diff_threshold{40};
  double start_exclusion_px{30.0};
  std::size_t min_blob_px{10};
};

/// Centroid of the largest 8-connected blob of changed pixels, ignoring the
/// neighborhood of the start marker. Throws NoGoalFound.
PixelCoord extract_goal(
  const RgbImage & result, const RgbImage & original, const PixelCoord & start,
  const GoalExtractionParams & params = {});

/// Hex SHA-256 used as the replay file stem. Each field (task, prompt, image
/// bytes) is hashed as an 8-byte little-endian length followed by its bytes.
std::string request_digest(const GenerationRequest & request);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(const std::string & text);

/// JSON body for the http backend: {"task", "prompt", "image_b64"}.
std::string encode_http_request(const GenerationRequest & request);

GenerationResponse fetch(const BackendConfig & config, const GenerationRequest & request);

}  // namespace pathpainter

#endif  // PATHPAINTER__GENERATION_CLIENT_HPP_
