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

#ifndef PATHPAINTER__CLI_HPP_
#define PATHPAINTER__CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pathpainter/benchmark.hpp"
#include "pathpainter/executor_bridge.hpp"
#include "pathpainter/generation_client.hpp"
#include "pathpainter/planner.hpp"
#include "pathpainter/traversability.hpp"

namespace pathpainter::cli
{

namespace exit_code
{
inline constexpr int kOk = 0;
inline constexpr int kInternal = 1;
inline constexpr int kInvalidConfig = 2;
inline constexpr int kBackendFailure = 3;
/// NoGoalFound (plan) or SamplingExhausted (bench-path).
inline constexpr int kNotFound = 4;
/// NoPath or InvalidEndpoint.
inline constexpr int kNoPath = 5;
inline constexpr int kSimFailure = 6;
}  // namespace exit_code

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Flat key-value run configuration. Relative paths resolve against the
/// directory of the config file.
struct RunConfig
{
  std::optional<std::filesystem::path> map_image;
  std::optional<std::filesystem::path> map_worldfile;
  std::optional<std::filesystem::path> mask_image;
  std::optional<std::filesystem::path> pred_mask;
  std::optional<std::filesystem::path> gt_mask;
  std::optional<std::filesystem::path> pred_dir;
  std::optional<std::filesystem::path> gt_dir;
  std::optional<std::filesystem::path> path_file;
  std::optional<std::filesystem::path> mask_prompt_file;
  std::optional<std::filesystem::path> goal_prompt_file;

  std::optional<BackendConfig> backend;

  ThresholdRule binarize_rule;
  int morph_radius{0};
  bool plan_on_skeleton{false};
  bool simplify{false};

  /// Unset lambda means 2.0 for planning and 0.0 for benchmarks.
  std::optional<double> lambda;
  double d_sat{5.0};
  double heuristic_weight{1.0};

  SimConfig sim;

  std::filesystem::path out_dir{"out"};
  std::uint64_t seed{0};
  std::size_t n{1000};
  std::optional<double> min_sep_px;
  unsigned parallel{1};
  int snap_radius{0};
  LengthMode length_mode{LengthMode::kStepCost};
  bool record_timing{false};
  std::string dataset;
  std::string method;

  std::optional<WorldCoord> start;
  std::optional<WorldCoord> goal;
  std::optional<std::string> prompt;

  CostParams planning_params() const;
  CostParams benchmark_params() const;
};

/// Rejects unknown keys and ill-typed values with ConfigError.
RunConfig parse_run_config(const nlohmann::json & doc, const std::filesystem::path & base_dir);
RunConfig load_run_config(const std::filesystem::path & path);
/// Every configured input path must exist.
void check_referenced_files(const RunConfig & config);

/// Path JSON: {"waypoints": [{"x", "y"}...], "cost", "length_m", "k"}, six
/// decimal places.
std::string path_to_json(const PathM & path);
/// Waypoints only; pixel_trace is left empty.
PathM path_from_json(const std::string & text);

int run_cli(const std::vector<std::string> & args);
int run_cli(int argc, char ** argv);

}  // namespace pathpainter::cli

#endif  // PATHPAINTER__CLI_HPP_
