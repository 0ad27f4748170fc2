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

#ifndef PATHPAINTER__BENCHMARK_HPP_
#define PATHPAINTER__BENCHMARK_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathpainter/planner.hpp"
#include "pathpainter/traversability.hpp"

namespace pathpainter
{

struct SegMetrics
{
  std::int64_t tp{0};
  std::int64_t fp{0};
  std::int64_t fn{0};
  double iou{0.0};
  double precision{0.0};
  double recall{0.0};
  double f1{0.0};
  // Set when the metric's denominator was empty; the value is then 0.
  bool iou_undefined{false};
  bool precision_undefined{false};
  bool recall_undefined{false};
  bool f1_undefined{false};
};

class DimensionMismatch : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

SegMetrics seg_metrics(const TraversabilityMask & pred, const TraversabilityMask & gt);

struct PairSample
{
  Cell start;
  Cell goal;
  /// Shortest lambda = 0 cost on the GT mask, in ticks and in pixels.
  std::int64_t gt_shortest_ticks{0};
  double gt_shortest_cost{0.0};
  /// Length (pixels) of the line-of-sight simplified GT path.
  double gt_polyline_px{0.0};
};

class SamplingExhausted : public std::runtime_error
{
public:
  SamplingExhausted(std::size_t achieved, std::size_t requested)
  : std::runtime_error(
      "sampled only " + std::to_string(achieved) + " of " + std::to_string(requested) + " start-goal pairs"),
    achieved_(achieved)
  {
  }
  std::size_t achieved() const { return achieved_; }

private:
  std::size_t achieved_;
};

/// Separation rule scaled from 100 px at 2048 px (longest side).
double default_min_separation(int width, int height);

/// Seeded rejection sampling of GT-connected pairs at least `min_sep_px`
/// apart. Gives up after 1000 * n rejections.
std::vector<PairSample> sample_pairs(
  const TraversabilityMask & gt, std::size_t n, double min_sep_px, std::uint64_t seed);

enum class LengthMode {
  /// Accumulated 1 / sqrt(2) step cost (lambda = 0) on both sides.
  kStepCost,
  /// Polyline length after line-of-sight simplification on both sides.
  kPolyline,
};

struct EvalOptions
{
  /// Planner parameters for the predicted mask. Lambda 0 by default.
  CostParams params{0.0, 5.0, 1.0};
  LengthMode length_mode{LengthMode::kStepCost};
  /// Endpoints missing from the predicted mask snap to the nearest
  /// predicted-traversable cell within this radius. 0 disables snapping.
  int snap_radius{0};
  bool record_timing{false};
};

struct PairRecord
{
  std::size_t index{0};
  Cell start;
  Cell goal;
  PlanStatus status{PlanStatus::kNoPath};
  bool success{false};
  double validity{0.0};
  double len_ratio{0.0};
  std::size_t path_cells{0};
  double plan_time_s{0.0};
};

PairRecord eval_pair(
  const TraversabilityMask & pred, const TraversabilityMask & gt, const PairSample & pair,
  const EvalOptions & options = {});

/// Evaluates every pair, optionally across `parallel` worker threads. The
/// returned records are ordered by pair index.
std::vector<PairRecord> eval_pairs(
  const TraversabilityMask & pred, const TraversabilityMask & gt, const std::vector<PairSample> & pairs,
  const EvalOptions & options, unsigned parallel = 1);

struct PathBenchResult
{
  double succ{0.0};
  /// Means over successful records; empty when there were none.
  std::optional<double> valid;
  std::optional<double> len_ratio;
  std::size_t n_samples{0};
  std::size_t n_success{0};
  double mean_plan_time_s{0.0};
};

/// Throws std::invalid_argument on an empty record list.
PathBenchResult aggregate(const std::vector<PairRecord> & records);

}  // namespace pathpainter

#endif  // PATHPAINTER__BENCHMARK_HPP_
