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

#ifndef PATHPAINTER__PLANNER_HPP_
#define PATHPAINTER__PLANNER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pathpainter/bev_map.hpp"
#include "pathpainter/geometry.hpp"
#include "pathpainter/traversability.hpp"

namespace pathpainter
{

/// Boundary-penalty parameters for the grid search. Connectivity is always 8.
struct CostParams
{
  double lambda{2.0};
  /// Distance (pixels) beyond which a cell carries no boundary penalty.
  double d_sat{5.0};
  double heuristic_weight{1.0};

  /// Throws std::invalid_argument on lambda < 0, d_sat <= 0 or a weight outside (0, 1].
  void validate() const;
};

/// Path costs are accumulated as integers: each edge cost is rounded up to a
/// multiple of 1 / kCostTicksPerUnit. Sums are therefore exact and independent
/// of summation order, which keeps equal-cost comparisons deterministic.
inline constexpr double kCostTicksPerUnit = 16777216.0;  // 2^24

/// Linear ramp max(0, (d_sat - d) / d_sat); 0 for an unbounded field.
double boundary_penalty(double distance, const CostParams & params);

/// Edge cost in ticks for a move of length `step` (1 or sqrt 2) into a cell at
/// boundary distance `distance`: ceil(step * (1 + lambda * penalty) * ticks).
std::int64_t edge_cost_ticks(double step, double distance, const CostParams & params);

struct PathM
{
  std::vector<WorldCoord> waypoints;
  std::vector<PixelCoord> pixel_trace;
  double cost{0.0};
  std::int64_t cost_ticks{0};
  double length_m{0.0};

  std::size_t k() const { return waypoints.size(); }
};

enum class PlanStatus { kOk, kNoPath, kInvalidEndpoint };

std::string to_string(PlanStatus status);

struct PlanResult
{
  PlanStatus status{PlanStatus::kNoPath};
  std::optional<PathM> path;
  std::string message;

  bool ok() const { return status == PlanStatus::kOk; }
};

/// A* over the 8-connected traversable grid with a boundary-distance penalty
/// evaluated at the destination cell of every edge. Returns a cost-optimal
/// path. Among equal f the larger g is expanded first, then the smaller row,
/// then the smaller column.
PlanResult plan_path(
  const TraversabilityMask & mask, const DistanceField & field, const BevMap & map, const PixelCoord & start,
  const PixelCoord & goal, const CostParams & params);

/// Same search without a georeference; waypoints equal pixel coordinates.
PlanResult plan_path(
  const TraversabilityMask & mask, const DistanceField & field, const PixelCoord & start, const PixelCoord & goal,
  const CostParams & params);

/// Cells touched by the segment between two cell centers, including both
/// neighbors when the segment passes exactly through a pixel corner.
std::vector<Cell> supercover_line(Cell a, Cell b);

bool line_of_sight(const TraversabilityMask & mask, Cell a, Cell b);

/// Greedy line-of-sight decimation. Endpoints are kept. The result is a
/// polyline: consecutive pixel_trace entries are no longer 8-adjacent. Cost
/// is carried over from the input; length_m is recomputed.
PathM simplify_path(const PathM & path, const TraversabilityMask & mask);

double polyline_length(const std::vector<WorldCoord> & points);

}  // namespace pathpainter

#endif  // PATHPAINTER__PLANNER_HPP_
