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

#include "pathpainter/planner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace pathpainter
{

void CostParams::validate() const
{
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and >= 0");
  }
  if (!(d_sat > 0.0) || !std::isfinite(d_sat)) {
    throw std::invalid_argument("d_sat must be finite and > 0");
  }
  if (!(heuristic_weight > 0.0 && heuristic_weight <= 1.0)) {
    throw std::invalid_argument("heuristic_weight must lie in (0, 1]");
  }
}

double boundary_penalty(double distance, const CostParams & params)
{
  if (!std::isfinite(distance)) {
    return 0.0;
  }
  return std::max(0.0, (params.d_sat - distance) / params.d_sat);
}

std::int64_t edge_cost_ticks(double step, double distance, const CostParams & params)
{
  const double multiplier = 1.0 + params.lambda * boundary_penalty(distance, params);
  return static_cast<std::int64_t>(std::ceil(step * multiplier * kCostTicksPerUnit));
}

std::string to_string(PlanStatus status)
{
  switch (status) {
    case PlanStatus::kOk:
      return "ok";
    case PlanStatus::kNoPath:
      return "no_path";
    case PlanStatus::kInvalidEndpoint:
      return "invalid_endpoint";
  }
  return "unknown";
}

double polyline_length(const std::vector<WorldCoord> & points)
{
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    total += distance(points[i - 1], points[i]);
  }
  return total;
}

namespace
{

struct OpenEntry
{
  std::int64_t f;
  std::int64_t g;
  std::size_t index;  // row-major, so index order is (row, col) order
};

// Priority: smallest f, then largest g, then smallest (row, col).
struct OpenEntryAfter
{
  bool operator()(const OpenEntry & a, const OpenEntry & b) const
  {
    if (a.f != b.f) {
      return a.f > b.f;
    }
    if (a.g != b.g) {
      return a.g < b.g;
    }
    return a.index > b.index;
  }
};

std::int64_t heuristic_ticks(Cell a, Cell b, double weight)
{
  const double euclid = std::hypot(static_cast<double>(a.col - b.col), static_cast<double>(a.row - b.row));
  // One tick of slack absorbs floating error so the bound stays admissible.
  const auto h = static_cast<std::int64_t>(std::floor(weight * euclid * kCostTicksPerUnit)) - 1;
  return std::max<std::int64_t>(0, h);
}

using PixelToWorld = std::function<WorldCoord(const PixelCoord &)>;

PlanResult plan_impl(
  const TraversabilityMask & mask, const DistanceField & field, const PixelToWorld & to_world,
  const PixelCoord & start_px, const PixelCoord & goal_px, const CostParams & params)
{
  params.validate();
  if (field.width() != mask.width() || field.height() != mask.height()) {
    throw std::invalid_argument("distance field does not match mask dimensions");
  }
  const Cell start = to_cell(start_px);
  const Cell goal = to_cell(goal_px);
  for (const auto & [cell, name] : {std::pair{start, "start"}, std::pair{goal, "goal"}}) {
    if (!mask.contains(cell)) {
      return {PlanStatus::kInvalidEndpoint, std::nullopt, std::string(name) + " is outside the mask"};
    }
    if (!mask.at(cell)) {
      return {PlanStatus::kInvalidEndpoint, std::nullopt, std::string(name) + " is not traversable"};
    }
  }

  constexpr auto kUnreached = std::numeric_limits<std::int64_t>::max();
  const std::size_t n = mask.size();
  std::vector<std::int64_t> g(n, kUnreached);
  std::vector<std::int64_t> parent(n, -1);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenEntryAfter> open;

  const auto start_index = mask.index(start.col, start.row);
  const auto goal_index = mask.index(goal.col, goal.row);
  g[start_index] = 0;
  open.push({heuristic_ticks(start, goal, params.heuristic_weight), 0, start_index});

  bool found = false;
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (top.g != g[top.index]) {
      continue;  // stale
    }
    if (top.index == goal_index) {
      found = true;
      break;
    }
    const Cell u = mask.cell(top.index);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) {
          continue;
        }
        const Cell v{u.col + dc, u.row + dr};
        if (!mask.contains(v) || !mask.at(v)) {
          continue;
        }
        const auto vi = mask.index(v.col, v.row);
        const double step = (dr != 0 && dc != 0) ? std::numbers::sqrt2 : 1.0;
        const auto tentative = top.g + edge_cost_ticks(step, field.at(vi), params);
        if (tentative < g[vi]) {
          // Reopening closed cells keeps the result optimal for any admissible
          // heuristic, consistent or not.
          g[vi] = tentative;
          parent[vi] = static_cast<std::int64_t>(top.index);
          open.push({tentative + heuristic_ticks(v, goal, params.heuristic_weight), tentative, vi});
        }
      }
    }
  }
  if (!found) {
    return {PlanStatus::kNoPath, std::nullopt, "start and goal are not connected on the mask"};
  }

  PathM path;
  for (std::int64_t i = static_cast<std::int64_t>(goal_index); i >= 0; i = parent[static_cast<std::size_t>(i)]) {
    path.pixel_trace.push_back(to_pixel(mask.cell(static_cast<std::size_t>(i))));
  }
  std::reverse(path.pixel_trace.begin(), path.pixel_trace.end());
  path.waypoints.reserve(path.pixel_trace.size());
  for (const auto & p : path.pixel_trace) {
    path.waypoints.push_back(to_world(p));
  }
  path.cost_ticks = g[goal_index];
  path.cost = static_cast<double>(path.cost_ticks) / kCostTicksPerUnit;
  path.length_m = polyline_length(path.waypoints);
  return {PlanStatus::kOk, std::move(path), {}};
}

}  // namespace

PlanResult plan_path(
  const TraversabilityMask & mask, const DistanceField & field, const BevMap & map, const PixelCoord & start,
  const PixelCoord & goal, const CostParams & params)
{
  if (map.width() != mask.width() || map.height() != mask.height()) {
    throw std::invalid_argument("mask dimensions differ from the map");
  }
  return plan_impl(
    mask, field, [&map](const PixelCoord & p) { return map.pixel_to_world(p); }, start, goal, params);
}

PlanResult plan_path(
  const TraversabilityMask & mask, const DistanceField & field, const PixelCoord & start, const PixelCoord & goal,
  const CostParams & params)
{
  return plan_impl(
    mask, field, [](const PixelCoord & p) { return WorldCoord{p.col, p.row}; }, start, goal, params);
}

std::vector<Cell> supercover_line(Cell a, Cell b)
{
  const int dx = std::abs(b.col - a.col);
  const int dy = std::abs(b.row - a.row);
  const int sx = b.col > a.col ? 1 : -1;
  const int sy = b.row > a.row ? 1 : -1;
  std::vector<Cell> cells{a};
  Cell p = a;
  int ix = 0;
  int iy = 0;
  while (ix < dx || iy < dy) {
    const long long decision = static_cast<long long>(1 + 2 * ix) * dy - static_cast<long long>(1 + 2 * iy) * dx;
    if (decision == 0) {
      // Exact corner crossing: both side cells are touched.
      cells.push_back(Cell{p.col + sx, p.row});
      cells.push_back(Cell{p.col, p.row + sy});
      p.col += sx;
      p.row += sy;
      ++ix;
      ++iy;
    } else if (decision < 0) {
      p.col += sx;
      ++ix;
    } else {
      p.row += sy;
      ++iy;
    }
    cells.push_back(p);
  }
  return cells;
}

bool line_of_sight(const TraversabilityMask & mask, Cell a, Cell b)
{
  for (const auto & c : supercover_line(a, b)) {
    if (!mask.contains(c) || !mask.at(c)) {
      return false;
    }
  }
  return true;
}

PathM simplify_path(const PathM & path, const TraversabilityMask & mask)
{
  const std::size_t n = path.pixel_trace.size();
  if (n <= 2) {
    return path;
  }
  std::vector<std::size_t> kept{0};
  std::size_t anchor = 0;
  while (anchor < n - 1) {
    std::size_t next = anchor + 1;
    while (next + 1 < n &&
           line_of_sight(mask, to_cell(path.pixel_trace[anchor]), to_cell(path.pixel_trace[next + 1]))) {
      ++next;
    }
    kept.push_back(next);
    anchor = next;
  }
  PathM out;
  out.cost = path.cost;
  out.cost_ticks = path.cost_ticks;
  for (const auto i : kept) {
    out.pixel_trace.push_back(path.pixel_trace[i]);
    out.waypoints.push_back(path.waypoints[i]);
  }
  out.length_m = polyline_length(out.waypoints);
  return out;
}

}  // namespace pathpainter
