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

#include "pathpainter/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

namespace pathpainter
{

SegMetrics seg_metrics(const TraversabilityMask & pred, const TraversabilityMask & gt)
{
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw DimensionMismatch(
      "prediction is " + std::to_string(pred.width()) + "x" + std::to_string(pred.height()) + ", ground truth is " +
      std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
  }
  SegMetrics m;
  const auto p = pred.cells();
  const auto g = gt.cells();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] && g[i]) {
      ++m.tp;
    } else if (p[i]) {
      ++m.fp;
    } else if (g[i]) {
      ++m.fn;
    }
  }
  const auto ratio = [](std::int64_t num, std::int64_t den, bool & undefined) {
    undefined = den == 0;
    return undefined ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  m.iou = ratio(m.tp, m.tp + m.fp + m.fn, m.iou_undefined);
  m.precision = ratio(m.tp, m.tp + m.fp, m.precision_undefined);
  m.recall = ratio(m.tp, m.tp + m.fn, m.recall_undefined);
  m.f1_undefined = m.precision + m.recall == 0.0;
  m.f1 = m.f1_undefined ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

double default_min_separation(int width, int height)
{
  return 100.0 * std::max(width, height) / 2048.0;
}

namespace
{

double path_polyline_px(const PathM & path, const TraversabilityMask & mask)
{
  const PathM simple = simplify_path(path, mask);
  double total = 0.0;
  for (std::size_t i = 1; i < simple.pixel_trace.size(); ++i) {
    total += distance(simple.pixel_trace[i - 1], simple.pixel_trace[i]);
  }
  return total;
}

std::int64_t step_cost_ticks(const PathM & path)
{
  const CostParams unit{0.0, 1.0, 1.0};
  std::int64_t ticks = 0;
  for (std::size_t i = 1; i < path.pixel_trace.size(); ++i) {
    const auto & a = path.pixel_trace[i - 1];
    const auto & b = path.pixel_trace[i];
    const bool diagonal = a.col != b.col && a.row != b.row;
    ticks += edge_cost_ticks(diagonal ? std::numbers::sqrt2 : 1.0, 0.0, unit);
  }
  return ticks;
}

std::optional<Cell> snap_endpoint(const TraversabilityMask & mask, Cell c, int radius)
{
  if (mask.contains(c) && mask.at(c)) {
    return c;
  }
  std::optional<Cell> best;
  int best_d2 = radius * radius + 1;
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      const int d2 = dc * dc + dr * dr;
      const Cell n{c.col + dc, c.row + dr};
      if (d2 < best_d2 && mask.contains(n) && mask.at(n)) {
        best = n;
        best_d2 = d2;
      }
    }
  }
  return best;
}

PairRecord eval_pair_with_field(
  const TraversabilityMask & pred, const DistanceField & pred_field, const TraversabilityMask & gt,
  const PairSample & pair, const EvalOptions & options)
{
  PairRecord rec;
  rec.start = pair.start;
  rec.goal = pair.goal;
  Cell start = pair.start;
  Cell goal = pair.goal;
  if (options.snap_radius > 0) {
    const auto s = snap_endpoint(pred, start, options.snap_radius);
    const auto g = snap_endpoint(pred, goal, options.snap_radius);
    if (s) start = *s;
    if (g) goal = *g;
  }

  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const PlanResult plan = plan_path(pred, pred_field, to_pixel(start), to_pixel(goal), options.params);
  if (options.record_timing) {
    rec.plan_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
  }
  rec.status = plan.status;
  rec.success = plan.ok();
  if (!rec.success) {
    return rec;
  }
  const PathM & path = *plan.path;
  rec.path_cells = path.pixel_trace.size();
  std::size_t inside = 0;
  for (const auto & p : path.pixel_trace) {
    if (gt.at(to_cell(p))) {
      ++inside;
    }
  }
  rec.validity = static_cast<double>(inside) / static_cast<double>(rec.path_cells);
  if (options.length_mode == LengthMode::kStepCost) {
    rec.len_ratio = static_cast<double>(step_cost_ticks(path)) / static_cast<double>(pair.gt_shortest_ticks);
  } else {
    rec.len_ratio = path_polyline_px(path, pred) / pair.gt_polyline_px;
  }
  return rec;
}

void require_same_size(const TraversabilityMask & pred, const TraversabilityMask & gt)
{
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw DimensionMismatch("prediction and ground-truth masks differ in size");
  }
}

}  // namespace

std::vector<PairSample> sample_pairs(
  const TraversabilityMask & gt, std::size_t n, double min_sep_px, std::uint64_t seed)
{
  std::vector<std::size_t> free_cells;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt.cells()[i]) {
      free_cells.push_back(i);
    }
  }
  std::vector<PairSample> pairs;
  if (n == 0) {
    return pairs;
  }
  if (free_cells.size() < 2) {
    throw SamplingExhausted(0, n);
  }
  const auto components = label_components(gt);
  const auto field = distance_transform(gt);
  const CostParams shortest{0.0, 5.0, 1.0};

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, free_cells.size() - 1);
  const std::size_t max_rejections = 1000 * n;
  std::size_t rejections = 0;
  while (pairs.size() < n) {
    const auto a = free_cells[pick(rng)];
    const auto b = free_cells[pick(rng)];
    const Cell ca = gt.cell(a);
    const Cell cb = gt.cell(b);
    const double sep = std::hypot(static_cast<double>(ca.col - cb.col), static_cast<double>(ca.row - cb.row));
    if (a == b || sep < min_sep_px || components.labels[a] != components.labels[b]) {
      if (++rejections > max_rejections) {
        throw SamplingExhausted(pairs.size(), n);
      }
      continue;
    }
    const auto plan = plan_path(gt, field, to_pixel(ca), to_pixel(cb), shortest);
    PairSample s;
    s.start = ca;
    s.goal = cb;
    s.gt_shortest_ticks = plan.path->cost_ticks;
    s.gt_shortest_cost = plan.path->cost;
    s.gt_polyline_px = path_polyline_px(*plan.path, gt);
    pairs.push_back(s);
  }
  return pairs;
}

PairRecord eval_pair(
  const TraversabilityMask & pred, const TraversabilityMask & gt, const PairSample & pair,
  const EvalOptions & options)
{
  require_same_size(pred, gt);
  return eval_pair_with_field(pred, distance_transform(pred), gt, pair, options);
}

std::vector<PairRecord> eval_pairs(
  const TraversabilityMask & pred, const TraversabilityMask & gt, const std::vector<PairSample> & pairs,
  const EvalOptions & options, unsigned parallel)
{
  require_same_size(pred, gt);
  options.params.validate();
  const auto field = distance_transform(pred);
  std::vector<PairRecord> records(pairs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next++; i < pairs.size(); i = next++) {
      records[i] = eval_pair_with_field(pred, field, gt, pairs[i], options);
      records[i].index = i;
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(parallel, static_cast<unsigned>(pairs.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
  }
  return records;
}

PathBenchResult aggregate(const std::vector<PairRecord> & records)
{
  if (records.empty()) {
    throw std::invalid_argument("cannot aggregate an empty record list");
  }
  PathBenchResult out;
  out.n_samples = records.size();
  double valid_sum = 0.0;
  double len_sum = 0.0;
  double time_sum = 0.0;
  for (const auto & r : records) {
    time_sum += r.plan_time_s;
    if (r.success) {
      ++out.n_success;
      valid_sum += r.validity;
      len_sum += r.len_ratio;
    }
  }
  out.succ = static_cast<double>(out.n_success) / static_cast<double>(out.n_samples);
  if (out.n_success > 0) {
    out.valid = valid_sum / static_cast<double>(out.n_success);
    out.len_ratio = len_sum / static_cast<double>(out.n_success);
  }
  out.mean_plan_time_s = time_sum / static_cast<double>(out.n_samples);
  return out;
}

}  // namespace pathpainter
