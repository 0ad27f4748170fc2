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

#include "pathpainter/executor_bridge.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

namespace pathpainter
{

double normalize_angle(double theta)
{
  double wrapped = std::remainder(theta, 2.0 * std::numbers::pi);  // [-pi, pi]
  if (wrapped <= -std::numbers::pi) {
    wrapped += 2.0 * std::numbers::pi;
  }
  return wrapped;
}

RigidTransform2D RigidTransform2D::compose(const RigidTransform2D & other) const
{
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  return RigidTransform2D{
    normalize_angle(rotation + other.rotation), c * other.tx - s * other.ty + tx, s * other.tx + c * other.ty + ty};
}

RigidTransform2D RigidTransform2D::inverse() const
{
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  return RigidTransform2D{normalize_angle(-rotation), -(c * tx + s * ty), -(-s * tx + c * ty)};
}

WorldCoord RigidTransform2D::apply(const WorldCoord & p) const
{
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  return WorldCoord{c * p.x - s * p.y + tx, s * p.x + c * p.y + ty};
}

Pose2D RigidTransform2D::apply(const Pose2D & pose, Frame target) const
{
  const auto p = apply(pose.position());
  return Pose2D{p.x, p.y, normalize_angle(pose.theta + rotation), target};
}

RigidTransform2D compute_map_to_odom(const Pose2D & pose_map, const Pose2D & pose_odom)
{
  if (pose_map.frame != Frame::kMap || pose_odom.frame != Frame::kOdom) {
    throw FrameMismatchError("compute_map_to_odom expects a map-frame pose and an odom-frame pose");
  }
  RigidTransform2D t;
  t.rotation = normalize_angle(pose_odom.theta - pose_map.theta);
  const double c = std::cos(t.rotation);
  const double s = std::sin(t.rotation);
  t.tx = pose_odom.x - (c * pose_map.x - s * pose_map.y);
  t.ty = pose_odom.y - (s * pose_map.x + c * pose_map.y);
  return t;
}

WorldCoord transform_waypoint(const RigidTransform2D & map_to_odom, const WorldCoord & p)
{
  return map_to_odom.apply(p);
}

Lookahead select_lookahead(const PathM & path, const Pose2D & pose_map, double lookahead_m)
{
  if (path.waypoints.empty()) {
    throw std::invalid_argument("lookahead on an empty path");
  }
  if (!(lookahead_m > 0.0)) {
    throw std::invalid_argument("lookahead distance must be > 0");
  }
  const auto & w = path.waypoints;
  const WorldCoord pos = pose_map.position();
  std::size_t nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = distance(w[i], pos);
    if (d <= best) {
      best = d;
      nearest = i;
    }
  }
  std::size_t k = nearest;
  double travelled = 0.0;
  while (k + 1 < w.size() && travelled < lookahead_m) {
    travelled += distance(w[k], w[k + 1]);
    ++k;
  }
  return Lookahead{k, w[k]};
}

void SimConfig::validate() const
{
  const auto bad = [](const char * what) { throw std::invalid_argument(std::string("sim config: ") + what); };
  if (!(drift_rate >= 0.0)) bad("drift_rate must be >= 0");
  if (!(heading_noise_std >= 0.0)) bad("heading_noise_std must be >= 0");
  if (!(global_fix_hz > 0.0)) bad("global_fix_hz must be > 0");
  if (!(control_hz > 0.0)) bad("control_hz must be > 0");
  if (!(lookahead_m > 0.0)) bad("lookahead_m must be > 0");
  if (!(speed_mps > 0.0)) bad("speed_mps must be > 0");
  if (!(goal_tolerance_m > 0.0)) bad("goal_tolerance_m must be > 0");
  if (!(fix_position_noise_std >= 0.0 && fix_heading_noise_std >= 0.0)) bad("fix noise must be >= 0");
  if (max_steps < 0) bad("max_steps must be >= 0");
}

SimResult simulate_follow(const PathM & path, const SimConfig & config)
{
  config.validate();
  if (path.waypoints.empty()) {
    throw std::invalid_argument("cannot follow an empty path");
  }
  const auto & w = path.waypoints;
  const WorldCoord goal = w.back();
  const double dt = 1.0 / config.control_hz;
  const double nominal_step = config.speed_mps * dt;
  const double fix_period = 1.0 / config.global_fix_hz;
  const double length = polyline_length(w);
  const std::int64_t budget = config.max_steps > 0 ? config.max_steps
                                                   : static_cast<std::int64_t>(std::ceil(
                                                       3.0 * (length + config.lookahead_m) / nominal_step)) +
                                                       static_cast<std::int64_t>(10.0 * config.control_hz);

  double heading0 = 0.0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (distance(w[i], w[0]) > 0.0) {
      heading0 = std::atan2(w[i].y - w[0].y, w[i].x - w[0].x);
      break;
    }
  }
  Pose2D truth{w[0].x, w[0].y, heading0, Frame::kMap};
  // The odometry frame starts aligned with the map frame.
  Pose2D odom{truth.x, truth.y, truth.theta, Frame::kOdom};
  RigidTransform2D map_to_odom = RigidTransform2D::identity();

  std::mt19937_64 rng(config.rng_seed);
  std::normal_distribution<double> gaussian(0.0, 1.0);
  double next_fix_t = 0.0;

  SimResult result;
  for (std::int64_t step = 0;; ++step) {
    const double t = static_cast<double>(step) * dt;
    bool fix_applied = false;
    if (config.fixes_enabled && t + 1e-9 >= next_fix_t) {
      Pose2D fix = truth;
      if (config.fix_position_noise_std > 0.0) {
        fix.x += config.fix_position_noise_std * gaussian(rng);
        fix.y += config.fix_position_noise_std * gaussian(rng);
      }
      if (config.fix_heading_noise_std > 0.0) {
        fix.theta = normalize_angle(fix.theta + config.fix_heading_noise_std * gaussian(rng));
      }
      map_to_odom = compute_map_to_odom(fix, odom);
      next_fix_t += fix_period;
      fix_applied = true;
    }

    const Pose2D estimate = map_to_odom.inverse().apply(odom, Frame::kMap);
    result.max_estimate_error_m =
      std::max(result.max_estimate_error_m, distance(estimate.position(), truth.position()));
    const Lookahead target = select_lookahead(path, estimate, config.lookahead_m);
    result.log.push_back(SimStep{step, t, truth, odom, fix_applied, target.index, map_to_odom});

    if (distance(truth.position(), goal) <= config.goal_tolerance_m) {
      result.success = true;
      result.steps = step;
      break;
    }
    if (step >= budget) {
      result.steps = step;
      break;
    }

    // Lookahead waypoint expressed in the odometry frame.
    const WorldCoord target_odom = transform_waypoint(map_to_odom, target.point);
    const double dx = target_odom.x - odom.x;
    const double dy = target_odom.y - odom.y;
    const double to_target = std::hypot(dx, dy);
    double travel = nominal_step;
    if (target.index + 1 == w.size()) {
      // Stop on the believed goal instead of orbiting it.
      travel = std::min(travel, to_target);
    }
    if (travel <= 1e-12) {
      continue;
    }
    const double turn = normalize_angle(std::atan2(dy, dx) - odom.theta);

    truth.theta = normalize_angle(truth.theta + turn);
    truth.x += travel * std::cos(truth.theta);
    truth.y += travel * std::sin(truth.theta);

    double odom_turn = turn + config.drift_rate * travel;
    if (config.heading_noise_std > 0.0) {
      odom_turn += config.heading_noise_std * std::sqrt(travel) * gaussian(rng);
    }
    odom.theta = normalize_angle(odom.theta + odom_turn);
    odom.x += travel * std::cos(odom.theta);
    odom.y += travel * std::sin(odom.theta);
  }
  result.terminal_error_m = distance(truth.position(), goal);
  return result;
}

std::string trajectory_csv(const SimResult & result)
{
  std::string out = "step,t_s,true_x,true_y,true_theta,odom_x,odom_y,odom_theta,fix_applied,k\n";
  char line[256];
  for (const auto & s : result.log) {
    std::snprintf(
      line, sizeof(line), "%lld,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d,%zu\n", static_cast<long long>(s.step), s.t_s,
      s.true_pose.x, s.true_pose.y, s.true_pose.theta, s.odom_pose.x, s.odom_pose.y, s.odom_pose.theta,
      s.fix_applied ? 1 : 0, s.k);
    out += line;
  }
  return out;
}

}  // namespace pathpainter
