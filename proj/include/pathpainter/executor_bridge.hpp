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

#ifndef PATHPAINTER__EXECUTOR_BRIDGE_HPP_
#define PATHPAINTER__EXECUTOR_BRIDGE_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathpainter/geometry.hpp"
#include "pathpainter/planner.hpp"

namespace pathpainter
{

/// Wraps an angle to (-pi, pi].
double normalize_angle(double theta);

enum class Frame { kMap, kOdom };

struct Pose2D
{
  double x{0.0};
  double y{0.0};
  double theta{0.0};
  Frame frame{Frame::kMap};

  WorldCoord position() const { return {x, y}; }
};

class FrameMismatchError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// SE(2) element: p -> R(rotation) p + translation.
struct RigidTransform2D
{
  double rotation{0.0};
  double tx{0.0};
  double ty{0.0};

  static RigidTransform2D identity() { return {}; }

  /// (this * other)(p) = this(other(p))
  RigidTransform2D compose(const RigidTransform2D & other) const;
  RigidTransform2D inverse() const;
  WorldCoord apply(const WorldCoord & p) const;
  /// Transforms position and heading; the frame tag is set to `target`.
  Pose2D apply(const Pose2D & pose, Frame target) const;
};

/// T_M^O from simultaneous map-frame and odom-frame estimates of one robot
/// pose, such that T * pose_map = pose_odom.
RigidTransform2D compute_map_to_odom(const Pose2D & pose_map, const Pose2D & pose_odom);

/// Map-frame waypoint to the odometry frame.
WorldCoord transform_waypoint(const RigidTransform2D & map_to_odom, const WorldCoord & p);

struct Lookahead
{
  std::size_t index{0};
  WorldCoord point;
};

/// Nearest path point to the pose (ties go to the larger index), then the
/// first waypoint at least `lookahead_m` further along the path, clamped to
/// the final waypoint.
Lookahead select_lookahead(const PathM & path, const Pose2D & pose_map, double lookahead_m);

struct SimConfig
{
  /// Heading bias of the odometry, rad per meter traveled.
  double drift_rate{0.0};
  /// Heading noise, rad per sqrt(meter).
  double heading_noise_std{0.0};
  double global_fix_hz{1.0};
  bool fixes_enabled{true};
  /// Optional fix noise; zero gives the ideal cross-view fix.
  double fix_position_noise_std{0.0};
  double fix_heading_noise_std{0.0};
  double control_hz{10.0};
  double lookahead_m{5.0};
  double speed_mps{1.0};
  double goal_tolerance_m{1.0};
  /// 0 picks a budget of three times the path traversal time plus slack.
  std::int64_t max_steps{0};
  std::uint64_t rng_seed{0};

  void validate() const;
};

struct SimStep
{
  std::int64_t step{0};
  double t_s{0.0};
  Pose2D true_pose;
  Pose2D odom_pose;
  bool fix_applied{false};
  std::size_t k{0};
  RigidTransform2D map_to_odom;
};

struct SimResult
{
  bool success{false};
  std::int64_t steps{0};
  /// Distance from the true final position to the final waypoint.
  double terminal_error_m{0.0};
  /// Largest distance between the true position and the map-frame estimate
  /// T^-1 * odom over the run.
  double max_estimate_error_m{0.0};
  std::vector<SimStep> log;
};

/// Unicycle follower at control_hz. The odometry heading accumulates
/// drift_rate rad per meter plus seeded Gaussian noise. At global_fix_hz the
/// map-frame pose is set from the true pose and T_M^O recomputed; between
/// fixes the last T is held. Success when the true position is within
/// goal_tolerance_m of the final waypoint; failure when the step budget runs
/// out.
SimResult simulate_follow(const PathM & path, const SimConfig & config);

/// CSV: step,t_s,true_x,true_y,true_theta,odom_x,odom_y,odom_theta,fix_applied,k
std::string trajectory_csv(const SimResult & result);

}  // namespace pathpainter

#endif  // PATHPAINTER__EXECUTOR_BRIDGE_HPP_
