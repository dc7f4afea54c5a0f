#pragma once

#include <cstdint>
#include <vector>

#include "cbf2d/core.hpp"

namespace cbf2d {

struct Segment {
  Vec2 a{0.0, 0.0};
  Vec2 b{0.0, 0.0};
};

// One pose sample of a dynamic obstacle schedule. rotation is interpolated
// on the raw value (not wrapped), so schedules may wind past pi.
struct TrajectoryKnot {
  double t{0.0};
  Vec2 translation{0.0, 0.0};
  double rotation{0.0};
};

struct DynamicObstacle {
  std::vector<Segment> segments_local;
  std::vector<TrajectoryKnot> trajectory;  // timestamps strictly increasing

  // Piecewise-linear interpolation, clamped to the first/last knot.
  Pose2 pose_at(double t) const;
};

struct World {
  std::vector<Segment> static_segments;
  std::vector<DynamicObstacle> dynamic_obstacles;
};

struct LidarConfig {
  int n_beams{720};
  double max_range{3.5};
  double angular_span{2.0 * kPi};
  double range_noise_std{0.0};
};

struct OdometryFault {
  double trigger_time{0.0};
  Vec2 position_offset{0.0, 0.0};
  double yaw_offset{0.0};
  Vec2 drift_rate{0.0, 0.0};  // slow additional drift, meters per second
};

struct CollisionReport {
  bool colliding{false};
  double penetration{0.0};
};

// All world segments with dynamic obstacles posed at time t.
std::vector<Segment> posed_segments(const World& world, double t);

// First-hit distance of a ray against one segment; negative when there is
// no hit in front of the origin.
double ray_segment_distance(const Vec2& origin, const Vec2& dir,
                            const Segment& seg);

// n_beams rays uniformly covering angular_span around the body x axis.
// Full-circle spans place beams at span*k/n (no duplicate endpoint);
// partial spans include both endpoints. Hits beyond max_range are dropped,
// not reported at the cap. Gaussian range noise, when enabled, draws from
// a generator seeded with rng_seed.
Scan raycast_scan(const World& world, const Pose2& true_pose, double t,
                  const LidarConfig& cfg, std::uint64_t rng_seed);

// First-order kinematics: explicit Euler on position, proportional yaw
// tracking with rate clamp. The returned yaw_rate is what the barrier's
// dQ/dt term consumes next tick.
RobotState step_dynamics(const RobotState& state, const Vec2& u_star,
                         double yaw_cmd, double dt, double omega_max,
                         double yaw_gain = 4.0);

// Constant-offset odometry fault (plus optional slow drift) from
// trigger_time onward; identity before.
EstimatedPose apply_odometry_fault(const EstimatedPose& est,
                                   const OdometryFault& fault, double t);

// Ground-truth audit: does any world segment enter the safety ellipse at
// the true pose? Segments are sampled at 1 cm; penetration is the largest
// sampled value of 1 - (x_B/a_x)^2 - (y_B/a_y)^2, clamped at zero.
CollisionReport collision_check(const World& world, const Pose2& true_pose,
                                const SafetyEllipsoid& ellipsoid,
                                double t = 0.0);

}  // namespace cbf2d
