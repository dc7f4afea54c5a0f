#include "cbf2d/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cbf2d {

namespace {

double cross2(const Vec2& p, const Vec2& q) {
  return p.x() * q.y() - p.y() * q.x();
}

}  // namespace

Pose2 DynamicObstacle::pose_at(double t) const {
  if (trajectory.empty()) return {};
  if (t <= trajectory.front().t) {
    return {trajectory.front().translation, trajectory.front().rotation};
  }
  if (t >= trajectory.back().t) {
    return {trajectory.back().translation, trajectory.back().rotation};
  }
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    const TrajectoryKnot& k0 = trajectory[i - 1];
    const TrajectoryKnot& k1 = trajectory[i];
    if (t <= k1.t) {
      const double s = (t - k0.t) / (k1.t - k0.t);
      return {k0.translation + s * (k1.translation - k0.translation),
              k0.rotation + s * (k1.rotation - k0.rotation)};
    }
  }
  return {trajectory.back().translation, trajectory.back().rotation};
}

std::vector<Segment> posed_segments(const World& world, double t) {
  std::vector<Segment> out = world.static_segments;
  for (const DynamicObstacle& obs : world.dynamic_obstacles) {
    const Pose2 pose = obs.pose_at(t);
    const Mat2 r = rotation_matrix(pose.yaw);
    for (const Segment& s : obs.segments_local) {
      out.push_back({pose.position + r * s.a, pose.position + r * s.b});
    }
  }
  return out;
}

double ray_segment_distance(const Vec2& origin, const Vec2& dir,
                            const Segment& seg) {
  const Vec2 e = seg.b - seg.a;
  const double denom = cross2(dir, e);
  if (denom == 0.0) return -1.0;  // parallel (collinear grazes are skipped)
  const Vec2 d = seg.a - origin;
  const double s = cross2(d, e) / denom;
  const double v = cross2(d, dir) / denom;
  if (s < 0.0 || v < 0.0 || v > 1.0) return -1.0;
  return s;
}

Scan raycast_scan(const World& world, const Pose2& true_pose, double t,
                  const LidarConfig& cfg, std::uint64_t rng_seed) {
  Scan scan;
  scan.timestamp = t;
  if (cfg.n_beams < 1) return scan;

  const std::vector<Segment> segs = posed_segments(world, t);
  const bool full_circle = cfg.angular_span >= 2.0 * kPi - 1e-9;

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> noise(0.0, cfg.range_noise_std);

  scan.points_body.reserve(static_cast<std::size_t>(cfg.n_beams));
  for (int k = 0; k < cfg.n_beams; ++k) {
    double theta;
    if (cfg.n_beams == 1) {
      theta = 0.0;
    } else if (full_circle) {
      theta = -cfg.angular_span / 2.0 +
              cfg.angular_span * static_cast<double>(k) / cfg.n_beams;
    } else {
      theta = -cfg.angular_span / 2.0 +
              cfg.angular_span * static_cast<double>(k) / (cfg.n_beams - 1);
    }
    const double world_angle = true_pose.yaw + theta;
    const Vec2 dir(std::cos(world_angle), std::sin(world_angle));

    double best = cfg.max_range;
    bool hit = false;
    for (const Segment& s : segs) {
      const double r = ray_segment_distance(true_pose.position, dir, s);
      if (r >= 0.0 && r <= best) {
        best = r;
        hit = true;
      }
    }
    if (!hit) continue;

    double range = best;
    if (cfg.range_noise_std > 0.0) {
      range = std::clamp(range + noise(rng), 0.0, cfg.max_range);
    }
    scan.points_body.emplace_back(range * std::cos(theta),
                                  range * std::sin(theta));
  }
  return scan;
}

RobotState step_dynamics(const RobotState& state, const Vec2& u_star,
                         double yaw_cmd, double dt, double omega_max,
                         double yaw_gain) {
  RobotState next = state;
  next.true_pose.position += u_star * dt;
  const double err = wrap_angle(yaw_cmd - state.true_pose.yaw);
  const double omega = std::clamp(yaw_gain * err, -omega_max, omega_max);
  next.true_pose.yaw = wrap_angle(state.true_pose.yaw + omega * dt);
  next.yaw_rate = omega;
  next.linear_velocity = u_star;
  return next;
}

EstimatedPose apply_odometry_fault(const EstimatedPose& est,
                                   const OdometryFault& fault, double t) {
  if (t < fault.trigger_time) return est;
  EstimatedPose out = est;
  out.position +=
      fault.position_offset + fault.drift_rate * (t - fault.trigger_time);
  out.yaw = wrap_angle(est.yaw + fault.yaw_offset);
  return out;
}

CollisionReport collision_check(const World& world, const Pose2& true_pose,
                                const SafetyEllipsoid& ellipsoid, double t) {
  constexpr double kStep = 0.01;

  const Mat2 r_t = rotation_matrix(true_pose.yaw).transpose();
  const double reach = std::max(ellipsoid.a_x, ellipsoid.a_y);

  CollisionReport report;
  for (const Segment& seg : posed_segments(world, t)) {
    // Cheap reject: segment bounding box inflated by the long semi-axis.
    const double lo_x = std::min(seg.a.x(), seg.b.x()) - reach;
    const double hi_x = std::max(seg.a.x(), seg.b.x()) + reach;
    const double lo_y = std::min(seg.a.y(), seg.b.y()) - reach;
    const double hi_y = std::max(seg.a.y(), seg.b.y()) + reach;
    const Vec2& c = true_pose.position;
    if (c.x() < lo_x || c.x() > hi_x || c.y() < lo_y || c.y() > hi_y) {
      continue;
    }

    const double len = (seg.b - seg.a).norm();
    const int n = std::max(2, static_cast<int>(std::ceil(len / kStep)) + 1);
    for (int i = 0; i < n; ++i) {
      const Vec2 p = seg.a + (seg.b - seg.a) * (static_cast<double>(i) /
                                                static_cast<double>(n - 1));
      const Vec2 body = r_t * (p - true_pose.position);
      const double f = (body.x() / ellipsoid.a_x) * (body.x() / ellipsoid.a_x) +
                       (body.y() / ellipsoid.a_y) * (body.y() / ellipsoid.a_y);
      report.penetration = std::max(report.penetration, 1.0 - f);
    }
  }
  report.colliding = report.penetration > 0.0;
  return report;
}

}  // namespace cbf2d
