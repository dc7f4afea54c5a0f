#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace cbf2d {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = std::numbers::pi;

// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

struct Pose2 {
  Vec2 position{0.0, 0.0};
  double yaw{0.0};

  Pose2() = default;
  Pose2(const Vec2& p, double psi) : position(p), yaw(wrap_angle(psi)) {}
};

// Ground-truth robot state integrated by the simulator.
struct RobotState {
  Pose2 true_pose{};
  Vec2 linear_velocity{0.0, 0.0};
  double yaw_rate{0.0};
};

// Pose as reported by odometry. May disagree with the true pose once a
// fault is injected; everything downstream of the sensors consumes this.
struct EstimatedPose {
  Vec2 position{0.0, 0.0};
  double yaw{0.0};
};

// One LIDAR sweep. Points are in the body frame (sensor at the origin,
// x forward); missed beams are simply absent.
struct Scan {
  std::vector<Vec2> points_body;
  double timestamp{0.0};
};

// Semi-axes of the body-fixed safety ellipsoid. a_z is carried for
// completeness but unused by the planar pipeline.
struct SafetyEllipsoid {
  double a_x{0.9};
  double a_y{0.45};
  std::optional<double> a_z{};
};

inline Mat2 rotation_matrix(double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

// Q(t) = R diag(1/a_x^2, 1/a_y^2) R^T, the ellipse shape matrix in the
// world frame for the current body yaw.
inline Mat2 shape_matrix_world(const SafetyEllipsoid& e, double yaw) {
  const Mat2 r = rotation_matrix(yaw);
  const Vec2 inv_sq(1.0 / (e.a_x * e.a_x), 1.0 / (e.a_y * e.a_y));
  return r * inv_sq.asDiagonal() * r.transpose();
}

// dQ/dt for a body-fixed ellipse spinning at yaw_rate. Using R' = w S R
// with S the planar skew generator gives Q' = w (S Q - Q S), which stays
// symmetric and vanishes for circles.
inline Mat2 shape_matrix_rate(const SafetyEllipsoid& e, double yaw,
                              double yaw_rate) {
  const Mat2 q = shape_matrix_world(e, yaw);
  Mat2 s;
  s << 0.0, -1.0, 1.0, 0.0;
  return yaw_rate * (s * q - q * s);
}

inline std::vector<Vec2> body_to_world(const std::vector<Vec2>& points_body,
                                       const EstimatedPose& pose) {
  const Mat2 r = rotation_matrix(pose.yaw);
  std::vector<Vec2> out;
  out.reserve(points_body.size());
  for (const Vec2& p : points_body) out.push_back(pose.position + r * p);
  return out;
}

}  // namespace cbf2d
