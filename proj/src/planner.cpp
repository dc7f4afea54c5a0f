#include "cbf2d/planner.hpp"

#include <cmath>
#include <limits>

namespace cbf2d {

namespace {
constexpr double kDegenerateDistance = 1e-6;
}

std::optional<Vec2> nearest_surface_point(std::span<const Vec2> scan_world,
                                          const Vec2& est_pos) {
  if (scan_world.empty()) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_p = scan_world.front();
  for (const Vec2& p : scan_world) {
    const double d = (p - est_pos).squaredNorm();
    if (d < best) {  // strict: earliest index wins ties
      best = d;
      best_p = p;
    }
  }
  return best_p;
}

std::optional<ViewReference> next_view_reference(
    std::span<const Vec2> scan_world, const EstimatedPose& est_pose,
    const PlannerConfig& cfg) {
  const auto nn = nearest_surface_point(scan_world, est_pose.position);
  if (!nn) return std::nullopt;

  const Vec2 rel = *nn - est_pose.position;
  const double dist = rel.norm();
  if (dist <= kDegenerateDistance) return std::nullopt;

  const Vec2 nu_x = rel / dist;
  // Planar restriction of up x nu_x: a quarter turn. sweep_right mirrors it.
  const Vec2 nu_y = cfg.sweep_right ? Vec2(nu_x.y(), -nu_x.x())
                                    : Vec2(-nu_x.y(), nu_x.x());

  const double d_insp = dist - cfg.d_view;
  const double d_hov =
      2.0 * std::tan(cfg.fov_h / 2.0) * dist * (1.0 - cfg.gamma_h);

  ViewReference ref;
  ref.position = est_pose.position + nu_x * d_insp + nu_y * d_hov;
  ref.yaw = wrap_angle(std::atan2(nu_x.y(), nu_x.x()));
  return ref;
}

std::optional<std::vector<ViewReference>> plan_horizon(
    std::span<const Vec2> scan_world, const EstimatedPose& est_pose,
    const PlannerConfig& cfg, int horizon) {
  if (horizon < 1) return std::nullopt;
  std::vector<ViewReference> path;
  path.reserve(static_cast<std::size_t>(horizon));
  EstimatedPose pose = est_pose;
  for (int k = 0; k < horizon; ++k) {
    const auto ref = next_view_reference(scan_world, pose, cfg);
    if (!ref) return std::nullopt;
    path.push_back(*ref);
    pose.position = ref->position;
    pose.yaw = ref->yaw;
  }
  return path;
}

}  // namespace cbf2d
