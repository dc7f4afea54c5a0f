#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cbf2d/core.hpp"

namespace cbf2d {

struct PlannerConfig {
  double d_view{1.5};   // desired viewing distance to the surface
  double gamma_h{0.5};  // horizontal overlap fraction in [0, 1)
  double gamma_v{0.0};  // vertical overlap, carried but unused in planar runs
  double fov_h{69.4 * kPi / 180.0};
  double fov_v{45.0 * kPi / 180.0};  // unused in planar runs
  double goal_reach_threshold{0.3};  // replan when this close to the goal
  double replan_period{1.0};         // or at latest this often, seconds
  bool sweep_right{false};           // flip the lateral sweep direction
};

struct ViewReference {
  Vec2 position{0.0, 0.0};
  double yaw{0.0};
};

// Scan point closest to est_pos, ties broken by lowest index. Empty scan
// has no answer; the caller holds its previous reference.
std::optional<Vec2> nearest_surface_point(std::span<const Vec2> scan_world,
                                          const Vec2& est_pos);

// One inspection-sweep step: approach the nearest surface to d_view while
// translating sideways far enough that successive camera footprints overlap
// by gamma_h. Yaw faces the surface. Returns nothing when the scan is empty
// or the nearest point sits on top of the robot (direction undefined).
std::optional<ViewReference> next_view_reference(
    std::span<const Vec2> scan_world, const EstimatedPose& est_pose,
    const PlannerConfig& cfg);

// Recursive preview of the sweep against the frozen current scan. Only the
// first entry is tracked; the rest exist for inspection and tests.
std::optional<std::vector<ViewReference>> plan_horizon(
    std::span<const Vec2> scan_world, const EstimatedPose& est_pose,
    const PlannerConfig& cfg, int horizon);

}  // namespace cbf2d
