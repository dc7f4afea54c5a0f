#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cbf2d/core.hpp"
#include "cbf2d/filter.hpp"
#include "cbf2d/planner.hpp"
#include "cbf2d/sim.hpp"
#include "cbf2d/toml.hpp"

namespace cbf2d {

// Where the commanded yaw comes from each tick.
enum class YawMode {
  planner,        // track the view reference's yaw
  face_goal,      // look at the current goal point
  face_velocity,  // look along the filtered velocity
};

// Expectations the suite command checks per scenario; empty = none.
struct SuiteExpectation {
  std::string expect;   // "safe" | "cross" | "deadlock"
  double cross_x{0.0};  // traversal line for "cross"/"deadlock"
};

struct ScenarioConfig {
  std::string name;
  std::filesystem::path world_path;
  World world;

  Pose2 start{};
  SafetyEllipsoid ellipsoid{};
  double omega_max{kPi};
  double yaw_gain{4.0};
  YawMode yaw_mode{YawMode::planner};

  bool filter_enabled{true};
  FilterConfig filter{};
  CompositeParams composite{};
  NominalConfig nominal{};

  bool planner_enabled{true};
  PlannerConfig planner{};
  std::vector<Vec2> waypoints;  // tracked when the planner is disabled

  LidarConfig lidar{};
  std::optional<OdometryFault> fault;

  double duration{30.0};
  double tick_rate{50.0};
  std::uint64_t seed{0};

  // Audit knobs: the collision flag fires above this sampled penetration
  // (tangency at 1 cm sampling resolution stays below it).
  double collision_tolerance{0.02};
  double deadlock_window{5.0};
  double deadlock_epsilon{0.05};

  std::optional<SuiteExpectation> suite;
};

World load_world(const std::filesystem::path& path);
ScenarioConfig load_scenario(const std::filesystem::path& path);

// Shared by loaders and tests: a [x, y] array as a vector.
Vec2 parse_vec2(const toml::Value& v, const std::string& context);

}  // namespace cbf2d
