#include "cbf2d/scenario.hpp"

#include <cmath>
#include <limits>

namespace cbf2d {

namespace {

constexpr double kDegToRad = kPi / 180.0;

Segment parse_segment(const toml::Value& v, const std::string& context) {
  const auto& arr = v.as_array(context);
  if (arr.size() != 2) {
    throw ScenarioError(context + ": segment needs two endpoints");
  }
  Segment s{parse_vec2(arr[0], context), parse_vec2(arr[1], context)};
  if ((s.b - s.a).squaredNorm() == 0.0) {
    throw ScenarioError(context + ": zero-length segment");
  }
  return s;
}

std::vector<Segment> parse_segments(const toml::Value::Array& arr,
                                    const std::string& context) {
  std::vector<Segment> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(
        parse_segment(arr[i], context + "[" + std::to_string(i) + "]"));
  }
  return out;
}

DynamicObstacle parse_dynamic(const toml::Value::Table& t,
                              const std::string& context) {
  DynamicObstacle obs;
  obs.segments_local =
      parse_segments(toml::require_array(t, "segments", context), context);

  const toml::Value* knots = toml::find(t, "knots");
  if (!knots) throw ScenarioError(context + ": missing key 'knots'");
  const auto& arr = knots->as_array(context + ".knots");
  if (arr.empty()) throw ScenarioError(context + ": empty trajectory");
  double prev_t = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string kctx = context + ".knots[" + std::to_string(i) + "]";
    const auto& kt = arr[i].as_table(kctx);
    TrajectoryKnot k;
    k.t = toml::require_number(kt, "t", kctx);
    const toml::Value* tr = toml::find(kt, "translation");
    if (!tr) throw ScenarioError(kctx + ": missing key 'translation'");
    k.translation = parse_vec2(*tr, kctx + ".translation");
    k.rotation = toml::get_number(kt, "rotation_deg", 0.0) * kDegToRad;
    if (k.t <= prev_t) {
      throw ScenarioError(kctx + ": knot times must strictly increase");
    }
    prev_t = k.t;
    obs.trajectory.push_back(k);
  }
  return obs;
}

YawMode parse_yaw_mode(const std::string& s, const std::string& context) {
  if (s == "planner") return YawMode::planner;
  if (s == "face_goal") return YawMode::face_goal;
  if (s == "face_velocity") return YawMode::face_velocity;
  throw ScenarioError(context + ": unknown yaw_mode '" + s + "'");
}

FilterMode parse_filter_mode(const std::string& s, const std::string& context) {
  if (s == "composite_ellipse") return FilterMode::composite_ellipse;
  if (s == "baseline_circle") return FilterMode::baseline_circle;
  throw ScenarioError(context + ": unknown filter mode '" + s + "'");
}

void check_positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ScenarioError(what + " must be positive");
  }
}

}  // namespace

Vec2 parse_vec2(const toml::Value& v, const std::string& context) {
  const auto& arr = v.as_array(context);
  if (arr.size() != 2) {
    throw ScenarioError(context + ": expected [x, y]");
  }
  return {arr[0].as_number(context), arr[1].as_number(context)};
}

World load_world(const std::filesystem::path& path) {
  const toml::Value::Table doc = toml::parse_file(path.string());
  const std::string ctx = path.filename().string();

  World world;
  if (const toml::Value* segs = toml::find(doc, "segments")) {
    world.static_segments =
        parse_segments(segs->as_array(ctx + ".segments"), ctx + ".segments");
  }
  if (const toml::Value* dyn = toml::find(doc, "dynamic")) {
    const auto& arr = dyn->as_array(ctx + ".dynamic");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string dctx = ctx + ".dynamic[" + std::to_string(i) + "]";
      world.dynamic_obstacles.push_back(
          parse_dynamic(arr[i].as_table(dctx), dctx));
    }
  }
  return world;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  const toml::Value::Table doc = toml::parse_file(path.string());
  const std::string ctx = path.filename().string();

  ScenarioConfig cfg;
  cfg.name = toml::get_string(doc, "name", path.stem().string());
  cfg.duration = toml::get_number(doc, "duration", 30.0);
  cfg.tick_rate = toml::get_number(doc, "tick_rate", 50.0);
  cfg.seed = static_cast<std::uint64_t>(toml::get_number(doc, "seed", 0.0));
  check_positive(cfg.duration, ctx + ": duration");
  check_positive(cfg.tick_rate, ctx + ": tick_rate");

  const std::string world_rel = toml::require_string(doc, "world", ctx);
  cfg.world_path = path.parent_path() / world_rel;
  if (!std::filesystem::exists(cfg.world_path)) {
    throw ScenarioError(ctx + ": world file not found: " +
                        cfg.world_path.string());
  }
  cfg.world = load_world(cfg.world_path);

  if (const toml::Value* v = toml::find(doc, "robot")) {
    const auto& t = v->as_table(ctx + ".robot");
    if (const toml::Value* s = toml::find(t, "start")) {
      cfg.start.position = parse_vec2(*s, ctx + ".robot.start");
    }
    cfg.start.yaw =
        wrap_angle(toml::get_number(t, "start_yaw_deg", 0.0) * kDegToRad);
    if (const toml::Value* e = toml::find(t, "ellipsoid")) {
      const Vec2 axes = parse_vec2(*e, ctx + ".robot.ellipsoid");
      cfg.ellipsoid.a_x = axes.x();
      cfg.ellipsoid.a_y = axes.y();
    }
    check_positive(cfg.ellipsoid.a_x, ctx + ": ellipsoid a_x");
    check_positive(cfg.ellipsoid.a_y, ctx + ": ellipsoid a_y");
    cfg.omega_max =
        toml::get_number(t, "omega_max_deg", 180.0) * kDegToRad;
    cfg.yaw_gain = toml::get_number(t, "yaw_gain", 4.0);
    cfg.yaw_mode = parse_yaw_mode(
        toml::get_string(t, "yaw_mode", "planner"), ctx + ".robot");
  }

  if (const toml::Value* v = toml::find(doc, "filter")) {
    const auto& t = v->as_table(ctx + ".filter");
    cfg.filter_enabled = toml::get_bool(t, "enabled", true);
    cfg.filter.mode = parse_filter_mode(
        toml::get_string(t, "mode", "composite_ellipse"), ctx + ".filter");
    cfg.filter.alpha_gain = toml::get_number(t, "alpha", 2.0);
    cfg.filter.u_max = toml::get_number(t, "u_max", 1.0);
    cfg.filter.s_d = toml::get_number(t, "s_d", 0.8);
    cfg.composite.kappa = toml::get_number(t, "kappa", 8.0);
    cfg.composite.gamma = toml::get_number(t, "gamma", 0.9);
    check_positive(cfg.filter.alpha_gain, ctx + ": filter.alpha");
    check_positive(cfg.filter.u_max, ctx + ": filter.u_max");
    check_positive(cfg.composite.kappa, ctx + ": filter.kappa");
    check_positive(cfg.composite.gamma, ctx + ": filter.gamma");
    if (cfg.filter.mode == FilterMode::baseline_circle) {
      check_positive(cfg.filter.s_d, ctx + ": filter.s_d");
    }
  }

  if (const toml::Value* v = toml::find(doc, "nominal")) {
    const auto& t = v->as_table(ctx + ".nominal");
    const double kp = toml::get_number(t, "kp", 4.0);
    check_positive(kp, ctx + ": nominal.kp");
    cfg.nominal.kp = Vec2(kp, kp);
  }

  if (const toml::Value* v = toml::find(doc, "planner")) {
    const auto& t = v->as_table(ctx + ".planner");
    cfg.planner_enabled = toml::get_bool(t, "enabled", true);
    cfg.planner.d_view = toml::get_number(t, "d_view", 1.5);
    cfg.planner.gamma_h = toml::get_number(t, "gamma_h", 0.5);
    cfg.planner.gamma_v = toml::get_number(t, "gamma_v", 0.0);
    cfg.planner.fov_h =
        toml::get_number(t, "fov_h_deg", 69.4) * kDegToRad;
    cfg.planner.fov_v =
        toml::get_number(t, "fov_v_deg", 45.0) * kDegToRad;
    cfg.planner.goal_reach_threshold =
        toml::get_number(t, "goal_reach_threshold", 0.3);
    cfg.planner.replan_period = toml::get_number(t, "replan_period", 1.0);
    cfg.planner.sweep_right = toml::get_bool(t, "sweep_right", false);
    check_positive(cfg.planner.d_view, ctx + ": planner.d_view");
    if (cfg.planner.gamma_h < 0.0 || cfg.planner.gamma_h >= 1.0) {
      throw ScenarioError(ctx + ": planner.gamma_h must be in [0, 1)");
    }
    if (!(cfg.planner.fov_h > 0.0) || cfg.planner.fov_h >= kPi) {
      throw ScenarioError(ctx + ": planner.fov_h_deg must be in (0, 180)");
    }
  }

  if (const toml::Value* v = toml::find(doc, "goal")) {
    const auto& t = v->as_table(ctx + ".goal");
    if (const toml::Value* w = toml::find(t, "waypoints")) {
      const auto& arr = w->as_array(ctx + ".goal.waypoints");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        cfg.waypoints.push_back(parse_vec2(
            arr[i], ctx + ".goal.waypoints[" + std::to_string(i) + "]"));
      }
    }
  }
  if (!cfg.planner_enabled && cfg.waypoints.empty()) {
    throw ScenarioError(ctx +
                        ": planner disabled but no goal.waypoints given");
  }

  if (const toml::Value* v = toml::find(doc, "lidar")) {
    const auto& t = v->as_table(ctx + ".lidar");
    cfg.lidar.n_beams =
        static_cast<int>(toml::get_number(t, "n_beams", 720.0));
    cfg.lidar.max_range = toml::get_number(t, "max_range", 3.5);
    cfg.lidar.angular_span =
        toml::get_number(t, "angular_span_deg", 360.0) * kDegToRad;
    cfg.lidar.range_noise_std =
        toml::get_number(t, "range_noise_std", 0.0);
    if (cfg.lidar.n_beams < 1) {
      throw ScenarioError(ctx + ": lidar.n_beams must be >= 1");
    }
    check_positive(cfg.lidar.max_range, ctx + ": lidar.max_range");
  }

  if (const toml::Value* v = toml::find(doc, "fault")) {
    const auto& t = v->as_table(ctx + ".fault");
    OdometryFault f;
    f.trigger_time = toml::require_number(t, "trigger_time", ctx + ".fault");
    if (const toml::Value* o = toml::find(t, "position_offset")) {
      f.position_offset = parse_vec2(*o, ctx + ".fault.position_offset");
    }
    f.yaw_offset = toml::get_number(t, "yaw_offset_deg", 0.0) * kDegToRad;
    if (const toml::Value* d = toml::find(t, "drift_rate")) {
      f.drift_rate = parse_vec2(*d, ctx + ".fault.drift_rate");
    }
    cfg.fault = f;
  }

  if (const toml::Value* v = toml::find(doc, "audit")) {
    const auto& t = v->as_table(ctx + ".audit");
    cfg.collision_tolerance =
        toml::get_number(t, "collision_tolerance", 0.02);
    cfg.deadlock_window = toml::get_number(t, "deadlock_window", 5.0);
    cfg.deadlock_epsilon = toml::get_number(t, "deadlock_epsilon", 0.05);
  }

  if (const toml::Value* v = toml::find(doc, "suite")) {
    const auto& t = v->as_table(ctx + ".suite");
    SuiteExpectation e;
    e.expect = toml::require_string(t, "expect", ctx + ".suite");
    if (e.expect != "safe" && e.expect != "cross" && e.expect != "deadlock") {
      throw ScenarioError(ctx + ": suite.expect must be safe|cross|deadlock");
    }
    e.cross_x = toml::get_number(t, "cross_x", 0.0);
    cfg.suite = e;
  }

  return cfg;
}

}  // namespace cbf2d
