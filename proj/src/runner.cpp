#include "cbf2d/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "cbf2d/planner.hpp"
#include "cbf2d/sim.hpp"

namespace cbf2d {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Yaw that looks from the estimate toward a target; holds the current yaw
// when the target is too close to define a bearing.
double bearing_or_hold(const Vec2& target, const EstimatedPose& est) {
  const Vec2 d = target - est.position;
  if (d.norm() < 0.05) return est.yaw;
  return std::atan2(d.y(), d.x());
}

}  // namespace

std::uint64_t tick_seed(std::uint64_t seed, std::size_t k) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::optional<BarrierEvaluation> evaluate_tick_barrier(
    const Scan& scan, double est_yaw, double yaw_rate,
    const ScenarioConfig& cfg) {
  const EstimatedPose centered{Vec2::Zero(), est_yaw};
  const std::vector<Vec2> offsets = body_to_world(scan.points_body, centered);
  if (cfg.filter.mode == FilterMode::composite_ellipse) {
    const Mat2 q = shape_matrix_world(cfg.ellipsoid, est_yaw);
    const Mat2 q_dot = shape_matrix_rate(cfg.ellipsoid, est_yaw, yaw_rate);
    return composite_evaluate(offsets, Vec2::Zero(), q, q_dot, cfg.composite);
  }
  return baseline_circle_constraints(offsets, Vec2::Zero(), cfg.filter.s_d,
                                     cfg.composite);
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  const double dt = 1.0 / cfg.tick_rate;
  const auto n_ticks =
      static_cast<std::size_t>(std::llround(cfg.duration * cfg.tick_rate));

  RobotState state;
  state.true_pose = cfg.start;

  std::optional<ViewReference> view_ref;
  double last_plan_t = -std::numeric_limits<double>::infinity();
  std::size_t wp_index = 0;

  std::vector<TickRecord> records;
  records.reserve(n_ticks);

  for (std::size_t k = 0; k < n_ticks; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Scan scan = raycast_scan(cfg.world, state.true_pose, t, cfg.lidar,
                                   tick_seed(cfg.seed, k));

    EstimatedPose est{state.true_pose.position, state.true_pose.yaw};
    if (cfg.fault) est = apply_odometry_fault(est, *cfg.fault, t);

    Vec2 goal;
    if (cfg.planner_enabled) {
      const std::vector<Vec2> scan_world =
          body_to_world(scan.points_body, est);
      const bool due =
          !view_ref ||
          (est.position - view_ref->position).norm() <
              cfg.planner.goal_reach_threshold ||
          (t - last_plan_t) >= cfg.planner.replan_period;
      if (due) {
        if (const auto ref = next_view_reference(scan_world, est, cfg.planner)) {
          view_ref = ref;
          last_plan_t = t;
        }
      }
      // Nothing visible yet (open space): hold position until a surface
      // appears.
      if (!view_ref) view_ref = ViewReference{est.position, est.yaw};
      goal = view_ref->position;
    } else {
      if (wp_index + 1 < cfg.waypoints.size() &&
          (cfg.waypoints[wp_index] - est.position).norm() <
              cfg.planner.goal_reach_threshold) {
        ++wp_index;
      }
      goal = cfg.waypoints[wp_index];
    }

    const Vec2 u_nom = nominal_velocity(goal, est.position, cfg.nominal);
    const auto eval = evaluate_tick_barrier(scan, est.yaw, state.yaw_rate, cfg);
    const FilterOutput out = (cfg.filter_enabled && eval)
                                 ? solve_safety_qp(u_nom, *eval, cfg.filter)
                                 : passthrough_output(u_nom, cfg.filter);

    double yaw_cmd = est.yaw;
    switch (cfg.yaw_mode) {
      case YawMode::planner:
        yaw_cmd = (cfg.planner_enabled && view_ref) ? view_ref->yaw
                                                    : bearing_or_hold(goal, est);
        break;
      case YawMode::face_goal:
        yaw_cmd = bearing_or_hold(goal, est);
        break;
      case YawMode::face_velocity:
        yaw_cmd = out.u_star.norm() > 0.05
                      ? std::atan2(out.u_star.y(), out.u_star.x())
                      : est.yaw;
        break;
    }

    const CollisionReport col =
        collision_check(cfg.world, state.true_pose, cfg.ellipsoid, t);

    TickRecord rec;
    rec.t = t;
    rec.true_pose = state.true_pose;
    rec.est_pose = est;
    rec.goal = goal;
    rec.u_nom = out.u_nom;
    rec.u_star = out.u_star;
    rec.H = out.H;
    rec.min_h = out.min_h;
    rec.constraint_g = out.constraint_g;
    rec.constraint_b = out.constraint_b;
    rec.n_constraints = out.n_constraints;
    rec.constraint_active = out.constraint_active;
    rec.infeasible = out.infeasible;
    rec.solve_time_ns = out.solve_time_ns;
    rec.penetration = col.penetration;
    rec.collision = col.penetration > cfg.collision_tolerance;
    records.push_back(rec);

    state = step_dynamics(state, out.u_star, yaw_cmd, dt, cfg.omega_max,
                          cfg.yaw_gain);
  }

  RunSummary s;
  s.ticks = records.size();
  s.min_min_h = kNaN;
  std::vector<double> solve_ns;
  solve_ns.reserve(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    const TickRecord& r = records[k];
    if (r.n_constraints > 0) {
      if (std::isnan(s.min_min_h) || r.min_h < s.min_min_h) {
        s.min_min_h = r.min_h;
      }
      solve_ns.push_back(static_cast<double>(r.solve_time_ns));
    }
    s.max_penetration = std::max(s.max_penetration, r.penetration);
    if (r.collision) ++s.collision_ticks;
    if (r.infeasible) ++s.infeasible_ticks;
    if (k > 0) {
      s.total_distance +=
          (r.true_pose.position - records[k - 1].true_pose.position).norm();
    }
  }
  if (!solve_ns.empty()) {
    double sum = 0.0;
    for (const double v : solve_ns) sum += v;
    s.solve_time.mean_ns = sum / static_cast<double>(solve_ns.size());
    std::vector<double> sorted = solve_ns;
    std::sort(sorted.begin(), sorted.end());
    const auto idx = static_cast<std::size_t>(
        std::ceil(0.99 * static_cast<double>(sorted.size())));
    s.solve_time.p99_ns = sorted[std::min(idx, sorted.size()) - 1];
    s.solve_time.max_ns = sorted.back();
  }
  s.deadlock =
      deadlock_detector(records, cfg.deadlock_window, cfg.deadlock_epsilon);
  s.histogram = solve_time_histogram(records);

  return {std::move(records), std::move(s)};
}

bool deadlock_detector(std::span<const TickRecord> records, double window_s,
                       double epsilon_m) {
  if (records.size() < 2) return false;
  const double dt = records[1].t - records[0].t;
  if (dt <= 0.0) return false;
  const auto w = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(window_s / dt)));
  if (w >= records.size()) return false;

  for (std::size_t k = w; k < records.size(); ++k) {
    // Distance to the *current* goal now vs. one window ago, so replan
    // jumps in the goal cannot fake or mask progress.
    const Vec2 goal = records[k].goal;
    const double d_now = (goal - records[k].true_pose.position).norm();
    const double d_then = (goal - records[k - w].true_pose.position).norm();
    if (d_now > epsilon_m && d_then - d_now < epsilon_m) return true;
  }
  return false;
}

std::vector<HistogramBucket> solve_time_histogram(
    std::span<const TickRecord> records, std::size_t bucket_width) {
  std::map<std::size_t, std::vector<double>> groups;
  for (const TickRecord& r : records) {
    if (r.n_constraints == 0) continue;
    groups[r.n_constraints / bucket_width].push_back(
        static_cast<double>(r.solve_time_ns));
  }
  std::vector<HistogramBucket> out;
  out.reserve(groups.size());
  for (const auto& [key, samples] : groups) {
    HistogramBucket b;
    b.lo = key * bucket_width;
    b.width = bucket_width;
    b.count = samples.size();
    double sum = 0.0;
    for (const double v : samples) sum += v;
    b.mean_ns = sum / static_cast<double>(samples.size());
    double sq = 0.0;
    for (const double v : samples) sq += (v - b.mean_ns) * (v - b.mean_ns);
    b.std_ns = std::sqrt(sq / static_cast<double>(samples.size()));
    out.push_back(b);
  }
  return out;
}

namespace {

void append_g17(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

// The measured QP latency is deliberately absent: it is the one per-tick
// quantity that cannot replay byte-for-byte. Timing statistics live in the
// summary JSON instead.
const char* const kCsvHeader =
    "t,true_x,true_y,true_yaw,est_x,est_y,est_yaw,goal_x,goal_y,"
    "u_nom_x,u_nom_y,u_star_x,u_star_y,H,min_h,g_x,g_y,b,"
    "n_constraints,constraint_active,infeasible,collision,penetration";

std::string records_to_csv(std::span<const TickRecord> records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const TickRecord& r : records) {
    const double doubles[] = {r.t,
                              r.true_pose.position.x(),
                              r.true_pose.position.y(),
                              r.true_pose.yaw,
                              r.est_pose.position.x(),
                              r.est_pose.position.y(),
                              r.est_pose.yaw,
                              r.goal.x(),
                              r.goal.y(),
                              r.u_nom.x(),
                              r.u_nom.y(),
                              r.u_star.x(),
                              r.u_star.y(),
                              r.H,
                              r.min_h,
                              r.constraint_g.x(),
                              r.constraint_g.y(),
                              r.constraint_b};
    for (const double v : doubles) {
      append_g17(out, v);
      out += ',';
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%zu,%d,%d,%d,", r.n_constraints,
                  r.constraint_active ? 1 : 0, r.infeasible ? 1 : 0,
                  r.collision ? 1 : 0);
    out += buf;
    append_g17(out, r.penetration);
    out += '\n';
  }
  return out;
}

std::vector<TickRecord> records_from_csv(const std::string& text) {
  std::vector<TickRecord> out;
  std::size_t pos = text.find('\n');
  if (pos == std::string::npos) {
    throw ScenarioError("log: missing CSV header");
  }
  if (text.substr(0, pos) != kCsvHeader) {
    throw ScenarioError("log: unrecognized CSV header");
  }
  ++pos;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;

    double f[23];
    int n = 0;
    const char* p = line.c_str();
    while (n < 23) {
      char* end = nullptr;
      f[n] = std::strtod(p, &end);
      if (end == p) throw ScenarioError("log: malformed CSV row");
      ++n;
      if (*end == ',') {
        p = end + 1;
      } else {
        p = end;
        break;
      }
    }
    if (n != 23) throw ScenarioError("log: wrong CSV column count");

    TickRecord r;
    r.t = f[0];
    r.true_pose.position = {f[1], f[2]};
    r.true_pose.yaw = f[3];
    r.est_pose.position = {f[4], f[5]};
    r.est_pose.yaw = f[6];
    r.goal = {f[7], f[8]};
    r.u_nom = {f[9], f[10]};
    r.u_star = {f[11], f[12]};
    r.H = f[13];
    r.min_h = f[14];
    r.constraint_g = {f[15], f[16]};
    r.constraint_b = f[17];
    r.n_constraints = static_cast<std::size_t>(f[18]);
    r.constraint_active = f[19] != 0.0;
    r.infeasible = f[20] != 0.0;
    r.collision = f[21] != 0.0;
    r.penetration = f[22];
    out.push_back(r);
  }
  return out;
}

std::string summary_to_json(const RunSummary& summary,
                            const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["scenario"] = cfg.name;
  j["seed"] = cfg.seed;
  j["duration_s"] = cfg.duration;
  j["tick_rate_hz"] = cfg.tick_rate;
  j["filter"] = {
      {"enabled", cfg.filter_enabled},
      {"mode", cfg.filter.mode == FilterMode::composite_ellipse
                   ? "composite_ellipse"
                   : "baseline_circle"},
      {"alpha", cfg.filter.alpha_gain},
      {"u_max", cfg.filter.u_max},
      {"kappa", cfg.composite.kappa},
      {"gamma", cfg.composite.gamma},
      {"s_d", cfg.filter.s_d},
      {"ellipsoid", {cfg.ellipsoid.a_x, cfg.ellipsoid.a_y}},
  };
  j["ticks"] = summary.ticks;
  j["min_min_h"] = std::isnan(summary.min_min_h)
                       ? nlohmann::json()
                       : nlohmann::json(summary.min_min_h);
  j["max_penetration"] = summary.max_penetration;
  j["deadlock"] = summary.deadlock;
  j["total_distance_m"] = summary.total_distance;
  j["collision_ticks"] = summary.collision_ticks;
  j["infeasible_ticks"] = summary.infeasible_ticks;
  j["solve_time_ns"] = {{"mean", summary.solve_time.mean_ns},
                        {"p99", summary.solve_time.p99_ns},
                        {"max", summary.solve_time.max_ns}};
  nlohmann::json hist = nlohmann::json::array();
  for (const HistogramBucket& b : summary.histogram) {
    hist.push_back({{"constraints_lo", b.lo},
                    {"constraints_hi", b.lo + b.width},
                    {"count", b.count},
                    {"mean_ns", b.mean_ns},
                    {"std_ns", b.std_ns}});
  }
  j["solve_time_by_constraints"] = hist;
  return j.dump(2) + "\n";
}

std::filesystem::path write_run_outputs(const ScenarioConfig& cfg,
                                        const RunResult& result,
                                        const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path csv_path = out_dir / (cfg.name + ".csv");
  {
    std::ofstream f(csv_path, std::ios::binary);
    if (!f) throw ScenarioError("cannot write " + csv_path.string());
    f << records_to_csv(result.records);
  }
  const std::filesystem::path json_path =
      out_dir / (cfg.name + "_summary.json");
  {
    std::ofstream f(json_path, std::ios::binary);
    if (!f) throw ScenarioError("cannot write " + json_path.string());
    f << summary_to_json(result.summary, cfg);
  }
  return csv_path;
}

}  // namespace cbf2d
