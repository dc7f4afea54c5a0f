#include "cbf2d/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>

#include "cbf2d/bench.hpp"
#include "cbf2d/runner.hpp"

namespace cbf2d {

namespace {

void info(const std::string& msg) {
  if (log_enabled()) std::cerr << "[cbf2d] " << msg << "\n";
}

double max_true_x(const std::vector<TickRecord>& records) {
  double m = -std::numeric_limits<double>::infinity();
  for (const TickRecord& r : records) {
    m = std::max(m, r.true_pose.position.x());
  }
  return m;
}

struct SuiteRow {
  std::string name;
  std::string expectation;
  bool pass{false};
  std::string detail;
};

SuiteRow evaluate_expectation(const ScenarioConfig& cfg,
                              const RunResult& result) {
  SuiteRow row;
  row.name = cfg.name;
  const SuiteExpectation exp =
      cfg.suite.value_or(SuiteExpectation{"safe", 0.0});
  row.expectation = exp.expect;

  const RunSummary& s = result.summary;
  char buf[160];
  if (exp.expect == "cross") {
    const double mx = max_true_x(result.records);
    row.pass = s.collision_ticks == 0 && mx >= exp.cross_x;
    std::snprintf(buf, sizeof(buf),
                  "max_x=%.2f (need >= %.2f), collisions=%zu", mx,
                  exp.cross_x, s.collision_ticks);
  } else if (exp.expect == "deadlock") {
    const double mx = max_true_x(result.records);
    row.pass = s.deadlock && s.collision_ticks == 0 && mx < exp.cross_x;
    std::snprintf(buf, sizeof(buf),
                  "deadlock=%d, max_x=%.2f (need < %.2f), collisions=%zu",
                  s.deadlock ? 1 : 0, mx, exp.cross_x, s.collision_ticks);
  } else {
    row.pass = s.collision_ticks == 0;
    std::snprintf(buf, sizeof(buf), "collisions=%zu, max_pen=%.4f",
                  s.collision_ticks, s.max_penetration);
  }
  row.detail = buf;
  return row;
}

}  // namespace

bool log_enabled() {
  const char* v = std::getenv("CBF2D_LOG");
  return v == nullptr || std::string(v) != "quiet";
}

void apply_overrides(ScenarioConfig& cfg, const RunOverrides& ov) {
  if (ov.kappa) cfg.composite.kappa = *ov.kappa;
  if (ov.gamma) cfg.composite.gamma = *ov.gamma;
  if (ov.alpha) cfg.filter.alpha_gain = *ov.alpha;
  if (ov.u_max) cfg.filter.u_max = *ov.u_max;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.mode) {
    if (*ov.mode == "composite_ellipse") {
      cfg.filter.mode = FilterMode::composite_ellipse;
    } else if (*ov.mode == "baseline_circle") {
      cfg.filter.mode = FilterMode::baseline_circle;
    } else if (*ov.mode == "off") {
      cfg.filter_enabled = false;
    } else {
      throw ScenarioError("unknown --mode '" + *ov.mode +
                          "' (composite_ellipse|baseline_circle|off)");
    }
  }
  if (cfg.composite.kappa <= 0.0 || cfg.composite.gamma <= 0.0 ||
      cfg.filter.alpha_gain <= 0.0 || cfg.filter.u_max <= 0.0) {
    throw ScenarioError("overridden parameters must be positive");
  }
}

int cmd_run(const std::filesystem::path& scenario_path,
            const std::filesystem::path& out_dir, const RunOverrides& ov) {
  ScenarioConfig cfg;
  try {
    cfg = load_scenario(scenario_path);
    apply_overrides(cfg, ov);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  const RunResult result = run_scenario(cfg);
  try {
    write_run_outputs(cfg, result, out_dir);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "%s: %zu ticks, distance %.2f m, min h %.3f, max pen %.4f, "
                "collisions %zu, deadlock %d",
                cfg.name.c_str(), result.summary.ticks,
                result.summary.total_distance, result.summary.min_min_h,
                result.summary.max_penetration,
                result.summary.collision_ticks,
                result.summary.deadlock ? 1 : 0);
  info(buf);

  return result.summary.collision_ticks > 0 ? kExitCollision : kExitOk;
}

int cmd_bench(const std::vector<std::size_t>& n_points_list,
              std::size_t repetitions, std::uint64_t seed,
              const std::optional<std::filesystem::path>& json_out,
              std::ostream& out) {
  if (repetitions < 100) {
    std::cerr << "error: bench needs at least 100 repetitions\n";
    return kExitConfigError;
  }
  std::vector<BenchReport> reports;
  reports.reserve(n_points_list.size());
  for (const std::size_t n : n_points_list) {
    info("bench: " + std::to_string(n) + " points");
    reports.push_back(run_bench(n, repetitions, seed));
  }
  out << bench_table(reports);
  if (json_out) {
    std::ofstream f(*json_out, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write " << json_out->string() << "\n";
      return kExitConfigError;
    }
    f << bench_to_json(reports);
  }
  return kExitOk;
}

int cmd_plot(const PlotSpec& spec) {
  try {
    render_plot(spec);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}

int cmd_suite(const std::filesystem::path& scenario_dir,
              const std::filesystem::path& out_dir, std::ostream& out) {
  std::vector<std::filesystem::path> files;
  try {
    for (const auto& entry :
         std::filesystem::directory_iterator(scenario_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".toml") {
        files.push_back(entry.path());
      }
    }
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  if (files.empty()) {
    std::cerr << "error: no scenario files in " << scenario_dir.string()
              << "\n";
    return kExitConfigError;
  }
  std::sort(files.begin(), files.end());

  bool all_pass = true;
  out << "scenario                     expect     verdict  detail\n";
  for (const auto& path : files) {
    SuiteRow row;
    try {
      const ScenarioConfig cfg = load_scenario(path);
      info("suite: running " + cfg.name);
      const RunResult result = run_scenario(cfg);
      write_run_outputs(cfg, result, out_dir);
      row = evaluate_expectation(cfg, result);
    } catch (const ScenarioError& e) {
      row.name = path.stem().string();
      row.expectation = "-";
      row.pass = false;
      row.detail = e.what();
    }
    all_pass = all_pass && row.pass;
    char buf[320];
    std::snprintf(buf, sizeof(buf), "%-28s %-10s %-8s %s\n", row.name.c_str(),
                  row.expectation.c_str(), row.pass ? "PASS" : "FAIL",
                  row.detail.c_str());
    out << buf;
  }
  return all_pass ? kExitOk : kExitConfigError;
}

}  // namespace cbf2d
