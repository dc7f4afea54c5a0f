#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbf2d/filter.hpp"
#include "cbf2d/scenario.hpp"

namespace cbf2d {

struct TickRecord {
  double t{0.0};
  Pose2 true_pose{};
  EstimatedPose est_pose{};
  Vec2 goal{0.0, 0.0};
  Vec2 u_nom{0.0, 0.0};
  Vec2 u_star{0.0, 0.0};
  double H{0.0};
  double min_h{0.0};
  Vec2 constraint_g{0.0, 0.0};
  double constraint_b{0.0};
  std::size_t n_constraints{0};
  bool constraint_active{false};
  bool infeasible{false};
  std::int64_t solve_time_ns{0};  // in-memory only, excluded from the CSV
  bool collision{false};
  double penetration{0.0};
};

struct SolveTimeStats {
  double mean_ns{0.0};
  double p99_ns{0.0};
  double max_ns{0.0};
};

// One constraint-count bucket of the solver-time histogram.
struct HistogramBucket {
  std::size_t lo{0};  // covers counts [lo, lo + width)
  std::size_t width{0};
  std::size_t count{0};
  double mean_ns{0.0};
  double std_ns{0.0};

  bool operator==(const HistogramBucket&) const = default;
};

struct RunSummary {
  double min_min_h{0.0};  // NaN when no tick carried constraints
  double max_penetration{0.0};
  bool deadlock{false};
  double total_distance{0.0};
  std::size_t collision_ticks{0};
  std::size_t infeasible_ticks{0};
  SolveTimeStats solve_time;  // QP solve only, constrained ticks
  std::vector<HistogramBucket> histogram;
  std::size_t ticks{0};
};

struct RunResult {
  std::vector<TickRecord> records;
  RunSummary summary;
};

// Barrier evaluation exactly as the tick loop performs it: scan points are
// rotated into the world orientation but kept relative to the robot, so the
// translational part of the pose estimate cannot enter the constraint.
std::optional<BarrierEvaluation> evaluate_tick_barrier(
    const Scan& scan, double est_yaw, double yaw_rate,
    const ScenarioConfig& cfg);

// Per-tick LIDAR seed derived from the scenario seed (splitmix64 step).
std::uint64_t tick_seed(std::uint64_t seed, std::size_t k);

RunResult run_scenario(const ScenarioConfig& cfg);

// True when, for some tick, distance to that tick's goal shrank by less
// than epsilon over the trailing window while still farther than epsilon.
bool deadlock_detector(std::span<const TickRecord> records, double window_s,
                       double epsilon_m);

std::vector<HistogramBucket> solve_time_histogram(
    std::span<const TickRecord> records, std::size_t bucket_width = 100);

// CSV with a fixed header; doubles printed with %.17g so that equal runs
// produce byte-equal logs and values round-trip exactly.
std::string records_to_csv(std::span<const TickRecord> records);
std::vector<TickRecord> records_from_csv(const std::string& text);

std::string summary_to_json(const RunSummary& summary,
                            const ScenarioConfig& cfg);

// Writes <name>.csv and <name>_summary.json under out_dir; returns the CSV
// path. Creates out_dir if needed.
std::filesystem::path write_run_outputs(const ScenarioConfig& cfg,
                                        const RunResult& result,
                                        const std::filesystem::path& out_dir);

}  // namespace cbf2d
