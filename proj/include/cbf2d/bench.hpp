#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cbf2d/core.hpp"

namespace cbf2d {

struct BenchTimings {
  double mean_ns{0.0};
  double p99_ns{0.0};
  double max_ns{0.0};
};

struct BenchReport {
  std::size_t n_points{0};
  std::size_t repetitions{0};
  BenchTimings barrier;  // composite evaluation over the full scan
  BenchTimings qp;       // closed-form QP solve
  double combined_mean_ns{0.0};
};

// Corridor-like scan: two parallel walls at +-half_width, n_points returns
// inside max_range, with seeded positional jitter. Points are world-frame
// offsets from the robot (robot at the origin).
std::vector<Vec2> corridor_scan(std::size_t n_points, double half_width,
                                double max_range, std::uint64_t seed);

// Times barrier evaluation and QP solve separately over `repetitions`
// randomized ellipse orientations and nominal commands against one fixed
// scan. The scan (and the random instance stream) depends only on the
// seed, so repeated invocations time identical work.
BenchReport run_bench(std::size_t n_points, std::size_t repetitions,
                      std::uint64_t seed);

std::string bench_to_json(std::span<const BenchReport> reports);
std::string bench_table(std::span<const BenchReport> reports);

}  // namespace cbf2d
