#include "cbf2d/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cbf2d/filter.hpp"

namespace cbf2d {

namespace {

BenchTimings timings_from(std::vector<double> samples) {
  BenchTimings t;
  if (samples.empty()) return t;
  double sum = 0.0;
  for (const double v : samples) sum += v;
  t.mean_ns = sum / static_cast<double>(samples.size());
  std::sort(samples.begin(), samples.end());
  const auto idx = static_cast<std::size_t>(
      std::ceil(0.99 * static_cast<double>(samples.size())));
  t.p99_ns = samples[std::min(idx, samples.size()) - 1];
  t.max_ns = samples.back();
  return t;
}

}  // namespace

std::vector<Vec2> corridor_scan(std::size_t n_points, double half_width,
                                double max_range, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.02, 0.02);

  // Wall extent so every return stays inside the range cap.
  const double reach =
      std::sqrt(std::max(max_range * max_range - half_width * half_width,
                         0.25));
  std::vector<Vec2> points;
  points.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const bool top = (i % 2) == 0;
    const std::size_t j = i / 2;
    const std::size_t per_wall = (n_points + 1) / 2;
    const double x =
        -reach + 2.0 * reach * (static_cast<double>(j) /
                                std::max<std::size_t>(per_wall - 1, 1));
    const double y = top ? half_width : -half_width;
    points.emplace_back(x + jitter(rng), y + jitter(rng));
  }
  return points;
}

BenchReport run_bench(std::size_t n_points, std::size_t repetitions,
                      std::uint64_t seed) {
  using clock = std::chrono::steady_clock;

  const std::vector<Vec2> scan = corridor_scan(n_points, 1.0, 3.5, seed);
  const SafetyEllipsoid ellipsoid{0.9, 0.6, {}};
  const CompositeParams params;
  FilterConfig fcfg;

  std::mt19937_64 rng(seed ^ 0xB5297A4D3F84D5A3ull);
  std::uniform_real_distribution<double> yaw_dist(-kPi, kPi);
  std::uniform_real_distribution<double> rate_dist(-1.5, 1.5);
  std::uniform_real_distribution<double> u_dist(-4.0, 4.0);

  std::vector<double> barrier_ns, qp_ns;
  barrier_ns.reserve(repetitions);
  qp_ns.reserve(repetitions);

  double sink = 0.0;
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    const double yaw = yaw_dist(rng);
    const double yaw_rate = rate_dist(rng);
    const Vec2 u_nom(u_dist(rng), u_dist(rng));

    const auto b0 = clock::now();
    const Mat2 q = shape_matrix_world(ellipsoid, yaw);
    const Mat2 q_dot = shape_matrix_rate(ellipsoid, yaw, yaw_rate);
    const auto eval =
        composite_evaluate(scan, Vec2::Zero(), q, q_dot, params);
    const auto b1 = clock::now();
    barrier_ns.push_back(static_cast<double>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(b1 - b0)
            .count()));

    if (eval) {
      const auto q0 = clock::now();
      const FilterOutput out = solve_safety_qp(u_nom, *eval, fcfg);
      const auto q1 = clock::now();
      qp_ns.push_back(static_cast<double>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(q1 - q0)
              .count()));
      sink += out.u_star.x() + eval->H;
    }
  }
  // Keep the optimizer from dropping the timed work.
  volatile double guard = sink;
  (void)guard;

  BenchReport report;
  report.n_points = n_points;
  report.repetitions = repetitions;
  report.barrier = timings_from(std::move(barrier_ns));
  report.qp = timings_from(std::move(qp_ns));
  report.combined_mean_ns = report.barrier.mean_ns + report.qp.mean_ns;
  return report;
}

std::string bench_to_json(std::span<const BenchReport> reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const BenchReport& r : reports) {
    arr.push_back({
        {"n_points", r.n_points},
        {"repetitions", r.repetitions},
        {"barrier_ns",
         {{"mean", r.barrier.mean_ns},
          {"p99", r.barrier.p99_ns},
          {"max", r.barrier.max_ns}}},
        {"qp_ns",
         {{"mean", r.qp.mean_ns},
          {"p99", r.qp.p99_ns},
          {"max", r.qp.max_ns}}},
        {"combined_mean_ns", r.combined_mean_ns},
    });
  }
  return arr.dump(2) + "\n";
}

std::string bench_table(std::span<const BenchReport> reports) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%8s %10s %12s %12s %12s %12s %14s\n",
                "points", "reps", "barrier mean", "barrier p99", "qp mean",
                "qp p99", "combined mean");
  os << buf;
  for (const BenchReport& r : reports) {
    std::snprintf(buf, sizeof(buf),
                  "%8zu %10zu %9.1f us %9.1f us %9.2f us %9.2f us %11.1f us\n",
                  r.n_points, r.repetitions, r.barrier.mean_ns / 1e3,
                  r.barrier.p99_ns / 1e3, r.qp.mean_ns / 1e3,
                  r.qp.p99_ns / 1e3, r.combined_mean_ns / 1e3);
    os << buf;
  }
  return os.str();
}

}  // namespace cbf2d
