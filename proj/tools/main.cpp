#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cbf2d/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cbf2d: planar LIDAR CBF safety filter and simulator"};
  app.require_subcommand(1);

  // run
  std::string scenario_path;
  std::string out_dir = "out";
  cbf2d::RunOverrides ov;
  double kappa = 0, gamma = 0, alpha = 0, u_max = 0;
  std::string mode;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "execute one scenario");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  run->add_option("-o,--out", out_dir, "output directory");
  auto* f_kappa = run->add_option("--kappa", kappa, "soft-min sharpness");
  auto* f_gamma = run->add_option("--gamma", gamma, "tanh saturation scale");
  auto* f_alpha = run->add_option("--alpha", alpha, "class-K slope");
  auto* f_umax = run->add_option("--u-max", u_max, "velocity box bound");
  auto* f_mode = run->add_option(
      "--mode", mode, "composite_ellipse | baseline_circle | off");
  auto* f_seed = run->add_option("--seed", seed, "simulation seed");

  // bench
  std::vector<std::size_t> bench_points{800, 1300};
  std::size_t bench_reps = 1000;
  std::uint64_t bench_seed = 1;
  std::string bench_json;
  auto* bench = app.add_subcommand("bench", "latency benchmark");
  bench->add_option("--points", bench_points,
                    "constraint counts to benchmark");
  bench->add_option("--reps", bench_reps, "repetitions per count");
  bench->add_option("--seed", bench_seed, "instance seed");
  bench->add_option("--json", bench_json, "also write a JSON report here");

  // plot
  std::string plot_input, plot_kind = "velocities", plot_output, plot_world;
  auto* plot = app.add_subcommand("plot", "render an SVG from a run log");
  plot->add_option("log", plot_input, "run CSV")->required();
  plot->add_option("-k,--kind", plot_kind,
                   "velocities | barrier_values | trajectory | solver_time");
  plot->add_option("-o,--out", plot_output, "output SVG path");
  plot->add_option("--world", plot_world,
                   "world file to overlay (trajectory only)");

  // suite
  std::string suite_dir = "scenarios";
  std::string suite_out = "out";
  auto* suite = app.add_subcommand(
      "suite", "run all shipped scenarios and check expectations");
  suite->add_option("dir", suite_dir, "scenario directory");
  suite->add_option("-o,--out", suite_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cbf2d::kExitConfigError;
  }

  if (run->parsed()) {
    if (*f_kappa) ov.kappa = kappa;
    if (*f_gamma) ov.gamma = gamma;
    if (*f_alpha) ov.alpha = alpha;
    if (*f_umax) ov.u_max = u_max;
    if (*f_mode) ov.mode = mode;
    if (*f_seed) ov.seed = seed;
    return cbf2d::cmd_run(scenario_path, out_dir, ov);
  }
  if (bench->parsed()) {
    std::optional<std::filesystem::path> json_out;
    if (!bench_json.empty()) json_out = bench_json;
    return cbf2d::cmd_bench(bench_points, bench_reps, bench_seed, json_out,
                            std::cout);
  }
  if (plot->parsed()) {
    cbf2d::PlotSpec spec;
    spec.input_csv = plot_input;
    try {
      spec.kind = cbf2d::parse_plot_kind(plot_kind);
    } catch (const cbf2d::ScenarioError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return cbf2d::kExitConfigError;
    }
    spec.output_svg =
        plot_output.empty()
            ? std::filesystem::path(plot_input).replace_extension(".svg")
            : std::filesystem::path(plot_output);
    if (!plot_world.empty()) spec.world = plot_world;
    return cbf2d::cmd_plot(spec);
  }
  return cbf2d::cmd_suite(suite_dir, suite_out, std::cout);
}
