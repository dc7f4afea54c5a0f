#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cbf2d/plot.hpp"
#include "cbf2d/scenario.hpp"

namespace cbf2d {

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitCollision = 2;

// Command-line parameter overrides; flags win over the scenario file.
struct RunOverrides {
  std::optional<double> kappa;
  std::optional<double> gamma;
  std::optional<double> alpha;
  std::optional<double> u_max;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
};

void apply_overrides(ScenarioConfig& cfg, const RunOverrides& ov);

// Verbosity gate driven by the CBF2D_LOG environment variable ("quiet"
// suppresses progress lines; anything else keeps them).
bool log_enabled();

int cmd_run(const std::filesystem::path& scenario_path,
            const std::filesystem::path& out_dir, const RunOverrides& ov);

int cmd_bench(const std::vector<std::size_t>& n_points_list,
              std::size_t repetitions, std::uint64_t seed,
              const std::optional<std::filesystem::path>& json_out,
              std::ostream& out);

int cmd_plot(const PlotSpec& spec);

// Runs every scenario file in the directory (non-recursive) and checks its
// [suite] expectation; prints a pass/fail table.
int cmd_suite(const std::filesystem::path& scenario_dir,
              const std::filesystem::path& out_dir, std::ostream& out);

}  // namespace cbf2d
