#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace cbf2d {

enum class PlotKind { velocities, barrier_values, trajectory, solver_time };

struct PlotSpec {
  std::filesystem::path input_csv;
  PlotKind kind{PlotKind::velocities};
  std::filesystem::path output_svg;
  // World file to overlay on trajectory plots; ignored by the others.
  std::optional<std::filesystem::path> world;
};

// "velocities" | "barrier_values" | "trajectory" | "solver_time".
PlotKind parse_plot_kind(const std::string& name);

// Renders the requested figure from a run log. Throws ScenarioError on a
// missing/malformed log or an unwritable output path.
void render_plot(const PlotSpec& spec);

}  // namespace cbf2d
