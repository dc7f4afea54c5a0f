#include "cbf2d/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "cbf2d/runner.hpp"
#include "cbf2d/scenario.hpp"
#include "cbf2d/sim.hpp"

namespace cbf2d {

namespace {

// Fig-like palette: nominal command magenta, filtered command purple.
constexpr const char* kMagenta = "#ff00ff";
constexpr const char* kPurple = "#7f00bf";
constexpr const char* kBlue = "#1f77b4";
constexpr const char* kOrange = "#ff7f0e";
constexpr const char* kGray = "#888888";

struct Series {
  std::string label;
  std::string color;
  bool dashed{false};
  std::vector<std::pair<double, double>> xy;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;        // data bounds
  double px0, px1, py0, py1;    // pixel bounds (py0 is the *top*)

  double px(double x) const {
    return px0 + (x - x0) / (x1 - x0) * (px1 - px0);
  }
  double py(double y) const {
    return py1 - (y - y0) / (y1 - y0) * (py1 - py0);
  }
};

void pad_range(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
    return;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
}

void axes(std::ostringstream& svg, const Frame& f, const std::string& x_label,
          const std::string& y_label) {
  svg << "<rect x='" << fmt(f.px0) << "' y='" << fmt(f.py0) << "' width='"
      << fmt(f.px1 - f.px0) << "' height='" << fmt(f.py1 - f.py0)
      << "' fill='none' stroke='#000'/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 5.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 5.0;
    const double xp = f.px(xv);
    const double yp = f.py(yv);
    svg << "<line x1='" << fmt(xp) << "' y1='" << fmt(f.py1) << "' x2='"
        << fmt(xp) << "' y2='" << fmt(f.py1 + 4) << "' stroke='#000'/>\n"
        << "<text x='" << fmt(xp) << "' y='" << fmt(f.py1 + 16)
        << "' font-size='10' text-anchor='middle'>" << fmt_tick(xv)
        << "</text>\n"
        << "<line x1='" << fmt(f.px0 - 4) << "' y1='" << fmt(yp) << "' x2='"
        << fmt(f.px0) << "' y2='" << fmt(yp) << "' stroke='#000'/>\n"
        << "<text x='" << fmt(f.px0 - 6) << "' y='" << fmt(yp + 3)
        << "' font-size='10' text-anchor='end'>" << fmt_tick(yv)
        << "</text>\n";
  }
  svg << "<text x='" << fmt((f.px0 + f.px1) / 2) << "' y='"
      << fmt(f.py1 + 32) << "' font-size='12' text-anchor='middle'>"
      << x_label << "</text>\n";
  svg << "<text x='14' y='" << fmt((f.py0 + f.py1) / 2)
      << "' font-size='12' text-anchor='middle' transform='rotate(-90 14 "
      << fmt((f.py0 + f.py1) / 2) << ")'>" << y_label << "</text>\n";
}

void polyline(std::ostringstream& svg, const Frame& f, const Series& s) {
  svg << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.2'";
  if (s.dashed) svg << " stroke-dasharray='5,3'";
  svg << " points='";
  for (const auto& [x, y] : s.xy) {
    svg << fmt(f.px(x)) << "," << fmt(f.py(y)) << " ";
  }
  svg << "'/>\n";
}

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label,
                       const std::vector<Series>& series) {
  const double w = 800, h = 500;
  Frame f;
  f.px0 = 60;
  f.px1 = w - 20;
  f.py0 = 40;
  f.py1 = h - 50;
  f.x0 = f.y0 = std::numeric_limits<double>::infinity();
  f.x1 = f.y1 = -std::numeric_limits<double>::infinity();
  for (const Series& s : series) {
    for (const auto& [x, y] : s.xy) {
      f.x0 = std::min(f.x0, x);
      f.x1 = std::max(f.x1, x);
      f.y0 = std::min(f.y0, y);
      f.y1 = std::max(f.y1, y);
    }
  }
  if (!std::isfinite(f.x0)) {
    f.x0 = f.y0 = 0.0;
    f.x1 = f.y1 = 1.0;
  }
  pad_range(f.x0, f.x1);
  pad_range(f.y0, f.y1);

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w
      << "' height='" << h << "' viewBox='0 0 " << w << " " << h << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << fmt(w / 2)
      << "' y='22' font-size='14' text-anchor='middle'>" << title
      << "</text>\n";
  axes(svg, f, x_label, y_label);
  if (f.y0 < 0.0 && f.y1 > 0.0) {
    svg << "<line x1='" << fmt(f.px0) << "' y1='" << fmt(f.py(0.0))
        << "' x2='" << fmt(f.px1) << "' y2='" << fmt(f.py(0.0))
        << "' stroke='" << kGray << "' stroke-dasharray='2,4'/>\n";
  }
  for (const Series& s : series) polyline(svg, f, s);

  double ly = f.py0 + 14;
  for (const Series& s : series) {
    const double lx = f.px1 - 150;
    svg << "<line x1='" << fmt(lx) << "' y1='" << fmt(ly - 4) << "' x2='"
        << fmt(lx + 24) << "' y2='" << fmt(ly - 4) << "' stroke='" << s.color
        << "' stroke-width='1.5'";
    if (s.dashed) svg << " stroke-dasharray='5,3'";
    svg << "/>\n<text x='" << fmt(lx + 30) << "' y='" << fmt(ly)
        << "' font-size='11'>" << s.label << "</text>\n";
    ly += 16;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string trajectory_chart(const std::vector<TickRecord>& records,
                             const std::optional<World>& world) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  const auto grow = [&](const Vec2& p) {
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
  };
  for (const TickRecord& r : records) grow(r.true_pose.position);
  std::vector<Segment> segs;
  if (world) {
    segs = posed_segments(*world, 0.0);
    for (const Segment& s : segs) {
      grow(s.a);
      grow(s.b);
    }
  }
  if (!std::isfinite(x0)) {
    x0 = y0 = 0.0;
    x1 = y1 = 1.0;
  }
  pad_range(x0, x1);
  pad_range(y0, y1);

  // Equal aspect: meters map to the same pixel count on both axes.
  const double margin = 50.0;
  const double plot_w = 760.0;
  const double scale = plot_w / std::max(x1 - x0, 1e-9);
  const double plot_h = (y1 - y0) * scale;
  const double w = plot_w + 2 * margin;
  const double h = plot_h + 2 * margin;

  Frame f{x0, x1, y0, y1, margin, margin + plot_w, margin, margin + plot_h};

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << fmt(w)
      << "' height='" << fmt(h) << "' viewBox='0 0 " << fmt(w) << " "
      << fmt(h) << "'>\n<rect width='100%' height='100%' fill='white'/>\n";

  for (const Segment& s : segs) {
    svg << "<line x1='" << fmt(f.px(s.a.x())) << "' y1='" << fmt(f.py(s.a.y()))
        << "' x2='" << fmt(f.px(s.b.x())) << "' y2='" << fmt(f.py(s.b.y()))
        << "' stroke='#333' stroke-width='2'/>\n";
  }

  Series path{"trajectory", kBlue, false, {}};
  for (const TickRecord& r : records) {
    path.xy.emplace_back(r.true_pose.position.x(), r.true_pose.position.y());
  }
  polyline(svg, f, path);

  // Ellipse snapshots and command arrows once per simulated second.
  if (records.size() >= 2) {
    const double dt = records[1].t - records[0].t;
    const auto stride = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(1.0 / std::max(dt, 1e-9))));
    for (std::size_t k = 0; k < records.size(); k += stride) {
      const TickRecord& r = records[k];
      const double cx = f.px(r.true_pose.position.x());
      const double cy = f.py(r.true_pose.position.y());
      // The log does not carry the semi-axes; the default footprint is
      // drawn as a visual cue only.
      svg << "<g transform='rotate(" << fmt(-r.true_pose.yaw * 180.0 / kPi)
          << " " << fmt(cx) << " " << fmt(cy) << ")'>"
          << "<ellipse cx='" << fmt(cx) << "' cy='" << fmt(cy) << "' rx='"
          << fmt(0.9 * scale) << "' ry='" << fmt(0.45 * scale)
          << "' fill='none' stroke='#2ca02c' stroke-opacity='0.5'/></g>\n";
      const auto arrow = [&](const Vec2& u, const char* color) {
        const Vec2 tip = r.true_pose.position + 0.5 * u;
        svg << "<line x1='" << fmt(cx) << "' y1='" << fmt(cy) << "' x2='"
            << fmt(f.px(tip.x())) << "' y2='" << fmt(f.py(tip.y()))
            << "' stroke='" << color << "' stroke-width='1.5'/>\n";
      };
      const double cap = 1.0;
      arrow(r.u_nom.cwiseMax(-cap).cwiseMin(cap), kMagenta);
      arrow(r.u_star, kPurple);
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string solver_time_chart(const std::vector<HistogramBucket>& hist) {
  const double w = 800, h = 500;
  Frame f;
  f.px0 = 70;
  f.px1 = w - 20;
  f.py0 = 40;
  f.py1 = h - 50;
  f.x0 = f.y0 = std::numeric_limits<double>::infinity();
  f.x1 = f.y1 = -std::numeric_limits<double>::infinity();
  for (const HistogramBucket& b : hist) {
    const double x = static_cast<double>(b.lo) + b.width / 2.0;
    f.x0 = std::min(f.x0, x);
    f.x1 = std::max(f.x1, x);
    f.y0 = std::min(f.y0, (b.mean_ns - b.std_ns) / 1000.0);
    f.y1 = std::max(f.y1, (b.mean_ns + b.std_ns) / 1000.0);
  }
  if (!std::isfinite(f.x0)) {
    f.x0 = f.y0 = 0.0;
    f.x1 = f.y1 = 1.0;
  }
  pad_range(f.x0, f.x1);
  pad_range(f.y0, f.y1);

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w
      << "' height='" << h << "' viewBox='0 0 " << w << " " << h << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << fmt(w / 2)
      << "' y='22' font-size='14' text-anchor='middle'>QP solve time by "
         "active constraint count</text>\n";
  axes(svg, f, "active constraints", "solve time [us]");
  for (const HistogramBucket& b : hist) {
    const double x = f.px(static_cast<double>(b.lo) + b.width / 2.0);
    const double ym = f.py(b.mean_ns / 1000.0);
    const double ylo = f.py((b.mean_ns - b.std_ns) / 1000.0);
    const double yhi = f.py((b.mean_ns + b.std_ns) / 1000.0);
    svg << "<line x1='" << fmt(x) << "' y1='" << fmt(ylo) << "' x2='"
        << fmt(x) << "' y2='" << fmt(yhi) << "' stroke='" << kBlue
        << "'/>\n";
    svg << "<circle cx='" << fmt(x) << "' cy='" << fmt(ym)
        << "' r='3' fill='" << kBlue << "'/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

// Solve timings are not replayable, so the CSV omits them; the chart reads
// the histogram from the summary JSON written next to the log.
std::vector<HistogramBucket> load_sibling_histogram(
    const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension();
  p += "_summary.json";
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    throw ScenarioError("solver_time needs the run summary next to the log: " +
                        p.string());
  }
  std::vector<HistogramBucket> hist;
  try {
    nlohmann::json j;
    in >> j;
    for (const auto& e : j.at("solve_time_by_constraints")) {
      HistogramBucket b;
      b.lo = e.at("constraints_lo").get<std::size_t>();
      b.width = e.at("constraints_hi").get<std::size_t>() - b.lo;
      b.count = e.at("count").get<std::size_t>();
      b.mean_ns = e.at("mean_ns").get<double>();
      b.std_ns = e.at("std_ns").get<double>();
      hist.push_back(b);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError("unusable run summary " + p.string() + ": " +
                        e.what());
  }
  return hist;
}

}  // namespace

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "velocities") return PlotKind::velocities;
  if (name == "barrier_values") return PlotKind::barrier_values;
  if (name == "trajectory") return PlotKind::trajectory;
  if (name == "solver_time") return PlotKind::solver_time;
  throw ScenarioError("unknown plot kind '" + name + "'");
}

void render_plot(const PlotSpec& spec) {
  std::ifstream in(spec.input_csv, std::ios::binary);
  if (!in) {
    throw ScenarioError("cannot open log: " + spec.input_csv.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::vector<TickRecord> records = records_from_csv(buf.str());
  if (records.empty()) {
    throw ScenarioError("log has no rows: " + spec.input_csv.string());
  }

  std::string svg;
  switch (spec.kind) {
    case PlotKind::velocities: {
      Series nx{"u_nom x", kMagenta, false, {}};
      Series ny{"u_nom y", kMagenta, true, {}};
      Series sx{"u* x", kPurple, false, {}};
      Series sy{"u* y", kPurple, true, {}};
      for (const TickRecord& r : records) {
        nx.xy.emplace_back(r.t, r.u_nom.x());
        ny.xy.emplace_back(r.t, r.u_nom.y());
        sx.xy.emplace_back(r.t, r.u_star.x());
        sy.xy.emplace_back(r.t, r.u_star.y());
      }
      svg = line_chart("Nominal vs filtered velocity", "t [s]", "u [m/s]",
                       {nx, ny, sx, sy});
      break;
    }
    case PlotKind::barrier_values: {
      Series hs{"H (composite)", kBlue, false, {}};
      Series ms{"min h_i", kOrange, false, {}};
      for (const TickRecord& r : records) {
        if (r.n_constraints == 0) continue;  // no barrier this tick
        hs.xy.emplace_back(r.t, r.H);
        ms.xy.emplace_back(r.t, r.min_h);
      }
      svg = line_chart("Barrier values", "t [s]", "barrier value",
                       {hs, ms});
      break;
    }
    case PlotKind::trajectory: {
      std::optional<World> world;
      if (spec.world) world = load_world(*spec.world);
      svg = trajectory_chart(records, world);
      break;
    }
    case PlotKind::solver_time:
      svg = solver_time_chart(load_sibling_histogram(spec.input_csv));
      break;
  }

  std::ofstream out(spec.output_svg, std::ios::binary);
  if (!out) {
    throw ScenarioError("cannot write " + spec.output_svg.string());
  }
  out << svg;
}

}  // namespace cbf2d
