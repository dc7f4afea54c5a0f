#include "cbf2d/filter.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace cbf2d {
namespace {

// Candidates on the constraint boundary may fall a few ulps outside the box
// after the division; accept and clamp rather than discard.
constexpr double kBoxTol = 1e-12;

// ||g|| below this is treated as no usable constraint direction.
constexpr double kDegenerateGradSq = 1e-24;

}  // namespace

FilterOutput passthrough_output(const Vec2& u_nom, const FilterConfig& cfg) {
  FilterOutput out;
  out.u_nom = u_nom;
  out.u_star = clamp_box(u_nom, cfg.u_max);
  out.H = std::numeric_limits<double>::quiet_NaN();
  out.min_h = std::numeric_limits<double>::quiet_NaN();
  return out;
}

// min ||u - u_nom||^2  s.t.  g^T u >= b,  |u_j| <= u_max.
//
// If the clamped nominal command already satisfies the halfspace it is
// optimal (the box projection of an unconstrained quadratic). Otherwise the
// optimum lies exactly on g^T u = b, so it suffices to enumerate: the plane
// projection of u_nom, and the intersections of the plane with each box
// face. Whichever candidate lies inside the box with the smallest objective
// wins. If no candidate survives, the plane misses the box entirely and the
// problem is infeasible; return the least-violating box point.
FilterOutput solve_safety_qp(const Vec2& u_nom, const BarrierEvaluation& eval,
                             const FilterConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();

  FilterOutput out;
  out.u_nom = u_nom;
  out.H = eval.H;
  out.min_h = eval.min_h;
  out.n_constraints = eval.n_points;

  const auto [g, b] = qp_constraint(eval, cfg);
  out.constraint_g = g;
  out.constraint_b = b;

  const Vec2 u0 = clamp_box(u_nom, cfg.u_max);
  const double gn2 = g.squaredNorm();

  if (gn2 < kDegenerateGradSq) {
    // No direction to push along: the constraint is vacuous when b <= 0 and
    // unsatisfiable otherwise.
    out.u_star = u0;
    out.infeasible = b > 0.0;
  } else if (g.dot(u0) >= b) {
    out.u_star = u0;
  } else {
    out.constraint_active = true;

    double best = std::numeric_limits<double>::infinity();
    Vec2 best_u = Vec2::Zero();
    bool found = false;
    const auto consider = [&](const Vec2& u) {
      if (std::abs(u.x()) > cfg.u_max + kBoxTol) return;
      if (std::abs(u.y()) > cfg.u_max + kBoxTol) return;
      const double obj = (u - u_nom).squaredNorm();
      if (obj < best) {
        best = obj;
        best_u = u;
        found = true;
      }
    };

    consider(u_nom + g * ((b - g.dot(u_nom)) / gn2));
    if (g.y() != 0.0) {
      for (const double x : {-cfg.u_max, cfg.u_max}) {
        consider({x, (b - g.x() * x) / g.y()});
      }
    }
    if (g.x() != 0.0) {
      for (const double y : {-cfg.u_max, cfg.u_max}) {
        consider({(b - g.y() * y) / g.x(), y});
      }
    }

    if (found) {
      out.u_star = clamp_box(best_u, cfg.u_max);
    } else {
      out.infeasible = true;
      out.u_star = {g.x() != 0.0 ? std::copysign(cfg.u_max, g.x()) : u0.x(),
                    g.y() != 0.0 ? std::copysign(cfg.u_max, g.y()) : u0.y()};
    }
  }

  out.solve_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  return out;
}

std::optional<BarrierEvaluation> baseline_circle_constraints(
    std::span<const Vec2> scan_world, const Vec2& robot_pos, double s_d,
    const CompositeParams& params) {
  return detail::softmin_compose(scan_world, robot_pos, params,
                                 [&](const Vec2& d) {
                                   detail::BarrierTerm t;
                                   t.h = d.squaredNorm() - s_d * s_d;
                                   t.grad_p = -2.0 * d;
                                   t.dh_dt = 0.0;
                                   return t;
                                 });
}

}  // namespace cbf2d
