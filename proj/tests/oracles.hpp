#pragma once

// Independent reference implementations the test suites compare against.
// Everything here is deliberately written the slow, obvious way.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "cbf2d/barrier.hpp"
#include "cbf2d/core.hpp"

namespace oracles {

using cbf2d::Mat2;
using cbf2d::Vec2;

// ---------------------------------------------------------------- soft-min

// Unshifted textbook evaluation; overflows for large kappa*|tanh| products
// by design (the stabilized implementation must agree where this is safe).
inline double naive_softmin_H(std::span<const double> h,
                              const cbf2d::CompositeParams& p) {
  double sum = 0.0;
  for (const double hi : h) {
    sum += std::exp(-p.kappa * std::tanh(hi / p.gamma));
  }
  return -(p.gamma / p.kappa) * std::log(sum);
}

// Composite H as a function of robot position only (fresh evaluation, no
// gradients), for finite differencing.
inline double composite_H(std::span<const Vec2> pts, const Vec2& pos,
                          const Mat2& q, const cbf2d::CompositeParams& p) {
  const auto eval =
      cbf2d::composite_evaluate(pts, pos, q, Mat2::Zero(), p);
  return eval ? eval->H : std::numeric_limits<double>::quiet_NaN();
}

inline Vec2 fd_grad_p(std::span<const Vec2> pts, const Vec2& pos,
                      const Mat2& q, const cbf2d::CompositeParams& p,
                      double step) {
  Vec2 g;
  for (int k = 0; k < 2; ++k) {
    Vec2 lo = pos, hi = pos;
    lo[k] -= step;
    hi[k] += step;
    g[k] = (composite_H(pts, hi, q, p) - composite_H(pts, lo, q, p)) /
           (2.0 * step);
  }
  return g;
}

// dH/dt along yaw(t) = yaw + omega t with the robot held still.
inline double fd_dH_dt(std::span<const Vec2> pts, const Vec2& pos,
                       const cbf2d::SafetyEllipsoid& e, double yaw,
                       double omega, const cbf2d::CompositeParams& p,
                       double step) {
  const Mat2 q_hi = cbf2d::shape_matrix_world(e, yaw + omega * step);
  const Mat2 q_lo = cbf2d::shape_matrix_world(e, yaw - omega * step);
  return (composite_H(pts, pos, q_hi, p) - composite_H(pts, pos, q_lo, p)) /
         (2.0 * step);
}

// ---------------------------------------------------------------- grid QP

struct GridQp {
  bool feasible{false};
  double objective{std::numeric_limits<double>::infinity()};
  Vec2 u{0.0, 0.0};
};

namespace detail {

// One n x n pass over [x_lo,x_hi] x [y_lo,y_hi] (inclusive endpoints).
// Feasibility g^T u >= b is monotone along each column, so the per-row
// minimum reduces to a binary search for the feasibility boundary plus the
// clamped parabola argmin. Produces exactly the minimum a full double loop
// over the same grid would (verified against grid_qp_pass_naive).
inline GridQp grid_qp_pass(const Vec2& g, double b, const Vec2& u_nom,
                           double x_lo, double x_hi, double y_lo, double y_hi,
                           int n) {
  GridQp out;
  const double hx = (x_hi - x_lo) / (n - 1);
  const double hy = (y_hi - y_lo) / (n - 1);

  for (int i = 0; i < n; ++i) {
    const double x = x_lo + i * hx;
    const auto feas = [&](int j) {
      const double y = y_lo + j * hy;
      return g.x() * x + g.y() * y >= b;
    };

    int j_min = 0, j_max = n - 1;
    if (g.y() == 0.0) {
      if (!feas(0)) continue;
    } else if (g.y() > 0.0) {
      // nondecreasing in j: find the first feasible index
      if (!feas(n - 1)) continue;
      int lo = 0, hi = n - 1;
      while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (feas(mid)) {
          hi = mid;
        } else {
          lo = mid + 1;
        }
      }
      j_min = lo;
    } else {
      // nonincreasing in j: find the last feasible index
      if (!feas(0)) continue;
      int lo = 0, hi = n - 1;
      while (lo < hi) {
        const int mid = (lo + hi + 1) / 2;
        if (feas(mid)) {
          lo = mid;
        } else {
          hi = mid - 1;
        }
      }
      j_max = lo;
    }

    // Convex along the row: check the clamped floor/ceil of the argmin.
    const double j_star = (u_nom.y() - y_lo) / hy;
    const int cands[2] = {
        std::clamp(static_cast<int>(std::floor(j_star)), j_min, j_max),
        std::clamp(static_cast<int>(std::ceil(j_star)), j_min, j_max)};
    for (const int j : cands) {
      const double y = y_lo + j * hy;
      const double obj = (x - u_nom.x()) * (x - u_nom.x()) +
                         (y - u_nom.y()) * (y - u_nom.y());
      if (obj < out.objective) {
        out.objective = obj;
        out.u = {x, y};
        out.feasible = true;
      }
    }
  }
  return out;
}

// The literal double loop, used to validate grid_qp_pass on small grids.
inline GridQp grid_qp_pass_naive(const Vec2& g, double b, const Vec2& u_nom,
                                 double x_lo, double x_hi, double y_lo,
                                 double y_hi, int n) {
  GridQp out;
  const double hx = (x_hi - x_lo) / (n - 1);
  const double hy = (y_hi - y_lo) / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double x = x_lo + i * hx;
    for (int j = 0; j < n; ++j) {
      const double y = y_lo + j * hy;
      if (!(g.x() * x + g.y() * y >= b)) continue;
      const double obj = (x - u_nom.x()) * (x - u_nom.x()) +
                         (y - u_nom.y()) * (y - u_nom.y());
      if (obj < out.objective) {
        out.objective = obj;
        out.u = {x, y};
        out.feasible = true;
      }
    }
  }
  return out;
}

}  // namespace detail

// Dense-enumeration QP oracle: a 2001^2 sweep over the box, then 1001^2
// refinements around the incumbent. The incumbent can sit up to about
// (r s^2)^(1/3) away from the optimum *along* the constraint line (r the
// distance to u_nom, s the grid step): columns far from the projection
// point win whenever their boundary crossing lands closer to a grid node.
// Each refinement window therefore covers that drift, not just one cell.
inline GridQp grid_qp(const Vec2& g, double b, const Vec2& u_nom,
                      double u_max) {
  GridQp best = detail::grid_qp_pass(g, b, u_nom, -u_max, u_max, -u_max,
                                     u_max, 2001);
  if (!best.feasible) return best;

  double step = 2.0 * u_max / 2000.0;
  for (int pass = 0; pass < 4; ++pass) {
    const double r = (best.u - u_nom).norm() + step;
    const double w = 4.0 * step + 2.0 * std::cbrt(r * step * step);
    const double x_lo = std::max(-u_max, best.u.x() - w);
    const double x_hi = std::min(u_max, best.u.x() + w);
    const double y_lo = std::max(-u_max, best.u.y() - w);
    const double y_hi = std::min(u_max, best.u.y() + w);
    const GridQp refined =
        detail::grid_qp_pass(g, b, u_nom, x_lo, x_hi, y_lo, y_hi, 1001);
    if (refined.feasible && refined.objective < best.objective) {
      best = refined;
    }
    step = std::max(x_hi - x_lo, y_hi - y_lo) / 1000.0;
  }
  return best;
}

// ---------------------------------------------------------------- helpers

inline std::vector<Vec2> random_scan(std::mt19937_64& rng, std::size_t n,
                                     double r_lo, double r_hi) {
  std::uniform_real_distribution<double> angle(-cbf2d::kPi, cbf2d::kPi);
  std::uniform_real_distribution<double> radius(r_lo, r_hi);
  std::vector<Vec2> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = angle(rng);
    const double r = radius(rng);
    pts.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return pts;
}

}  // namespace oracles
