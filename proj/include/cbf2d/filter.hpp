#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "cbf2d/barrier.hpp"
#include "cbf2d/core.hpp"

namespace cbf2d {

enum class FilterMode { composite_ellipse, baseline_circle };

struct FilterConfig {
  double alpha_gain{2.0};  // linear class-K slope: alpha(H) = alpha_gain * H
  double u_max{1.0};       // per-axis box bound on the commanded velocity
  FilterMode mode{FilterMode::composite_ellipse};
  double s_d{0.8};  // baseline-circle safety distance, baseline mode only
};

struct NominalConfig {
  Vec2 kp{4.0, 4.0};  // diagonal of the proportional gain matrix
};

struct FilterOutput {
  Vec2 u_star{0.0, 0.0};
  Vec2 u_nom{0.0, 0.0};
  double H{0.0};
  double min_h{0.0};
  Vec2 constraint_g{0.0, 0.0};  // gradient of the QP constraint g^T u >= b
  double constraint_b{0.0};
  bool constraint_active{false};
  bool infeasible{false};
  std::int64_t solve_time_ns{0};
  std::size_t n_constraints{0};
};

// u_nom = K_p (goal - p_hat), deliberately unclamped; the QP's box handles
// saturation.
inline Vec2 nominal_velocity(const Vec2& goal, const Vec2& est_pos,
                             const NominalConfig& cfg) {
  return cfg.kp.cwiseProduct(goal - est_pos);
}

inline Vec2 clamp_box(const Vec2& u, double u_max) {
  return u.cwiseMax(-u_max).cwiseMin(u_max);
}

// The single CBF constraint g^T u >= b derived from a barrier evaluation:
// g = dH/dp, b = -alpha(H) - dH/dt.
inline std::pair<Vec2, double> qp_constraint(const BarrierEvaluation& eval,
                                             const FilterConfig& cfg) {
  return {eval.grad_p, -cfg.alpha_gain * eval.H - eval.dH_dt};
}

// Minimally-invasive filter: projects u_nom onto the box intersected with
// the halfspace g^T u >= b. Exact closed-form active-set enumeration; see
// filter.cpp.
FilterOutput solve_safety_qp(const Vec2& u_nom, const BarrierEvaluation& eval,
                             const FilterConfig& cfg);

// Output for ticks with no constraint (empty scan, or filter disabled):
// the clamped nominal command passes through untouched.
FilterOutput passthrough_output(const Vec2& u_nom, const FilterConfig& cfg);

// Baseline distance constraint h_i = ||p_r - p_i||^2 - s_d^2 run through
// the same soft-min composition (orientation-independent, so dH/dt = 0).
std::optional<BarrierEvaluation> baseline_circle_constraints(
    std::span<const Vec2> scan_world, const Vec2& robot_pos, double s_d,
    const CompositeParams& params = CompositeParams{});

}  // namespace cbf2d
