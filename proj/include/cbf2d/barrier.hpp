#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "cbf2d/core.hpp"

namespace cbf2d {

struct CompositeParams {
  double kappa{8.0};
  double gamma{0.9};
};

struct BarrierEvaluation {
  double H{0.0};
  Vec2 grad_p{0.0, 0.0};  // dH/dp_r, world frame
  double dH_dt{0.0};
  double min_h{0.0};
  std::size_t n_points{0};
  double weights_sum{0.0};  // sum of softmax weights, diagnostic
};

// LIDAR returns occasionally contain self-hits on the robot body; a point
// this close to the center would pin h at -1 forever, so drop it.
inline constexpr double kSelfHitRadius = 0.01;

// h_i = (p_i - p_r)^T Q (p_i - p_r) - 1. Zero on the ellipse surface,
// negative inside.
inline double h_point(const Vec2& p_world, const Vec2& robot_pos,
                      const Mat2& q) {
  const Vec2 d = p_world - robot_pos;
  return d.dot(q * d) - 1.0;
}

struct PointGradients {
  Vec2 grad_p{0.0, 0.0};
  double dh_dt{0.0};
};

inline PointGradients h_point_gradients(const Vec2& p_world,
                                        const Vec2& robot_pos, const Mat2& q,
                                        const Mat2& q_dot) {
  const Vec2 d = p_world - robot_pos;
  return {-2.0 * (q * d), d.dot(q_dot * d)};
}

namespace detail {

struct BarrierTerm {
  double h{0.0};
  Vec2 grad_p{0.0, 0.0};
  double dh_dt{0.0};
};

// Soft-min aggregation shared by the ellipse and baseline-circle builders.
//
//   H = -(gamma/kappa) log sum_i exp(-kappa tanh(h_i/gamma))
//
// term(d) supplies h_i and its partials for an offset d = p_i - p_r. The
// exponent is shifted by its maximum before exponentiation so the sum stays
// in (0, N] no matter how large or small the h_i get. The (gamma/kappa)
// prefactor of H cancels against the chain rule in the weighted gradient
// sums, leaving plain softmax weights lambda_i times sech^2(h_i/gamma).
template <typename TermFn>
std::optional<BarrierEvaluation> softmin_compose(std::span<const Vec2> points,
                                                 const Vec2& robot_pos,
                                                 const CompositeParams& params,
                                                 TermFn&& term) {
  struct Scratch {
    BarrierTerm t;
    double tanh_h;
    double w;
  };
  std::vector<Scratch> terms;
  terms.reserve(points.size());

  double s_max = -std::numeric_limits<double>::infinity();
  double min_h = std::numeric_limits<double>::infinity();
  for (const Vec2& p : points) {
    const Vec2 d = p - robot_pos;
    if (d.squaredNorm() < kSelfHitRadius * kSelfHitRadius) continue;
    Scratch s;
    s.t = term(d);
    s.tanh_h = std::tanh(s.t.h / params.gamma);
    s.w = 0.0;
    s_max = std::max(s_max, -params.kappa * s.tanh_h);
    min_h = std::min(min_h, s.t.h);
    terms.push_back(s);
  }
  if (terms.empty()) return std::nullopt;

  double z = 0.0;
  Vec2 grad_acc = Vec2::Zero();
  double dht_acc = 0.0;
  for (Scratch& s : terms) {
    s.w = std::exp(-params.kappa * s.tanh_h - s_max);
    z += s.w;
    const double sech2 = (1.0 - s.tanh_h) * (1.0 + s.tanh_h);
    grad_acc += (s.w * sech2) * s.t.grad_p;
    dht_acc += s.w * sech2 * s.t.dh_dt;
  }

  BarrierEvaluation out;
  out.H = -(params.gamma / params.kappa) * (std::log(z) + s_max);
  out.grad_p = grad_acc / z;
  out.dH_dt = dht_acc / z;
  out.min_h = min_h;
  out.n_points = terms.size();
  double wsum = 0.0;
  for (const Scratch& s : terms) wsum += s.w / z;
  out.weights_sum = wsum;
  return out;
}

}  // namespace detail

// Composite barrier over one scan in the world frame. Empty input (or all
// points inside the self-hit radius) means no constraint exists; callers
// pass the nominal command through in that case.
inline std::optional<BarrierEvaluation> composite_evaluate(
    std::span<const Vec2> scan_world, const Vec2& robot_pos, const Mat2& q,
    const Mat2& q_dot, const CompositeParams& params) {
  return detail::softmin_compose(
      scan_world, robot_pos, params, [&](const Vec2& d) {
        detail::BarrierTerm t;
        t.h = d.dot(q * d) - 1.0;
        t.grad_p = -2.0 * (q * d);
        t.dh_dt = d.dot(q_dot * d);
        return t;
      });
}

}  // namespace cbf2d
