#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "cbf2d/core.hpp"

using namespace cbf2d;

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));  // open at -pi
  CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(2.0 * kPi) == doctest::Approx(0.0));
  CHECK(wrap_angle(-kPi / 2.0) == doctest::Approx(-kPi / 2.0));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angles(-50.0, 50.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = angles(rng);
    const double w = wrap_angle(a);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    // same direction on the unit circle
    CHECK(std::cos(w) == doctest::Approx(std::cos(a)).epsilon(1e-12));
    CHECK(std::sin(w) == doctest::Approx(std::sin(a)).epsilon(1e-12));
  }
}

TEST_CASE("Pose2 wraps its yaw on construction") {
  const Pose2 p({1.0, 2.0}, 5.0 * kPi / 2.0);
  CHECK(p.yaw == doctest::Approx(kPi / 2.0));
}

TEST_CASE("rotation_matrix basics") {
  CHECK((rotation_matrix(0.0) - Mat2::Identity()).norm() == 0.0);

  const Mat2 quarter = rotation_matrix(kPi / 2.0);
  Mat2 expected;
  expected << 0.0, -1.0, 1.0, 0.0;
  CHECK((quarter - expected).norm() < 1e-15);

  const Mat2 r = rotation_matrix(0.3);
  CHECK((r * r.transpose() - Mat2::Identity()).norm() < 1e-12);
  CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shape_matrix_world at zero yaw is the diagonal of inverse "
          "squared semi-axes") {
  const SafetyEllipsoid e{0.9, 0.45, {}};
  const Mat2 q = shape_matrix_world(e, 0.0);
  CHECK(q(0, 0) == doctest::Approx(1.0 / 0.81).epsilon(1e-14));
  CHECK(q(1, 1) == doctest::Approx(1.0 / 0.2025).epsilon(1e-14));
  CHECK(q(0, 1) == doctest::Approx(0.0));
  CHECK(q(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("spherical shape matrix is rotation-invariant") {
  const SafetyEllipsoid e{1.0, 1.0, {}};
  for (const double yaw : {0.0, 0.4, -2.2, kPi}) {
    CHECK((shape_matrix_world(e, yaw) - Mat2::Identity()).norm() < 1e-15);
  }
}

TEST_CASE("shape matrix eigenvalues are yaw-invariant and SPD") {
  const SafetyEllipsoid e{0.9, 0.45, {}};
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> yaws(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    const double yaw = (i == 0) ? 0.7 : yaws(rng);
    const Mat2 q = shape_matrix_world(e, yaw);
    CHECK((q - q.transpose()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat2> eig(q);
    // ascending order: 1/a_x^2 < 1/a_y^2 for a_x > a_y
    CHECK(eig.eigenvalues()(0) ==
          doctest::Approx(1.0 / 0.81).epsilon(1e-12));
    CHECK(eig.eigenvalues()(1) ==
          doctest::Approx(1.0 / 0.2025).epsilon(1e-12));
    CHECK(eig.eigenvalues()(0) > 0.0);
  }
}

TEST_CASE("shape_matrix_rate trivial zeros") {
  const SafetyEllipsoid e{0.9, 0.45, {}};
  CHECK(shape_matrix_rate(e, 1.1, 0.0).norm() == 0.0);
  const SafetyEllipsoid sphere{1.0, 1.0, {}};
  CHECK(shape_matrix_rate(sphere, 0.3, 2.0).norm() < 1e-14);
}

TEST_CASE("shape_matrix_rate matches the finite difference of "
          "shape_matrix_world") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> yaws(-kPi, kPi);
  std::uniform_real_distribution<double> rates(-3.0, 3.0);
  std::uniform_real_distribution<double> axes(0.3, 1.5);

  const double dpsi = 1e-6;
  for (int i = 0; i < 500; ++i) {
    SafetyEllipsoid e{axes(rng), axes(rng), {}};
    double yaw = yaws(rng);
    double rate = rates(rng);
    if (i == 0) {  // the canonical instance
      e = {0.9, 0.45, {}};
      yaw = 0.2;
      rate = 1.0;
    }
    const Mat2 dq_dpsi = (shape_matrix_world(e, yaw + dpsi) -
                          shape_matrix_world(e, yaw - dpsi)) /
                         (2.0 * dpsi);
    const Mat2 q_dot = shape_matrix_rate(e, yaw, rate);
    CHECK((q_dot - rate * dq_dpsi).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((q_dot - q_dot.transpose()).norm() < 1e-12);
  }
}

TEST_CASE("body_to_world known poses") {
  const std::vector<Vec2> pts{{1.0, 0.0}};

  const auto identity = body_to_world(pts, {{0.0, 0.0}, 0.0});
  CHECK(identity[0].x() == doctest::Approx(1.0));
  CHECK(identity[0].y() == doctest::Approx(0.0));

  const auto turned = body_to_world(pts, {{2.0, 3.0}, kPi / 2.0});
  CHECK(turned[0].x() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(turned[0].y() == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("body_to_world round-trips through the inverse transform") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::uniform_real_distribution<double> yaws(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const EstimatedPose pose{{coord(rng), coord(rng)}, yaws(rng)};
    const std::vector<Vec2> pts{{coord(rng), coord(rng)}};
    const auto world = body_to_world(pts, pose);
    const Vec2 back =
        rotation_matrix(pose.yaw).transpose() * (world[0] - pose.position);
    CHECK((back - pts[0]).norm() < 1e-12);
  }
}

TEST_CASE("world offset of a body point is translation-independent") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> coord(-100.0, 100.0);
  std::uniform_real_distribution<double> yaws(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const double yaw = yaws(rng);
    const std::vector<Vec2> pts{{coord(rng), coord(rng)}};
    const EstimatedPose a{{coord(rng), coord(rng)}, yaw};
    const EstimatedPose b{{coord(rng), coord(rng)}, yaw};
    // Subtracting the translation back out cancels up to rounding in the
    // additions; the centered path below is where exactness lives.
    const Vec2 off_a = body_to_world(pts, a)[0] - a.position;
    const Vec2 off_b = body_to_world(pts, b)[0] - b.position;
    CHECK((off_a - off_b).norm() < 1e-12);

    // A zero-translation pose computes R(psi) p directly: bitwise equal to
    // the rotation, independent of everything positional.
    const EstimatedPose centered{{0.0, 0.0}, yaw};
    const Vec2 off_c = body_to_world(pts, centered)[0];
    const Vec2 rp = rotation_matrix(yaw) * pts[0];
    CHECK(off_c.x() == rp.x());
    CHECK(off_c.y() == rp.y());
  }
}
