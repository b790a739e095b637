#include <cmath>
#include <random>

#include "cise/expansion.hpp"
#include "cise/safety_filter.hpp"
#include "doctest.h"

using namespace cise;

namespace {

BoundaryState unit_circle(int n = 50) {
  InitDescriptor init;
  init.P = Matrix2d::Identity();
  init.level = 1.0;
  init.n = n;
  return initial_boundary(init);
}

BoundaryState tuned_n20() {
  InitDescriptor init;
  init.P = (Matrix2d() << 1.38408304, 0.0, 0.0, 100.0).finished();
  init.level = 1.0;
  init.n = 20;
  return initial_boundary(init);
}

double winding_sign(const std::vector<Vector2d>& poly, const Vector2d& x) {
  double total = 0.0;
  for (size_t k = 0; k < poly.size(); ++k) {
    const Vector2d a = poly[k] - x;
    const Vector2d b = poly[(k + 1) % poly.size()] - x;
    total += std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
  }
  return total;
}

}  // namespace

TEST_CASE("signed distance vanishes at control points") {
  const BoundaryState circle = unit_circle();
  const SdfEvaluator sdf(circle);
  for (int i = 0; i < circle.size(); ++i) {
    const SdfResult res = sdf(circle.point(i));
    CHECK(std::abs(res.h) <= 1e-9);
    if (!res.zero_gradient) {
      CHECK(res.gradient.norm() == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("signed distance agrees with circle geometry") {
  const SdfEvaluator sdf(unit_circle());

  const SdfResult center = sdf(Vector2d(0, 0));
  CHECK(center.h == doctest::Approx(1.0).epsilon(0.02));
  CHECK(center.closest_point.norm() == doctest::Approx(1.0).epsilon(0.02));

  const SdfResult outside = sdf(Vector2d(2, 0));
  CHECK(outside.h == doctest::Approx(-1.0).epsilon(0.02));
  CHECK((outside.gradient - Vector2d(-1, 0)).norm() <= 0.02);
  CHECK(outside.gradient.norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sign matches the winding number at random points") {
  const BoundaryState boundary = tuned_n20();
  const SdfEvaluator sdf(boundary);
  const auto poly = polyline(boundary, 32);

  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> ux(-1.5, 1.5);
  std::uniform_real_distribution<double> uy(-0.3, 0.3);
  for (int k = 0; k < 1000; ++k) {
    const Vector2d x(ux(rng), uy(rng));
    const double h = sdf(x).h;
    if (std::abs(h) < 1e-6) continue;
    const double winding = winding_sign(poly, x);
    const bool inside = std::abs(winding) > M_PI;
    CHECK(inside == (h > 0.0));
  }
}

TEST_CASE("distance magnitude stays below the chord scale on the boundary") {
  const BoundaryState boundary = tuned_n20();
  const SdfEvaluator sdf(boundary);
  const auto poly = polyline(boundary, 32);
  double max_chord = 0.0;
  for (size_t k = 0; k < poly.size(); ++k) {
    max_chord = std::max(max_chord, (poly[(k + 1) % poly.size()] - poly[k]).norm());
  }
  for (const Vector2d& x : polyline(boundary, 7)) {
    CHECK(std::abs(sdf(x).h) <= 1.5 * max_chord);
  }
}

TEST_CASE("gradient aligns with the inward normal near segment midpoints") {
  const BoundaryState boundary = tuned_n20();
  const SdfEvaluator sdf(boundary);
  for (int i = 0; i < boundary.size(); ++i) {
    const Segment seg = boundary.segment(i);
    const double mid = 0.5 * (seg.t_start() + seg.t_end());
    const Vector2d n = seg.inward_normal(mid);
    const SdfResult res = sdf(seg.position(mid) + 1e-4 * n);
    REQUIRE_FALSE(res.zero_gradient);
    CHECK(res.gradient.dot(n) >= 0.99);
  }
}

TEST_CASE("filter returns the reference when it is already safe") {
  const SystemModel sys = double_integrator();
  const SdfEvaluator sdf(unit_circle());
  const Eigen::VectorXd u_ref = Eigen::VectorXd::Constant(1, 0.3);
  const FilterResult res = filter_control(sdf, sys, Vector2d(0.05, 0.0), u_ref, 1.0, 1e3);
  CHECK(std::abs(res.u[0] - 0.3) <= 1e-9);
  CHECK(res.delta <= 1e-9);
  CHECK(res.qp_residual <= 1e-8);
}

TEST_CASE("slack stays zero on the boundary when the certificate input is used") {
  const SystemModel sys = double_integrator();
  const BoundaryState boundary = tuned_n20();
  const SdfEvaluator sdf(boundary);
  EvalConfig paper;
  paper.mode = LipschitzMode::paper;
  for (int i = 0; i < boundary.size(); i += 4) {
    const SegmentCertificate cert = certify_segment(sys, boundary, i, paper);
    REQUIRE(cert.b_star >= 0.0);
    const Vector2d n = boundary.segment(i).inward_normal(cert.t);
    const Vector2d x = cert.point + 1e-6 * n;
    const FilterResult res = filter_control(sdf, sys, x, cert.u_star, 1.0, 1e3);
    CHECK(res.delta <= 1e-6);
  }
}

TEST_CASE("large slack weight forces the input to absorb the correction") {
  const SystemModel sys = double_integrator();
  const SdfEvaluator sdf(unit_circle());
  // Just inside the rightmost point, moving outward; braking is available,
  // so the constraint is satisfiable without slack.
  const Vector2d x(0.0, 0.9);
  const Eigen::VectorXd push = Eigen::VectorXd::Constant(1, 1.0);
  const FilterResult res = filter_control(sdf, sys, x, push, 1.0, 1e6);
  CHECK(res.delta <= 1e-6);
  CHECK(res.u[0] >= -1.0 - 1e-12);
  CHECK(res.u[0] <= 1.0 + 1e-12);
}

TEST_CASE("simulation enforces its starting gate and records every step") {
  const SystemModel sys = double_integrator();
  const BoundaryState boundary = tuned_n20();
  const RefPolicy constant = [](double, const Vector2d&) {
    return Eigen::VectorXd::Constant(1, 0.2);
  };

  CHECK_THROWS_AS(simulate(boundary, sys, Vector2d(5.0, 5.0), constant, 0.1, 0.01),
                  PreconditionError);

  const auto traj = simulate(boundary, sys, Vector2d(0.0, 0.0), constant, 0.05, 0.01);
  REQUIRE(traj.size() == 6);
  CHECK(traj.front().t == 0.0);
  CHECK(traj.back().t == doctest::Approx(0.05).epsilon(1e-12));
  for (const auto& s : traj) {
    CHECK(s.u.size() == 1);
    CHECK(s.u[0] >= -1.0 - 1e-12);
    CHECK(s.u[0] <= 1.0 + 1e-12);
    CHECK(s.delta >= 0.0);
  }

  const auto repeat = simulate(boundary, sys, Vector2d(0.0, 0.0), constant, 0.05, 0.01);
  for (size_t k = 0; k < traj.size(); ++k) {
    CHECK((traj[k].x - repeat[k].x).cwiseAbs().maxCoeff() == 0.0);
    CHECK(traj[k].h == repeat[k].h);
    CHECK(traj[k].delta == repeat[k].delta);
  }
}

TEST_CASE("inputless systems are rejected at construction") {
  CHECK_THROWS_AS(SystemModel("empty", VectorXd(), VectorXd(),
                              [](const Vector2d&) { return Vector2d::Zero(); },
                              [](const Vector2d&) { return Matrix2Xd(2, 0); },
                              [](const Vector2d&) { return Matrix2d::Zero(); },
                              [](const Vector2d&) { return std::vector<Matrix2d>{}; },
                              [](const StateBox&) { return IntervalBounds{}; }),
                  ContractError);
}
