#include "cise/curve.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace cise {
namespace {

constexpr double kCoincidentTol = 1e-12;

using Coef = std::array<Vector2d, 4>;

Coef constant(const Vector2d& p) {
  return {p, Vector2d::Zero(), Vector2d::Zero(), Vector2d::Zero()};
}

// Polynomial form of ((b - u) P(u) + (u - a) Q(u)) / (b - a). Multiplying by
// u shifts coefficients one degree up; inputs never exceed degree two here.
Coef lerp(const Coef& p, const Coef& q, double a, double b) {
  const double inv = 1.0 / (b - a);
  Coef r;
  for (int k = 0; k < 4; ++k) r[k] = inv * (b * p[k] - a * q[k]);
  for (int k = 1; k < 4; ++k) r[k] += inv * (q[k - 1] - p[k - 1]);
  return r;
}

Vector2d horner(const Coef& c, double u) {
  return ((c[3] * u + c[2]) * u + c[1]) * u + c[0];
}

// Largest |c1 + 2 c2 u + 3 c3 u^2| over [0, span]: endpoint values plus the
// interior stationary point of the quadratic when it falls inside.
double quad_max_abs(double c1, double c2, double c3, double span) {
  auto q = [&](double u) { return std::abs(c1 + 2.0 * c2 * u + 3.0 * c3 * u * u); };
  double best = std::max(q(0.0), q(span));
  if (c3 != 0.0) {
    const double v = -c2 / (3.0 * c3);
    if (v > 0.0 && v < span) best = std::max(best, q(v));
  }
  return best;
}

}  // namespace

Knots make_knots(const std::array<Vector2d, 4>& pts, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ContractError("knot exponent beta must be in [0, 1]");
  double t[4] = {0.0, 0.0, 0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    const double chord = (pts[k + 1] - pts[k]).norm();
    if (chord < kCoincidentTol) {
      throw DegenerateSegmentError("coincident consecutive control points");
    }
    t[k + 1] = t[k] + std::pow(chord, beta);
  }
  return Knots{t[0], t[1], t[2], t[3]};
}

Segment::Segment(const std::array<Vector2d, 4>& pts, double beta, int index)
    : index_(index), pts_(pts), knots_(make_knots(pts, beta)) {
  // Barry-Goldman pyramid carried out on polynomial coefficients in
  // u = t - t1, so positions and both derivatives come out exact.
  const double u0 = knots_.t0 - knots_.t1;
  const double u1 = 0.0;
  const double u2 = knots_.t2 - knots_.t1;
  const double u3 = knots_.t3 - knots_.t1;
  const Coef a1 = lerp(constant(pts_[0]), constant(pts_[1]), u0, u1);
  const Coef a2 = lerp(constant(pts_[1]), constant(pts_[2]), u1, u2);
  const Coef a3 = lerp(constant(pts_[2]), constant(pts_[3]), u2, u3);
  const Coef b1 = lerp(a1, a2, u0, u2);
  const Coef b2 = lerp(a2, a3, u1, u3);
  coef_ = lerp(b1, b2, u1, u2);
}

void Segment::check_param(double t) const {
  const double tol = 1e-9 * (1.0 + std::abs(knots_.t1) + std::abs(knots_.t2));
  if (t < knots_.t1 - tol || t > knots_.t2 + tol) {
    throw ContractError("curve parameter outside segment span");
  }
}

Vector2d Segment::position(double t) const {
  check_param(t);
  return horner(coef_, t - knots_.t1);
}

Vector2d Segment::velocity(double t) const {
  check_param(t);
  const double u = t - knots_.t1;
  return (3.0 * coef_[3] * u + 2.0 * coef_[2]) * u + coef_[1];
}

Vector2d Segment::acceleration(double t) const {
  check_param(t);
  return 6.0 * coef_[3] * (t - knots_.t1) + 2.0 * coef_[2];
}

Vector2d Segment::inward_normal(double t) const {
  const Vector2d v = velocity(t);
  const double speed = v.norm();
  if (speed < kCoincidentTol) throw DegenerateSegmentError("vanishing tangent");
  return Vector2d(-v.y(), v.x()) / speed;
}

StateBox Segment::box() const {
  const Vector2d chord = pts_[2] - pts_[1];
  const double len = chord.norm();
  const double h = 0.25 * len;
  const Vector2d d = chord / len;
  const Vector2d e(-d.y(), d.x());
  const Vector2d ends[2] = {pts_[1] - h * d, pts_[2] + h * d};
  StateBox out;
  out.lo = Vector2d::Constant(std::numeric_limits<double>::infinity());
  out.hi = -out.lo;
  for (const Vector2d& base : ends) {
    for (double s : {-1.0, 1.0}) {
      const Vector2d corner = base + s * h * e;
      out.lo = out.lo.cwiseMin(corner);
      out.hi = out.hi.cwiseMax(corner);
    }
  }
  return out;
}

EnforcementPoint Segment::enforcement_point() const {
  EnforcementPoint ep;
  ep.t = 0.5 * (knots_.t1 + knots_.t2);
  ep.point = position(ep.t);
  ep.half_width = 0.5 * knots_.span();
  return ep;
}

SpeedBounds Segment::speed_bounds(int samples) const {
  if (samples < 2) throw ContractError("speed_bounds needs at least two samples");
  const double span = knots_.span();
  SpeedBounds sb;
  sb.max_accel = std::max(acceleration(knots_.t1).norm(), acceleration(knots_.t2).norm());
  const double mx = quad_max_abs(coef_[1].x(), coef_[2].x(), coef_[3].x(), span);
  const double my = quad_max_abs(coef_[1].y(), coef_[2].y(), coef_[3].y(), span);
  sb.max_speed = std::hypot(mx, my);
  double lowest = std::numeric_limits<double>::infinity();
  for (int j = 0; j < samples; ++j) {
    const double t = knots_.t1 + span * j / (samples - 1);
    lowest = std::min(lowest, velocity(t).norm());
  }
  sb.min_speed = lowest - sb.max_accel * span / samples;
  if (!(sb.min_speed > 0.0)) {
    throw DegenerateSegmentError("speed lower bound is not positive");
  }
  return sb;
}

BoundaryState::BoundaryState(std::vector<Vector2d> points, double beta)
    : points_(std::move(points)), beta_(beta) {
  if (!(beta_ >= 0.0 && beta_ <= 1.0)) throw ContractError("knot exponent beta must be in [0, 1]");
  const int n = size();
  if (n < 4) throw ContractError("boundary needs at least four control points");
  for (int i = 0; i < n; ++i) {
    if ((points_[(i + 1) % n] - points_[i]).norm() < kCoincidentTol) {
      throw ContractError("boundary has coincident consecutive control points");
    }
    if (!points_[i].allFinite()) throw ContractError("boundary control point is not finite");
  }
  if (!(polygon_area(points_) > 0.0)) {
    throw ContractError("boundary control points must wind counterclockwise");
  }
}

BoundaryState BoundaryState::from_coords(const Eigen::VectorXd& coords, double beta) {
  if (coords.size() % 2 != 0) throw ContractError("coordinate vector must have even length");
  std::vector<Vector2d> pts(coords.size() / 2);
  for (size_t i = 0; i < pts.size(); ++i) {
    pts[i] = Vector2d(coords[2 * i], coords[2 * i + 1]);
  }
  return BoundaryState(std::move(pts), beta);
}

Segment BoundaryState::segment(int i) const {
  const std::array<Vector2d, 4> pts = {point(i - 1), point(i), point(i + 1), point(i + 2)};
  return Segment(pts, beta_, wrap(i));
}

Eigen::VectorXd BoundaryState::coords() const {
  Eigen::VectorXd out(2 * size());
  for (int i = 0; i < size(); ++i) {
    out[2 * i] = points_[i].x();
    out[2 * i + 1] = points_[i].y();
  }
  return out;
}

std::vector<Vector2d> polyline(const BoundaryState& boundary, int samples_per_segment) {
  if (samples_per_segment < 1) throw ContractError("samples_per_segment must be positive");
  std::vector<Vector2d> pts;
  pts.reserve(static_cast<size_t>(boundary.size()) * samples_per_segment);
  for (int i = 0; i < boundary.size(); ++i) {
    const Segment seg = boundary.segment(i);
    const double span = seg.knots().span();
    for (int j = 0; j < samples_per_segment; ++j) {
      pts.push_back(seg.position(seg.t_start() + span * j / samples_per_segment));
    }
  }
  return pts;
}

double polygon_area(const std::vector<Vector2d>& pts) {
  double twice = 0.0;
  const size_t n = pts.size();
  for (size_t i = 0; i < n; ++i) {
    const Vector2d& a = pts[i];
    const Vector2d& b = pts[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

double area(const BoundaryState& boundary, int samples_per_segment) {
  return polygon_area(polyline(boundary, samples_per_segment));
}

}  // namespace cise
