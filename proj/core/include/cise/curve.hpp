#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "cise/dynamics.hpp"
#include "cise/errors.hpp"

namespace cise {

// Knot vector of one non-uniform Catmull-Rom segment: t0 < t1 < t2 < t3 with
// spacing |p_{k+1} - p_k|^beta. The drawn span is [t1, t2].
struct Knots {
  double t0 = 0.0, t1 = 0.0, t2 = 0.0, t3 = 0.0;
  double span() const { return t2 - t1; }
};

Knots make_knots(const std::array<Vector2d, 4>& pts, double beta);

struct SpeedBounds {
  double min_speed = 0.0;  // certified lower bound on |p'| over the span
  double max_speed = 0.0;  // upper bound on |p'|
  double max_accel = 0.0;  // exact sup of |p''| (attained at a span endpoint)
};

struct EnforcementPoint {
  double t = 0.0;          // knot-parameter midpoint of the span
  Vector2d point = Vector2d::Zero();
  double half_width = 0.0; // half the knot span, the certificate radius
};

// One cubic segment of a closed non-uniform Catmull-Rom curve, stored as
// power-basis coefficients about t1 so that derivatives are exact.
class Segment {
 public:
  Segment(const std::array<Vector2d, 4>& pts, double beta, int index = -1);

  int index() const { return index_; }
  const Knots& knots() const { return knots_; }
  double t_start() const { return knots_.t1; }
  double t_end() const { return knots_.t2; }

  Vector2d position(double t) const;
  Vector2d velocity(double t) const;
  Vector2d acceleration(double t) const;

  // Unit normal pointing into the enclosed region for a counterclockwise
  // curve: the tangent rotated by +90 degrees.
  Vector2d inward_normal(double t) const;

  // Conservative axis-aligned cover: hull of the chord rectangle extended by
  // a quarter chord length past both ends and to both sides.
  StateBox box() const;

  EnforcementPoint enforcement_point() const;

  // min_speed uses dense sampling minus a max_accel * (span / samples)
  // correction; a nonpositive result throws DegenerateSegmentError.
  SpeedBounds speed_bounds(int samples = 64) const;

 private:
  void check_param(double t) const;

  int index_;
  std::array<Vector2d, 4> pts_;
  Knots knots_;
  std::array<Vector2d, 4> coef_;  // position coefficients in u = t - t1
};

// Closed counterclockwise boundary given by control points connected with
// centripetal Catmull-Rom segments (segment i runs from point i to i+1,
// indices wrapping). Immutable after construction; the constructor rejects
// fewer than four points, coincident neighbors, and clockwise orientation.
class BoundaryState {
 public:
  BoundaryState(std::vector<Vector2d> points, double beta = 0.5);

  static BoundaryState from_coords(const Eigen::VectorXd& coords, double beta = 0.5);

  int size() const { return static_cast<int>(points_.size()); }
  double beta() const { return beta_; }
  const std::vector<Vector2d>& points() const { return points_; }
  const Vector2d& point(int i) const { return points_[wrap(i)]; }

  Segment segment(int i) const;

  // Control points flattened as (x0, y0, x1, y1, ...).
  Eigen::VectorXd coords() const;

  int wrap(int i) const {
    const int n = size();
    return ((i % n) + n) % n;
  }

 private:
  std::vector<Vector2d> points_;
  double beta_;
};

// Points sampled uniformly in the knot parameter, samples_per_segment per
// segment, starting at each control point; the closing point is not repeated.
std::vector<Vector2d> polyline(const BoundaryState& boundary, int samples_per_segment);

// Shoelace area of the dense polyline; positive for counterclockwise input.
double area(const BoundaryState& boundary, int samples_per_segment = 20);

double polygon_area(const std::vector<Vector2d>& pts);

}  // namespace cise
