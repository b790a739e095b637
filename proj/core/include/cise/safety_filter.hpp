#pragma once

#include <functional>
#include <vector>

#include "cise/curve.hpp"
#include "cise/dynamics.hpp"

namespace cise {

// Signed distance to the boundary, positive inside the enclosed region. The
// gradient points inward on both sides of the boundary; it is zeroed (and
// flagged) when the query point sits on the boundary itself.
struct SdfResult {
  double h = 0.0;
  Vector2d closest_point = Vector2d::Zero();
  Vector2d gradient = Vector2d::Zero();
  bool zero_gradient = false;
};

// Caches the dense polyline and per-segment data so repeated queries against
// one boundary stay cheap. Distance comes from a coarse polyline scan refined
// by golden-section search on the two best segments; the sign comes from
// even-odd ray crossings against the polyline.
class SdfEvaluator {
 public:
  explicit SdfEvaluator(const BoundaryState& boundary, int samples_per_segment = 32);

  SdfResult operator()(const Vector2d& x) const;

  const BoundaryState& boundary() const { return boundary_; }

 private:
  BoundaryState boundary_;
  int spp_;
  std::vector<Segment> segments_;
  std::vector<Vector2d> poly_;
};

SdfResult signed_distance(const BoundaryState& boundary, const Vector2d& x,
                          int samples_per_segment = 32);

struct FilterConfig {
  double gamma = 1.0;
  double k_s = 1e3;
  int samples_per_segment = 32;
};

// Minimally adjusted input: stays as close to u_ref as the inward-flow
// constraint allows, with a slack on the constraint so the program is always
// feasible. delta is the slack actually used.
struct FilterResult {
  Eigen::VectorXd u;
  double delta = 0.0;
  double qp_residual = 0.0;
};

FilterResult filter_control(const SdfEvaluator& sdf, const SystemModel& sys, const Vector2d& x,
                            const Eigen::VectorXd& u_ref, double gamma, double k_s);
FilterResult filter_control(const BoundaryState& boundary, const SystemModel& sys,
                            const Vector2d& x, const Eigen::VectorXd& u_ref, double gamma,
                            double k_s);

struct SimStep {
  double t = 0.0;
  Vector2d x = Vector2d::Zero();
  Eigen::VectorXd u;
  double delta = 0.0;
  double h = 0.0;
  double qp_residual = 0.0;
};

using RefPolicy = std::function<Eigen::VectorXd(double, const Vector2d&)>;

// Closed-loop rollout under the filtered control, held constant over each
// integration step. Records one row per step boundary, final state included.
std::vector<SimStep> simulate(const BoundaryState& boundary, const SystemModel& sys,
                              const Vector2d& x0, const RefPolicy& u_ref, double horizon,
                              double dt_sim, const FilterConfig& cfg = {});

}  // namespace cise
