#pragma once

#include <vector>

#include "cise/curve.hpp"
#include "cise/dynamics.hpp"

namespace cise {

// Closed-form minimizer of c.w over a coordinate box. Coordinates with zero
// cost are ties; they get the in-box value closest to zero so downstream
// consumers see deterministic, least-effort inputs.
struct LpSolution {
  Eigen::VectorXd minimizer;
  double value = 0.0;
  std::vector<bool> tie_mask;
};

LpSolution solve_box_lp(const Eigen::VectorXd& c, const Eigen::VectorXd& w_min,
                        const Eigen::VectorXd& w_max);

// Lipschitz constant of the box LP value as a function of the cost vector.
double lp_lipschitz(const Eigen::VectorXd& w_min, const Eigen::VectorXd& w_max);

// Best achievable flow through a boundary point: drift projected on the unit
// inward normal plus the largest input contribution available in the actuator
// box. Nonnegative exactly when some admissible input keeps the flow inward.
struct FlowMargin {
  double value = 0.0;
  Eigen::VectorXd u_star;
  bool tie = false;
};

FlowMargin b_star(const SystemModel& sys, const Vector2d& x, const Vector2d& n);

// How the unit-normal field's variation is bounded along a segment. `sound`
// divides the acceleration sup by the certified minimum speed, which holds
// for any parameterization; `paper` uses the acceleration sup alone, tighter
// but only an honest bound when the curve runs near unit speed.
enum class LipschitzMode { sound, paper };

struct EvalConfig {
  LipschitzMode mode = LipschitzMode::sound;
  int speed_samples = 64;
};

double segment_lipschitz(const SystemModel& sys, const Segment& seg,
                         const EvalConfig& cfg = {});

// Certified statement about one segment: the flow margin at the enforcement
// point, discounted by the worst possible drift of that margin over the half
// span. margin >= 0 certifies nonnegative flow margin on the whole segment.
struct SegmentCertificate {
  int segment = 0;
  double t = 0.0;
  Vector2d point = Vector2d::Zero();
  double b_star = 0.0;
  Eigen::VectorXd u_star;
  bool tie = false;
  double l_b_tau = 0.0;
  double half_width = 0.0;
  double margin = 0.0;
};

SegmentCertificate certify_segment(const SystemModel& sys, const Segment& seg,
                                   const EvalConfig& cfg = {});
SegmentCertificate certify_segment(const SystemModel& sys, const BoundaryState& boundary, int i,
                                   const EvalConfig& cfg = {});

std::vector<SegmentCertificate> certify_boundary(const SystemModel& sys,
                                                 const BoundaryState& boundary,
                                                 const EvalConfig& cfg = {});

double min_margin(const std::vector<SegmentCertificate>& certs);

// Gradient of segment i's certified margin with respect to every control
// point coordinate, by central differences. Only the four points that define
// the segment can move it, so all other entries are exact zeros and are never
// evaluated.
Eigen::VectorXd grad_margin(const SystemModel& sys, const BoundaryState& boundary, int i,
                            const EvalConfig& cfg = {});

}  // namespace cise
