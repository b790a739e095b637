#pragma once

#include <functional>
#include <vector>

#include "cise/curve.hpp"
#include "cise/dynamics.hpp"
#include "cise/feasibility.hpp"
#include "cise/qp_solver.hpp"

namespace cise {

// Initial boundary: the level set {x : x'Px = level} of a positive definite
// quadratic, sampled at n angles evenly spaced on the circle.
struct InitDescriptor {
  Eigen::Matrix2d P = (Eigen::Matrix2d() << 1.0, 0.5, 0.5, 1.0).finished();
  double level = 0.01;
  int n = 50;
};

BoundaryState initial_boundary(const InitDescriptor& init, double beta = 0.5);

struct ExpansionConfig {
  double k_n = 1.0;
  double k_c = 1.0;
  double gamma = 1.0;
  double dt = 0.01;
  int max_steps = 100000;
  double convergence_tol = 1e-4;
  double q_weight = 1.0;
  InitDescriptor init;
  double beta = 0.5;
  EvalConfig eval;
  bool enforce_containment = true;
  double containment_margin = 0.01;
  StateBox safe_box{Vector2d(-1.0, -2.5), Vector2d(1.0, 2.5)};
};

void validate(const ExpansionConfig& cfg);

struct VerificationReport {
  std::vector<SegmentCertificate> certificates;
  bool all_pass = false;
  double min_margin = 0.0;
  std::vector<int> failing_segments;
};

// Certifies every segment. Degenerate segments become failing entries with
// margin -inf instead of exceptions, so verification degrades conservatively.
VerificationReport verify(const SystemModel& sys, const BoundaryState& boundary,
                          const EvalConfig& cfg = {});

// Outward unit normal estimate from the neighbor chord plus a centering pull
// toward the neighbor midpoint, per control point, stacked as a 2N vector.
Eigen::VectorXd reference_input(const BoundaryState& boundary, double k_n, double k_c);

struct SafeInputResult {
  Eigen::VectorXd eta;
  VerificationReport report;
  QpSolution qp;
};

// Filters the reference through the margin-derivative constraints (plus wall
// constraints for control points whose segment boxes approach the safe-set
// faces). eta is meaningful only when qp.status is optimal.
SafeInputResult safe_input(const SystemModel& sys, const BoundaryState& boundary,
                           const ExpansionConfig& cfg, const std::vector<int>& warm_hint = {});

using EtaFn = std::function<Eigen::VectorXd(const BoundaryState&)>;

BoundaryState step_rk4(const BoundaryState& boundary, const EtaFn& eta_fn, double dt);

// Conservative: true only if every segment's bounding box fits in the safe box.
bool containment_check(const BoundaryState& boundary, const StateBox& safe_box);

enum class ExpansionStatus { converged, converged_by_fallback, max_steps };

struct TraceEntry {
  int step = 0;
  double area = 0.0;
  double min_margin = 0.0;
  double dt = 0.0;
};

struct ExpansionResult {
  BoundaryState boundary;
  std::vector<TraceEntry> trace;
  ExpansionStatus status = ExpansionStatus::max_steps;
  int qp_solves = 0;
  double max_qp_residual = 0.0;
};

// Called once for the initial boundary (step 0) and once per accepted step.
using ExpansionObserver = std::function<void(const BoundaryState&, const TraceEntry&)>;

// Grow the initial set until the filtered velocity stalls, always keeping the
// last verified boundary. A rejected step rolls back and halves dt; six
// consecutive rejections end the run with the fallback status.
ExpansionResult expand(const SystemModel& sys, const ExpansionConfig& cfg,
                       const ExpansionObserver& observer = nullptr);

}  // namespace cise
