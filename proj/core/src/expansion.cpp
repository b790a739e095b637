#include "cise/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <map>
#include <sstream>
#include <tuple>

#include "cise/integrate.hpp"

namespace cise {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Thrown inside the integrator when a stage boundary cannot produce a safe
// input; the step attempt is abandoned and rolled back.
struct StageFailure {};

double max_point_speed(const Eigen::VectorXd& eta) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i + 1 < eta.size(); i += 2) {
    worst = std::max(worst, std::hypot(eta[i], eta[i + 1]));
  }
  return worst;
}

}  // namespace

BoundaryState initial_boundary(const InitDescriptor& init, double beta) {
  if (init.n < 4) throw ContractError("initial boundary needs at least four points");
  if (!(init.level > 0.0)) throw ContractError("initial level must be positive");
  const Eigen::Matrix2d& p = init.P;
  if (std::abs(p(0, 1) - p(1, 0)) > 1e-10 * (1.0 + p.cwiseAbs().maxCoeff())) {
    throw ContractError("initial ellipse matrix must be symmetric");
  }
  if (!(p(0, 0) > 0.0 && p.determinant() > 0.0)) {
    throw ContractError("initial ellipse matrix must be positive definite");
  }
  // Image of evenly spaced unit-circle points under the map carrying the unit
  // circle onto {x : x'Px = level}; keeps points evenly spread in arc even for
  // thin ellipses, where equal polar angles would bunch them.
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(p);
  const Eigen::Matrix2d to_ellipse = eig.eigenvectors() *
                                     eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                     eig.eigenvectors().transpose() * std::sqrt(init.level);
  std::vector<Vector2d> pts(static_cast<size_t>(init.n));
  for (int k = 0; k < init.n; ++k) {
    const double th = 2.0 * M_PI * k / init.n;
    pts[static_cast<size_t>(k)] = to_ellipse * Vector2d(std::cos(th), std::sin(th));
  }
  return BoundaryState(std::move(pts), beta);
}

void validate(const ExpansionConfig& cfg) {
  if (!(cfg.k_n >= 0.0 && cfg.k_c >= 0.0)) throw ContractError("gains must be nonnegative");
  if (!(cfg.gamma > 0.0)) throw ContractError("gamma must be positive");
  if (!(cfg.dt > 0.0)) throw ContractError("dt must be positive");
  if (!(cfg.q_weight > 0.0)) throw ContractError("q_weight must be positive");
  if (!(cfg.convergence_tol > 0.0)) throw ContractError("convergence_tol must be positive");
  if (cfg.max_steps < 1) throw ContractError("max_steps must be at least 1");
  if (!(cfg.containment_margin >= 0.0)) throw ContractError("containment_margin must be nonnegative");
  if (!(cfg.beta >= 0.0 && cfg.beta <= 1.0)) throw ContractError("beta must be in [0, 1]");
  if (cfg.eval.speed_samples < 2) throw ContractError("speed_samples must be at least 2");
  if (cfg.init.n < 4) throw ContractError("initial boundary needs at least four points");
  if (cfg.enforce_containment &&
      !((cfg.safe_box.lo.array() < cfg.safe_box.hi.array()).all())) {
    throw ContractError("safe box is empty");
  }
}

VerificationReport verify(const SystemModel& sys, const BoundaryState& boundary,
                          const EvalConfig& cfg) {
  VerificationReport report;
  report.certificates.reserve(boundary.size());
  report.min_margin = kInf;
  for (int i = 0; i < boundary.size(); ++i) {
    SegmentCertificate cert;
    try {
      cert = certify_segment(sys, boundary, i, cfg);
    } catch (const DegenerateSegmentError&) {
      cert.segment = i;
      cert.margin = -kInf;
      cert.b_star = std::numeric_limits<double>::quiet_NaN();
      cert.u_star = Eigen::VectorXd::Constant(sys.input_dim(),
                                              std::numeric_limits<double>::quiet_NaN());
    }
    if (cert.margin < 0.0) report.failing_segments.push_back(i);
    report.min_margin = std::min(report.min_margin, cert.margin);
    report.certificates.push_back(std::move(cert));
  }
  report.all_pass = report.failing_segments.empty();
  return report;
}

Eigen::VectorXd reference_input(const BoundaryState& boundary, double k_n, double k_c) {
  const int n = boundary.size();
  Eigen::VectorXd eta(2 * n);
  for (int i = 0; i < n; ++i) {
    const Vector2d& prev = boundary.point(i - 1);
    const Vector2d& next = boundary.point(i + 1);
    const Vector2d diff = next - prev;
    const double len = diff.norm();
    if (len < 1e-12) throw DegenerateSegmentError("coincident neighbor control points");
    const Vector2d outward(diff.y() / len, -diff.x() / len);
    const Vector2d dir = diff / len;
    const Vector2d mid = 0.5 * (prev + next);
    const Vector2d proj = prev + dir.dot(boundary.point(i) - prev) * dir;
    const Vector2d ref = k_n * outward + k_c * (mid - proj);
    eta[2 * i] = ref.x();
    eta[2 * i + 1] = ref.y();
  }
  return eta;
}

SafeInputResult safe_input(const SystemModel& sys, const BoundaryState& boundary,
                           const ExpansionConfig& cfg, const std::vector<int>& warm_hint) {
  const int n = boundary.size();
  SafeInputResult out;
  out.report = verify(sys, boundary, cfg.eval);
  for (const SegmentCertificate& cert : out.report.certificates) {
    if (!std::isfinite(cert.margin)) {
      out.qp.status = QpStatus::infeasible;
      out.eta = Eigen::VectorXd::Zero(2 * n);
      return out;
    }
  }

  // Wall rows brake a segment box's face-normal edge speed once the box gets
  // within containment_margin of a safe-set face. The edge position is the
  // outermost endpoint coordinate plus the quarter-chord inflation, so its
  // velocity picks up both the endpoint's normal motion and chord stretch;
  // clamping it to gamma times the remaining clearance lets boxes coast to
  // the face instead of being pushed out and rejected.
  struct WallRow {
    int seg;
    int axis;
    bool upper;
    double clearance;
  };
  std::vector<WallRow> walls;
  if (cfg.enforce_containment) {
    for (int i = 0; i < n; ++i) {
      const StateBox box = boundary.segment(i).box();
      for (int d = 0; d < 2; ++d) {
        const double lo_clear = box.lo[d] - cfg.safe_box.lo[d];
        const double hi_clear = cfg.safe_box.hi[d] - box.hi[d];
        if (lo_clear < cfg.containment_margin) walls.push_back({i, d, false, lo_clear});
        if (hi_clear < cfg.containment_margin) walls.push_back({i, d, true, hi_clear});
      }
    }
  }

  QpProblem qp;
  qp.H = cfg.q_weight * Eigen::MatrixXd::Identity(2 * n, 2 * n);
  const Eigen::VectorXd eta_ref = reference_input(boundary, cfg.k_n, cfg.k_c);
  qp.q = -2.0 * cfg.q_weight * eta_ref;
  qp.A_ineq.resize(n + static_cast<Eigen::Index>(walls.size()), 2 * n);
  qp.b_ineq.resize(qp.A_ineq.rows());
  for (int i = 0; i < n; ++i) {
    qp.A_ineq.row(i) = grad_margin(sys, boundary, i, cfg.eval).transpose();
    qp.b_ineq[i] = -cfg.gamma * out.report.certificates[static_cast<size_t>(i)].margin;
  }
  Eigen::Index row = n;
  for (const WallRow& w : walls) {
    const int a = boundary.wrap(w.seg);
    const int b = boundary.wrap(w.seg + 1);
    const Vector2d chord = boundary.point(b) - boundary.point(a);
    const Vector2d u_hat = chord / chord.norm();
    const bool b_outer = w.upper ? boundary.point(b)[w.axis] >= boundary.point(a)[w.axis]
                                 : boundary.point(b)[w.axis] <= boundary.point(a)[w.axis];
    const int sel = b_outer ? b : a;
    const double sign = w.upper ? -1.0 : 1.0;
    qp.A_ineq.row(row).setZero();
    qp.A_ineq(row, 2 * sel + w.axis) += sign;
    // h = |chord|/4 inflates the box both ways, so its growth always eats
    // clearance regardless of which face is near.
    qp.A_ineq(row, 2 * a) += 0.25 * u_hat.x();
    qp.A_ineq(row, 2 * a + 1) += 0.25 * u_hat.y();
    qp.A_ineq(row, 2 * b) -= 0.25 * u_hat.x();
    qp.A_ineq(row, 2 * b + 1) -= 0.25 * u_hat.y();
    qp.b_ineq[row] = -cfg.gamma * w.clearance;
    ++row;
  }

  QpOptions opts;
  opts.warm_hint = warm_hint;
  out.qp = solve_qp(qp, opts);
  out.eta = out.qp.status == QpStatus::optimal ? out.qp.z_star
                                               : Eigen::VectorXd::Zero(2 * n);
  return out;
}

BoundaryState step_rk4(const BoundaryState& boundary, const EtaFn& eta_fn, double dt) {
  const double beta = boundary.beta();
  auto deriv = [&](const Eigen::VectorXd& c) {
    return eta_fn(BoundaryState::from_coords(c, beta));
  };
  return BoundaryState::from_coords(rk4_step(deriv, boundary.coords(), dt), beta);
}

bool containment_check(const BoundaryState& boundary, const StateBox& safe_box) {
  for (int i = 0; i < boundary.size(); ++i) {
    if (!safe_box.contains(boundary.segment(i).box())) return false;
  }
  return true;
}

ExpansionResult expand(const SystemModel& sys, const ExpansionConfig& cfg,
                       const ExpansionObserver& observer) {
  validate(cfg);
  ExpansionResult res{initial_boundary(cfg.init, cfg.beta), {}, ExpansionStatus::max_steps, 0, 0.0};

  const VerificationReport init_report = verify(sys, res.boundary, cfg.eval);
  if (!init_report.all_pass) {
    std::ostringstream msg;
    msg << "initial boundary failed verification; segment margins:";
    for (const SegmentCertificate& cert : init_report.certificates) msg << ' ' << cert.margin;
    throw PreconditionError(msg.str());
  }
  if (cfg.enforce_containment && !containment_check(res.boundary, cfg.safe_box)) {
    throw PreconditionError("initial boundary is not contained in the safe box");
  }

  auto note = [&res](const QpSolution& qp) {
    ++res.qp_solves;
    if (qp.status == QpStatus::optimal) {
      res.max_qp_residual = std::max(res.max_qp_residual, qp.kkt_residual);
    }
  };

  double dt = cfg.dt;
  res.trace.push_back({0, area(res.boundary), init_report.min_margin, dt});
  if (observer) observer(res.boundary, res.trace.back());

  std::vector<int> warm;
  int consecutive_fails = 0;
  int step = 1;
  while (step <= cfg.max_steps) {
    const SafeInputResult si = safe_input(sys, res.boundary, cfg, warm);
    note(si.qp);

    bool failed = si.qp.status != QpStatus::optimal;
    if (!failed && max_point_speed(si.eta) < cfg.convergence_tol) {
      res.status = ExpansionStatus::converged;
      return res;
    }

    std::optional<BoundaryState> candidate;
    std::optional<VerificationReport> candidate_report;
    if (!failed) {
      int stage = 0;
      auto eta_fn = [&](const BoundaryState& b) -> Eigen::VectorXd {
        if (stage++ == 0) return si.eta;
        const SafeInputResult stage_input = safe_input(sys, b, cfg, warm);
        note(stage_input.qp);
        if (stage_input.qp.status != QpStatus::optimal) throw StageFailure{};
        return stage_input.eta;
      };
      try {
        candidate = step_rk4(res.boundary, eta_fn, dt);
        candidate_report = verify(sys, *candidate, cfg.eval);
        failed = !candidate_report->all_pass ||
                 (cfg.enforce_containment && !containment_check(*candidate, cfg.safe_box));
      } catch (const StageFailure&) {
        failed = true;
      } catch (const DegenerateSegmentError&) {
        failed = true;
      } catch (const ContractError&) {
        failed = true;
      }
    }

    if (failed) {
      if (++consecutive_fails > 6) {
        res.status = ExpansionStatus::converged_by_fallback;
        return res;
      }
      dt *= 0.5;
      continue;
    }

    res.boundary = std::move(*candidate);
    warm = si.qp.active_set;
    consecutive_fails = 0;
    res.trace.push_back({step, area(res.boundary), candidate_report->min_margin, dt});
    if (observer) observer(res.boundary, res.trace.back());
    dt = cfg.dt;
    ++step;
  }
  res.status = ExpansionStatus::max_steps;
  return res;
}

}  // namespace cise
