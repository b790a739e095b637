#include "cise/safety_filter.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cise/integrate.hpp"
#include "cise/qp_solver.hpp"

namespace cise {
namespace {

// Golden-section minimization; the bracket is one coarse sample wide, where
// the squared distance to the curve is unimodal.
template <class Fn>
double golden_min(Fn&& f, double lo, double hi, double tol) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - ratio * (hi - lo);
  double d = lo + ratio * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - ratio * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + ratio * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

bool even_odd_inside(const std::vector<Vector2d>& poly, const Vector2d& x) {
  bool inside = false;
  const size_t m = poly.size();
  for (size_t k = 0; k < m; ++k) {
    const Vector2d& a = poly[k];
    const Vector2d& b = poly[(k + 1) % m];
    if ((a.y() > x.y()) != (b.y() > x.y())) {
      const double cx = a.x() + (x.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (x.x() < cx) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

SdfEvaluator::SdfEvaluator(const BoundaryState& boundary, int samples_per_segment)
    : boundary_(boundary), spp_(samples_per_segment) {
  if (spp_ < 2) throw ContractError("sdf needs at least two samples per segment");
  segments_.reserve(boundary_.size());
  for (int i = 0; i < boundary_.size(); ++i) segments_.push_back(boundary_.segment(i));
  poly_ = polyline(boundary_, spp_);
}

SdfResult SdfEvaluator::operator()(const Vector2d& x) const {
  const int n = boundary_.size();

  // Coarse pass: best sample per segment.
  std::vector<double> seg_best(static_cast<size_t>(n),
                               std::numeric_limits<double>::infinity());
  std::vector<double> seg_best_t(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const Segment& seg = segments_[static_cast<size_t>(i)];
    const double span = seg.knots().span();
    for (int j = 0; j < spp_; ++j) {
      const double t = seg.t_start() + span * j / spp_;
      const double d2 = (poly_[static_cast<size_t>(i * spp_ + j)] - x).squaredNorm();
      if (d2 < seg_best[static_cast<size_t>(i)]) {
        seg_best[static_cast<size_t>(i)] = d2;
        seg_best_t[static_cast<size_t>(i)] = t;
      }
    }
  }
  int first = 0;
  for (int i = 1; i < n; ++i) {
    if (seg_best[static_cast<size_t>(i)] < seg_best[static_cast<size_t>(first)]) first = i;
  }
  int second = -1;
  for (int i = 0; i < n; ++i) {
    if (i == first) continue;
    if (second < 0 || seg_best[static_cast<size_t>(i)] < seg_best[static_cast<size_t>(second)]) {
      second = i;
    }
  }

  // Refinement pass, lowest segment index first so exact ties are stable.
  double best_d2 = std::numeric_limits<double>::infinity();
  Vector2d best_point = Vector2d::Zero();
  for (int i : {std::min(first, second), std::max(first, second)}) {
    if (i < 0) continue;
    const Segment& seg = segments_[static_cast<size_t>(i)];
    const double span = seg.knots().span();
    const double t0 = seg_best_t[static_cast<size_t>(i)];
    const double lo = std::max(seg.t_start(), t0 - span / spp_);
    const double hi = std::min(seg.t_end(), t0 + span / spp_);
    const double t = golden_min(
        [&](double tt) { return (seg.position(tt) - x).squaredNorm(); }, lo, hi, 1e-10);
    const Vector2d p = seg.position(t);
    const double d2 = (p - x).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_point = p;
    }
  }

  SdfResult out;
  out.closest_point = best_point;
  const double dist = std::sqrt(best_d2);
  out.h = even_odd_inside(poly_, x) ? dist : -dist;
  if (dist < 1e-12) {
    out.zero_gradient = true;
  } else {
    out.gradient = (out.h >= 0.0 ? 1.0 : -1.0) * (x - best_point) / dist;
  }
  return out;
}

SdfResult signed_distance(const BoundaryState& boundary, const Vector2d& x,
                          int samples_per_segment) {
  return SdfEvaluator(boundary, samples_per_segment)(x);
}

FilterResult filter_control(const SdfEvaluator& sdf, const SystemModel& sys, const Vector2d& x,
                            const Eigen::VectorXd& u_ref, double gamma, double k_s) {
  if (!(k_s > 0.0)) throw ContractError("slack weight must be positive");
  if (!(gamma > 0.0)) throw ContractError("gamma must be positive");
  const int l = sys.input_dim();
  if (u_ref.size() != l) throw ContractError("reference input dimension mismatch");

  // The slack enters as s = sqrt(k_s) * delta, so the cost stays ||u-u_ref||^2
  // + s^2 and the Hessian is the identity no matter how hard slack is
  // penalized; large k_s then shows up only as a small coefficient on s in the
  // constraint row instead of an ill-conditioned cost block.
  const double root_ks = std::sqrt(k_s);
  const SdfResult s = sdf(x);
  QpProblem qp;
  qp.H = Eigen::MatrixXd::Identity(l + 1, l + 1);
  qp.q = Eigen::VectorXd::Zero(l + 1);
  qp.q.head(l) = -2.0 * u_ref;
  qp.A_ineq.resize(1, l + 1);
  qp.A_ineq.leftCols(l) = (s.gradient.transpose() * sys.g(x)).eval();
  qp.A_ineq(0, l) = 1.0 / root_ks;
  qp.b_ineq.resize(1);
  qp.b_ineq[0] = -gamma * s.h - s.gradient.dot(sys.f(x));
  qp.z_min.resize(l + 1);
  qp.z_min.head(l) = sys.u_min();
  qp.z_min[l] = 0.0;
  qp.z_max.resize(l + 1);
  qp.z_max.head(l) = sys.u_max();
  qp.z_max[l] = std::numeric_limits<double>::infinity();

  const QpSolution sol = solve_qp(qp);
  if (sol.status != QpStatus::optimal) {
    throw std::logic_error("safety filter qp failed despite guaranteed feasibility");
  }
  FilterResult out;
  out.u = sol.z_star.head(l);
  out.delta = sol.z_star[l] / root_ks;
  out.qp_residual = sol.kkt_residual;
  return out;
}

FilterResult filter_control(const BoundaryState& boundary, const SystemModel& sys,
                            const Vector2d& x, const Eigen::VectorXd& u_ref, double gamma,
                            double k_s) {
  return filter_control(SdfEvaluator(boundary), sys, x, u_ref, gamma, k_s);
}

std::vector<SimStep> simulate(const BoundaryState& boundary, const SystemModel& sys,
                              const Vector2d& x0, const RefPolicy& u_ref, double horizon,
                              double dt_sim, const FilterConfig& cfg) {
  if (!(horizon > 0.0)) throw ContractError("horizon must be positive");
  if (!(dt_sim > 0.0)) throw ContractError("dt_sim must be positive");
  const SdfEvaluator sdf(boundary, cfg.samples_per_segment);
  if (!(sdf(x0).h > 0.0)) {
    throw PreconditionError("initial state is not strictly inside the boundary");
  }

  const int steps = std::max(1, static_cast<int>(std::llround(horizon / dt_sim)));
  std::vector<SimStep> traj;
  traj.reserve(static_cast<size_t>(steps) + 1);
  Vector2d x = x0;
  for (int k = 0; k <= steps; ++k) {
    const double t = k * dt_sim;
    const FilterResult fr = filter_control(sdf, sys, x, u_ref(t, x), cfg.gamma, cfg.k_s);
    traj.push_back({t, x, fr.u, fr.delta, sdf(x).h, fr.qp_residual});
    if (k < steps) {
      const Eigen::VectorXd u = fr.u;
      x = rk4_step([&](const Vector2d& xx) { return Vector2d(sys.closed_loop(xx, u)); }, x,
                   dt_sim);
    }
  }
  return traj;
}

}  // namespace cise
