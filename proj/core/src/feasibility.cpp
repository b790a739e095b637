#include "cise/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cise {

LpSolution solve_box_lp(const Eigen::VectorXd& c, const Eigen::VectorXd& w_min,
                        const Eigen::VectorXd& w_max) {
  if (c.size() != w_min.size() || c.size() != w_max.size()) {
    throw ContractError("box lp dimension mismatch");
  }
  LpSolution sol;
  sol.minimizer.resize(c.size());
  sol.tie_mask.assign(static_cast<size_t>(c.size()), false);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (w_min[i] > w_max[i]) throw ContractError("box lp has an empty box");
    if (c[i] > 0.0) {
      sol.minimizer[i] = w_min[i];
    } else if (c[i] < 0.0) {
      sol.minimizer[i] = w_max[i];
    } else {
      sol.minimizer[i] = std::clamp(0.0, w_min[i], w_max[i]);
      sol.tie_mask[static_cast<size_t>(i)] = true;
    }
  }
  sol.value = c.dot(sol.minimizer);
  return sol;
}

double lp_lipschitz(const Eigen::VectorXd& w_min, const Eigen::VectorXd& w_max) {
  for (Eigen::Index i = 0; i < w_min.size(); ++i) {
    if (w_min[i] > w_max[i]) throw ContractError("box lp has an empty box");
  }
  return w_min.cwiseAbs().cwiseMax(w_max.cwiseAbs()).norm();
}

FlowMargin b_star(const SystemModel& sys, const Vector2d& x, const Vector2d& n) {
  if (std::abs(n.norm() - 1.0) > 1e-9) throw ContractError("normal must have unit length");
  const Eigen::VectorXd c = sys.g(x).transpose() * n;
  const LpSolution lp = solve_box_lp(-c, sys.u_min(), sys.u_max());
  FlowMargin out;
  out.value = n.dot(sys.f(x)) - lp.value;
  out.u_star = lp.minimizer;
  out.tie = std::find(lp.tie_mask.begin(), lp.tie_mask.end(), true) != lp.tie_mask.end();
  return out;
}

double segment_lipschitz(const SystemModel& sys, const Segment& seg, const EvalConfig& cfg) {
  const SpeedBounds sb = seg.speed_bounds(cfg.speed_samples);
  const IntervalBounds ib = sys.interval(seg.box());
  const double l_n = cfg.mode == LipschitzMode::sound ? 2.0 * sb.max_accel / sb.min_speed
                                                      : sb.max_accel;
  const double l_nf = l_n * ib.m_f + ib.l_f * sb.max_speed;
  const double l_ng = l_n * ib.m_g + ib.l_g * sb.max_speed;
  return l_nf + lp_lipschitz(sys.u_min(), sys.u_max()) * l_ng;
}

SegmentCertificate certify_segment(const SystemModel& sys, const Segment& seg,
                                   const EvalConfig& cfg) {
  const EnforcementPoint ep = seg.enforcement_point();
  const FlowMargin fm = b_star(sys, ep.point, seg.inward_normal(ep.t));

  SegmentCertificate cert;
  cert.segment = seg.index();
  cert.t = ep.t;
  cert.point = ep.point;
  cert.b_star = fm.value;
  cert.u_star = fm.u_star;
  cert.tie = fm.tie;
  cert.l_b_tau = segment_lipschitz(sys, seg, cfg);
  cert.half_width = ep.half_width;
  cert.margin = cert.b_star - cert.l_b_tau * cert.half_width;
  return cert;
}

SegmentCertificate certify_segment(const SystemModel& sys, const BoundaryState& boundary, int i,
                                   const EvalConfig& cfg) {
  return certify_segment(sys, boundary.segment(i), cfg);
}

std::vector<SegmentCertificate> certify_boundary(const SystemModel& sys,
                                                 const BoundaryState& boundary,
                                                 const EvalConfig& cfg) {
  std::vector<SegmentCertificate> certs;
  certs.reserve(boundary.size());
  for (int i = 0; i < boundary.size(); ++i) {
    certs.push_back(certify_segment(sys, boundary.segment(i), cfg));
  }
  return certs;
}

double min_margin(const std::vector<SegmentCertificate>& certs) {
  double lowest = std::numeric_limits<double>::infinity();
  for (const SegmentCertificate& c : certs) lowest = std::min(lowest, c.margin);
  return lowest;
}

Eigen::VectorXd grad_margin(const SystemModel& sys, const BoundaryState& boundary, int i,
                            const EvalConfig& cfg) {
  const double h_fd = 1e-6 * (1.0 + boundary.coords().lpNorm<Eigen::Infinity>());
  std::array<Vector2d, 4> window = {boundary.point(i - 1), boundary.point(i),
                                    boundary.point(i + 1), boundary.point(i + 2)};
  auto margin_of = [&](const std::array<Vector2d, 4>& pts) {
    const Segment seg(pts, boundary.beta(), boundary.wrap(i));
    return certify_segment(sys, seg, cfg).margin;
  };

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(2 * boundary.size());
  for (int slot = 0; slot < 4; ++slot) {
    for (int d = 0; d < 2; ++d) {
      std::array<Vector2d, 4> bumped = window;
      bumped[slot][d] = window[slot][d] + h_fd;
      const double up = margin_of(bumped);
      bumped[slot][d] = window[slot][d] - h_fd;
      const double down = margin_of(bumped);
      grad[2 * boundary.wrap(i - 1 + slot) + d] = (up - down) / (2.0 * h_fd);
    }
  }
  return grad;
}

}  // namespace cise
