#include "cise/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cise/errors.hpp"

namespace cise {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RowSet {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
};

// General rows first, then finite lower bounds, then finite upper bounds,
// each as a unit row so one multiplier vector covers everything.
RowSet combined_rows(const QpProblem& prob) {
  const Eigen::Index n = prob.q.size();
  std::vector<std::pair<Eigen::Index, double>> extra;
  if (prob.z_min.size() > 0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (prob.z_min[i] > -kInf) extra.emplace_back(i, prob.z_min[i]);
    }
  }
  const size_t n_lower = extra.size();
  if (prob.z_max.size() > 0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (prob.z_max[i] < kInf) extra.emplace_back(i, -prob.z_max[i]);
    }
  }
  RowSet rows;
  rows.a = Eigen::MatrixXd::Zero(prob.A_ineq.rows() + static_cast<Eigen::Index>(extra.size()), n);
  rows.b.resize(rows.a.rows());
  rows.a.topRows(prob.A_ineq.rows()) = prob.A_ineq;
  rows.b.head(prob.b_ineq.size()) = prob.b_ineq;
  for (size_t k = 0; k < extra.size(); ++k) {
    const Eigen::Index row = prob.A_ineq.rows() + static_cast<Eigen::Index>(k);
    rows.a(row, extra[k].first) = k < n_lower ? 1.0 : -1.0;
    rows.b[row] = extra[k].second;
  }
  return rows;
}

void validate(const QpProblem& prob) {
  const Eigen::Index n = prob.q.size();
  if (n == 0) throw ContractError("qp has no variables");
  if (prob.H.rows() != n || prob.H.cols() != n) throw ContractError("qp hessian shape mismatch");
  if (prob.A_ineq.rows() != prob.b_ineq.size() ||
      (prob.A_ineq.rows() > 0 && prob.A_ineq.cols() != n)) {
    throw ContractError("qp constraint shape mismatch");
  }
  if (prob.z_min.size() > 0 && prob.z_min.size() != n) {
    throw ContractError("qp lower bound shape mismatch");
  }
  if (prob.z_max.size() > 0 && prob.z_max.size() != n) {
    throw ContractError("qp upper bound shape mismatch");
  }
  if (prob.z_min.size() > 0 && prob.z_max.size() > 0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (prob.z_min[i] > prob.z_max[i]) throw ContractError("qp box is empty");
    }
  }
}

}  // namespace

QpSolution solve_qp(const QpProblem& prob, const QpOptions& opts) {
  validate(prob);
  const Eigen::Index n = prob.q.size();
  const Eigen::MatrixXd g = prob.H + prob.H.transpose();
  const Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw ContractError("qp hessian is not positive definite");

  const RowSet rows = combined_rows(prob);
  const Eigen::Index m = rows.a.rows();

  QpSolution res;
  res.z_star = llt.solve(-prob.q);
  res.lambda = Eigen::VectorXd::Zero(m);

  std::vector<int> active;
  std::vector<double> mult;

  auto slack = [&](Eigen::Index i) { return rows.a.row(i).dot(res.z_star) - rows.b[i]; };

  // Most violated row, hinted rows searched first. Lowest index breaks ties.
  auto pick_violated = [&]() -> int {
    int best = -1;
    double worst = -opts.tol;
    for (int i : opts.warm_hint) {
      if (i < 0 || i >= m) continue;
      const double s = slack(i);
      if (s < worst) {
        worst = s;
        best = i;
      }
    }
    if (best >= 0) return best;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double s = slack(i);
      if (s < worst) {
        worst = s;
        best = static_cast<int>(i);
      }
    }
    return best;
  };

  int iter = 0;
  while (iter < opts.max_iter) {
    const int p = pick_violated();
    if (p < 0) {
      res.status = QpStatus::optimal;
      break;
    }
    const Eigen::VectorXd a_p = rows.a.row(p).transpose();
    double lam_p = 0.0;
    double s_p = slack(p);

    while (s_p < -opts.tol) {
      if (++iter > opts.max_iter) break;
      const Eigen::VectorXd y = llt.solve(a_p);
      const Eigen::Index k = static_cast<Eigen::Index>(active.size());
      Eigen::VectorXd r(k);
      Eigen::VectorXd d_z = y;
      if (k > 0) {
        Eigen::MatrixXd nmat(n, k);
        for (Eigen::Index j = 0; j < k; ++j) nmat.col(j) = rows.a.row(active[j]).transpose();
        const Eigen::MatrixXd ginv_n = llt.solve(nmat);
        r = (nmat.transpose() * ginv_n).ldlt().solve(nmat.transpose() * y);
        d_z = y - ginv_n * r;
      }

      // Blocking step in the dual: first active multiplier driven to zero.
      double t1 = kInf;
      Eigen::Index drop = -1;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (r[j] > 1e-14) {
          const double t = mult[j] / r[j];
          if (t < t1) {
            t1 = t;
            drop = j;
          }
        }
      }

      // Full primal step that makes row p tight. A direction that collapses
      // numerically means a_p lies in the span of the active rows.
      double t2 = kInf;
      if (d_z.norm() > 1e-12 * (1.0 + y.norm())) {
        const double denom = a_p.dot(d_z);
        if (denom > 0.0) t2 = -s_p / denom;
      }

      const double t = std::min(t1, t2);
      if (t == kInf) {
        res.status = QpStatus::infeasible;
        res.iterations = iter;
        res.kkt_residual = kInf;
        return res;
      }

      if (t2 < kInf) res.z_star += t * d_z;
      for (Eigen::Index j = 0; j < k; ++j) mult[j] -= t * r[j];
      lam_p += t;

      if (t2 <= t1) {
        active.push_back(p);
        mult.push_back(lam_p);
        break;
      }
      active.erase(active.begin() + drop);
      mult.erase(mult.begin() + drop);
      s_p = slack(p);
    }
    if (iter > opts.max_iter) break;
  }

  if (res.status != QpStatus::optimal && iter >= opts.max_iter) res.status = QpStatus::max_iter;
  for (size_t j = 0; j < active.size(); ++j) {
    res.lambda[active[j]] = std::max(0.0, mult[j]);
  }
  res.active_set = active;
  std::sort(res.active_set.begin(), res.active_set.end());
  res.iterations = iter;
  res.objective = res.z_star.dot(prob.H * res.z_star) + prob.q.dot(res.z_star);
  res.kkt_residual = res.status == QpStatus::optimal ? check_kkt(prob, res.z_star) : kInf;
  return res;
}

double check_kkt(const QpProblem& prob, const Eigen::VectorXd& z, double act_tol) {
  validate(prob);
  if (z.size() != prob.q.size()) throw ContractError("qp solution shape mismatch");
  const RowSet rows = combined_rows(prob);
  const Eigen::VectorXd grad = (prob.H + prob.H.transpose()) * z + prob.q;

  double primal = 0.0;
  std::vector<Eigen::Index> act;
  for (Eigen::Index i = 0; i < rows.a.rows(); ++i) {
    const double s = rows.a.row(i).dot(z) - rows.b[i];
    primal = std::max(primal, -s);
    if (s <= act_tol) act.push_back(i);
  }

  double stationarity = grad.lpNorm<Eigen::Infinity>();
  double dual = 0.0;
  double comp = 0.0;
  if (!act.empty()) {
    Eigen::MatrixXd nmat(z.size(), static_cast<Eigen::Index>(act.size()));
    for (size_t j = 0; j < act.size(); ++j) {
      nmat.col(static_cast<Eigen::Index>(j)) = rows.a.row(act[j]).transpose();
    }
    const Eigen::VectorXd lam = nmat.colPivHouseholderQr().solve(grad);
    stationarity = (grad - nmat * lam).lpNorm<Eigen::Infinity>();
    for (size_t j = 0; j < act.size(); ++j) {
      const double s = rows.a.row(act[j]).dot(z) - rows.b[act[j]];
      dual = std::max(dual, -lam[static_cast<Eigen::Index>(j)]);
      comp = std::max(comp, std::abs(lam[static_cast<Eigen::Index>(j)] * s));
    }
  }
  return std::max({primal, stationarity, dual, comp});
}

}  // namespace cise
