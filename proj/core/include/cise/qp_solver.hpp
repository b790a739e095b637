#pragma once

#include <Eigen/Dense>
#include <vector>

namespace cise {

// Minimize z' H z + q' z subject to A_ineq z >= b_ineq plus optional box
// bounds on z. H must be positive definite (only its symmetric part is used).
// Box bounds are folded into the row list behind the general rows, finite
// lower bounds first and finite upper bounds after, so multipliers for the
// general rows always occupy the leading entries of lambda.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd q;
  Eigen::MatrixXd A_ineq;
  Eigen::VectorXd b_ineq;
  Eigen::VectorXd z_min;
  Eigen::VectorXd z_max;
};

enum class QpStatus { optimal, infeasible, max_iter };

struct QpSolution {
  QpStatus status = QpStatus::max_iter;
  Eigen::VectorXd z_star;
  Eigen::VectorXd lambda;
  std::vector<int> active_set;
  double kkt_residual = 0.0;
  int iterations = 0;
  double objective = 0.0;
};

struct QpOptions {
  int max_iter = 1000;
  double tol = 1e-10;
  // Rows to examine first when hunting for a violated constraint. Purely an
  // ordering hint; the minimizer is unique so the answer does not depend on it.
  std::vector<int> warm_hint;
};

QpSolution solve_qp(const QpProblem& prob, const QpOptions& opts = {});

// Worst KKT residual of a proposed solution, with multipliers reconstructed
// from scratch by least squares on the rows active at z. Covers primal
// violation, stationarity, dual sign, and complementary slackness.
double check_kkt(const QpProblem& prob, const Eigen::VectorXd& z, double act_tol = 1e-7);

}  // namespace cise
