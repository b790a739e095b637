#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "cise/errors.hpp"

namespace cise {

using Eigen::Matrix2d;
using Eigen::Vector2d;
using Eigen::VectorXd;
using Matrix2Xd = Eigen::Matrix<double, 2, Eigen::Dynamic>;

// Axis-aligned box of planar states.
struct StateBox {
  Vector2d lo = Vector2d::Zero();
  Vector2d hi = Vector2d::Zero();

  bool contains(const Vector2d& x) const {
    return x.x() >= lo.x() && x.x() <= hi.x() && x.y() >= lo.y() && x.y() <= hi.y();
  }
  bool contains(const StateBox& inner) const {
    return contains(inner.lo) && contains(inner.hi);
  }
};

// Worst-case bounds over a state box, consumed by the certificate machinery:
//   m_f >= sup |f(x)|_2          l_f >= sup |jac_f(x)|_2
//   m_g >= column-aggregated sup of |g_j(x)|_2 (2-norm over columns)
//   l_g >= column-aggregated sup of |jac_g_j(x)|_2
struct IntervalBounds {
  double m_f = 0.0;
  double l_f = 0.0;
  double m_g = 0.0;
  double l_g = 0.0;
};

// Control-affine planar system xdot = f(x) + g(x) u with a box-bounded input
// set. Evaluation callbacks are supplied at construction; the two built-in
// models come with closed-form interval bounds.
class SystemModel {
 public:
  using VectorField = std::function<Vector2d(const Vector2d&)>;
  using InputMatrix = std::function<Matrix2Xd(const Vector2d&)>;
  using JacobianF = std::function<Matrix2d(const Vector2d&)>;
  using JacobianG = std::function<std::vector<Matrix2d>(const Vector2d&)>;
  using IntervalFn = std::function<IntervalBounds(const StateBox&)>;

  SystemModel(std::string name, VectorXd u_min, VectorXd u_max, VectorField f,
              InputMatrix g, JacobianF jac_f, JacobianG jac_g, IntervalFn interval);

  const std::string& name() const { return name_; }
  int input_dim() const { return static_cast<int>(u_min_.size()); }
  const VectorXd& u_min() const { return u_min_; }
  const VectorXd& u_max() const { return u_max_; }

  Vector2d f(const Vector2d& x) const { return f_(x); }
  Matrix2Xd g(const Vector2d& x) const { return g_(x); }
  Matrix2d jac_f(const Vector2d& x) const { return jac_f_(x); }
  std::vector<Matrix2d> jac_g(const Vector2d& x) const { return jac_g_(x); }

  // Bounds valid on the whole box; exact at degenerate (point) boxes for the
  // built-in models.
  IntervalBounds interval(const StateBox& box) const { return interval_(box); }

  // Closed-loop vector field under a held input.
  Vector2d closed_loop(const Vector2d& x, const VectorXd& u) const {
    return f_(x) + g_(x) * u;
  }

 private:
  std::string name_;
  VectorXd u_min_, u_max_;
  VectorField f_;
  InputMatrix g_;
  JacobianF jac_f_;
  JacobianG jac_g_;
  IntervalFn interval_;
};

// Planar double integrator: f = (x2, 0), g = (0, 1), |u| <= u_limit.
SystemModel double_integrator(double u_limit = 1.0);

// Torque-limited inverted pendulum about the upright equilibrium:
//   f = (phi_dot, (gravity / length) sin phi),  g = (0, 1 / (mass length^2)).
SystemModel inverted_pendulum(double mass = 1.0, double length = 1.0,
                              double gravity = 1.0, double u_limit = 2.0);

struct SystemParams {
  double mass = 1.0;
  double length = 1.0;
  double gravity = 1.0;
  VectorXd u_min;  // empty -> model default
  VectorXd u_max;
};

// Name-keyed construction used by the config layer. Unknown names raise a
// ContractError listing the available models.
SystemModel make_system(const std::string& name, const SystemParams& params = {});
std::vector<std::string> system_names();

}  // namespace cise
