#include "cise/dynamics.hpp"

#include <cmath>
#include <utility>

namespace cise {
namespace {

void check_box(const StateBox& box) {
  if (!(box.lo.x() <= box.hi.x()) || !(box.lo.y() <= box.hi.y())) {
    throw ContractError("state box has lo > hi");
  }
}

double max_abs(double a, double b) { return std::max(std::abs(a), std::abs(b)); }

// Does [a, b] contain offset + k * period for some integer k?
bool contains_lattice(double a, double b, double offset, double period) {
  const double k = std::ceil((a - offset) / period);
  return offset + k * period <= b;
}

double max_abs_sin(double a, double b) {
  if (contains_lattice(a, b, 0.5 * M_PI, M_PI)) return 1.0;
  return max_abs(std::sin(a), std::sin(b));
}

double max_abs_cos(double a, double b) {
  if (contains_lattice(a, b, 0.0, M_PI)) return 1.0;
  return max_abs(std::cos(a), std::cos(b));
}

}  // namespace

SystemModel::SystemModel(std::string name, VectorXd u_min, VectorXd u_max, VectorField f,
                         InputMatrix g, JacobianF jac_f, JacobianG jac_g, IntervalFn interval)
    : name_(std::move(name)),
      u_min_(std::move(u_min)),
      u_max_(std::move(u_max)),
      f_(std::move(f)),
      g_(std::move(g)),
      jac_f_(std::move(jac_f)),
      jac_g_(std::move(jac_g)),
      interval_(std::move(interval)) {
  if (u_min_.size() == 0 || u_min_.size() != u_max_.size()) {
    throw ContractError("system '" + name_ + "': input bounds must be nonempty and equal-sized");
  }
  for (int i = 0; i < u_min_.size(); ++i) {
    if (!(u_min_[i] <= u_max_[i])) {
      throw ContractError("system '" + name_ + "': u_min exceeds u_max");
    }
  }
  if (!f_ || !g_ || !jac_f_ || !jac_g_ || !interval_) {
    throw ContractError("system '" + name_ + "': missing evaluation callback");
  }
}

SystemModel double_integrator(double u_limit) {
  if (!(u_limit > 0.0)) throw ContractError("double_integrator: u_limit must be positive");
  VectorXd lo(1), hi(1);
  lo << -u_limit;
  hi << u_limit;
  return SystemModel(
      "double_integrator", lo, hi,
      [](const Vector2d& x) { return Vector2d(x.y(), 0.0); },
      [](const Vector2d&) {
        Matrix2Xd g(2, 1);
        g << 0.0, 1.0;
        return g;
      },
      [](const Vector2d&) {
        Matrix2d j;
        j << 0.0, 1.0, 0.0, 0.0;
        return j;
      },
      [](const Vector2d&) { return std::vector<Matrix2d>{Matrix2d::Zero()}; },
      [](const StateBox& box) {
        check_box(box);
        IntervalBounds b;
        b.m_f = max_abs(box.lo.y(), box.hi.y());
        b.l_f = 1.0;
        b.m_g = 1.0;
        b.l_g = 0.0;
        return b;
      });
}

SystemModel inverted_pendulum(double mass, double length, double gravity, double u_limit) {
  if (!(mass > 0.0) || !(length > 0.0) || !(gravity > 0.0) || !(u_limit > 0.0)) {
    throw ContractError("inverted_pendulum: mass, length, gravity, u_limit must be positive");
  }
  const double drift_gain = gravity / length;
  const double input_gain = 1.0 / (mass * length * length);
  VectorXd lo(1), hi(1);
  lo << -u_limit;
  hi << u_limit;
  return SystemModel(
      "inverted_pendulum", lo, hi,
      [drift_gain](const Vector2d& x) { return Vector2d(x.y(), drift_gain * std::sin(x.x())); },
      [input_gain](const Vector2d&) {
        Matrix2Xd g(2, 1);
        g << 0.0, input_gain;
        return g;
      },
      [drift_gain](const Vector2d& x) {
        Matrix2d j;
        j << 0.0, 1.0, drift_gain * std::cos(x.x()), 0.0;
        return j;
      },
      [](const Vector2d&) { return std::vector<Matrix2d>{Matrix2d::Zero()}; },
      [drift_gain, input_gain](const StateBox& box) {
        check_box(box);
        IntervalBounds b;
        const double speed = max_abs(box.lo.y(), box.hi.y());
        const double torque = drift_gain * max_abs_sin(box.lo.x(), box.hi.x());
        b.m_f = std::hypot(speed, torque);
        // jac_f = [[0, 1], [drift_gain cos phi, 0]] has spectral norm
        // max(1, drift_gain |cos phi|).
        b.l_f = std::max(1.0, drift_gain * max_abs_cos(box.lo.x(), box.hi.x()));
        b.m_g = input_gain;
        b.l_g = 0.0;
        return b;
      });
}

SystemModel make_system(const std::string& name, const SystemParams& params) {
  const bool has_bounds = params.u_min.size() > 0 || params.u_max.size() > 0;
  if (has_bounds && (params.u_min.size() != 1 || params.u_max.size() != 1)) {
    throw ContractError("make_system: built-in models take one-dimensional input bounds");
  }
  auto with_bounds = [&](SystemModel model) {
    if (!has_bounds) return model;
    return SystemModel(model.name(), params.u_min, params.u_max,
                       [model](const Vector2d& x) { return model.f(x); },
                       [model](const Vector2d& x) { return model.g(x); },
                       [model](const Vector2d& x) { return model.jac_f(x); },
                       [model](const Vector2d& x) { return model.jac_g(x); },
                       [model](const StateBox& box) { return model.interval(box); });
  };
  if (name == "double_integrator") return with_bounds(double_integrator());
  if (name == "inverted_pendulum") {
    return with_bounds(inverted_pendulum(params.mass, params.length, params.gravity));
  }
  std::string known;
  for (const auto& n : system_names()) known += (known.empty() ? "" : ", ") + n;
  throw ContractError("unknown system '" + name + "' (known: " + known + ")");
}

std::vector<std::string> system_names() { return {"double_integrator", "inverted_pendulum"}; }

}  // namespace cise
