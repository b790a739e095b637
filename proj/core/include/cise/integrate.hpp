#pragma once

namespace cise {

// One classical Runge-Kutta step of xdot = f(x). Works for any Eigen vector
// type with the usual arithmetic.
template <class Vec, class Fn>
Vec rk4_step(Fn&& f, const Vec& x, double dt) {
  const Vec k1 = f(x);
  const Vec k2 = f(Vec(x + (0.5 * dt) * k1));
  const Vec k3 = f(Vec(x + (0.5 * dt) * k2));
  const Vec k4 = f(Vec(x + dt * k3));
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace cise
