#pragma once

#include <array>
#include <boost/numeric/odeint.hpp>

#include "bz/model.hpp"

namespace oracle {

/// Space-free kinetics u' = reaction_u, v' = u - v integrated by an adaptive
/// Dormand–Prince 5(4) pair.
inline std::array<double, 2> kinetics(double u0, double v0, double T, const bz::ModelParams& p,
                                      double tol = 1e-12) {
  using State = std::array<double, 2>;
  namespace odeint = boost::numeric::odeint;
  State x{u0, v0};
  auto rhs = [&](const State& s, State& ds, double) {
    ds[0] = bz::reaction_u(s[0], s[1], p);
    ds[1] = bz::reaction_v(s[0], s[1]);
  };
  odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(tol, tol), rhs, x, 0.0, T,
                             std::min(T, 1e-6));
  return x;
}

/// Scalar s' = f(s) with the same stepper.
template <class F>
double scalar(F f, double s0, double T, double tol = 1e-12) {
  using State = std::array<double, 1>;
  namespace odeint = boost::numeric::odeint;
  State x{s0};
  auto rhs = [&](const State& s, State& ds, double) { ds[0] = f(s[0]); };
  odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(tol, tol), rhs, x, 0.0, T,
                             std::min(T, 1e-6));
  return x[0];
}

}  // namespace oracle
