#pragma once

#include <functional>

#include "bz/model.hpp"

namespace bz {

/// Time for ρ' = ρ(1-ρ)/ε to climb from c_star to target (0 < c_star <= target < 1):
/// ε·ln((1-c_star)·target / (c_star·(1-target))).
double logistic_hit_time(double c_star, double target, const ModelParams& p);

/// Time for y' = -y + source to move from y0 to target, which must lie
/// between y0 and source (or equal y0).  Throws DomainError otherwise.
double relaxation_hit_time(double y0, double source, double target);

struct HitOptions {
  double step = 1e-4;   ///< fixed RK4 step
  double max_T = 1e4;   ///< give up after this much time
  double hit_tol = 1e-10;  ///< bisection width of the crossing time
};

/// Crossing time of y' = rhs(y) from y0 to target by fixed-step RK4, the
/// crossing step refined by bisection in time.  rhs(y0) must point at the
/// target and the solution must move monotonically (checked every step).
/// Throws ConvergenceError reporting the last value if max_T is reached.
double ode_hit_time(const std::function<double(double)>& rhs, double y0, double target, const HitOptions& opt = {});

/// RK4 step for the kinetic comparison ODEs s' = s(1-s)/ε - h·coupling·(s-q)/(s+q)
/// on [q, max(1, top)]: min(min(ε,1)/100, 0.5/L) with L a bound of |rhs'|.
double kinetic_hit_step(double coupling, double top, const ModelParams& p);

/// Interior fractions selecting q2 in (q, q1), q3 in (q, q2) and u* in (κ*, ū).
struct ChainMargins {
  double q2 = 0.5;
  double q3 = 0.5;
  double u = 0.5;
};

/// The μ leg stops at ū - edge_eps·(ū - u*), just inside the open edge.
inline constexpr double kEdgeEps = 1e-6;

/// Thresholds and hitting times (offsets from t*) of the comparison chain
/// ρ → σ → ν → κ → μ that drives any positive solution into S.
struct TrapChainResult {
  double c_star = 0.0;
  double m = 0.0;
  double u_bar = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double kappa_star = 0.0;
  double u_star = 0.0;
  double mu_target = 0.0;
  double T1 = 0.0;
  double T2 = 0.0;
  double T3 = 0.0;
  double T4 = 0.0;
  double T_sharp = 0.0;
  ChainMargins margins;
};

/// Requires 0 < c_star < q and m >= 1.  Throws BoundViolation naming the
/// threshold whose interval collapsed.
TrapChainResult trap_chain(double c_star, double m, const ModelParams& p, const ChainMargins& margins = {});

/// Refinement of S: the box (q_nat, u_nat)² with q_nat in [q, q1) and
/// u_nat in (κ̄, ū], entered by time T_nat.
struct NaturalRegion {
  double q_nat = 0.0;
  double u_nat = 0.0;
  double kappa_bar = 0.0;
  double q3_floor = 0.0;  ///< smallest q3 for which κ* < u_nat
  TrapChainResult chain;  ///< chain rerun with tightened thresholds
  double T_nat = 0.0;
};

/// Reruns the chain with q3 above max(q_nat, q3_floor) and u* below u_nat.
/// Throws DomainError if q_nat or u_nat lie outside their intervals.
NaturalRegion natural_region(double m, const ModelParams& p, double q_nat, double u_nat, double c_star,
                             const ChainMargins& margins = {});

}  // namespace bz
