#include "bz/comparison.hpp"

#include <algorithm>
#include <cmath>

#include "bz/error.hpp"
#include "bz/grid.hpp"

namespace bz {

namespace {

double rk4(const std::function<double(double)>& f, double y, double h) {
  const double k1 = f(y);
  const double k2 = f(y + 0.5 * h * k1);
  const double k3 = f(y + 0.5 * h * k2);
  const double k4 = f(y + h * k3);
  return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void require_interval(double lo, double x, double hi, const char* what) {
  if (!(lo < x && x < hi)) {
    throw BoundViolation(std::string("trap chain: ") + what + " = " + format_double(x) + " not inside (" +
                         format_double(lo) + ", " + format_double(hi) + ")");
  }
}

/// Legs shared by trap_chain and natural_region once q2, q3 are fixed.
void finish_chain(TrapChainResult& r, const ModelParams& p, double upper, double u_margin) {
  r.T1 = logistic_hit_time(r.c_star, p.q(), p);
  HitOptions up;
  up.step = kinetic_hit_step(r.m, 1.0, p);
  r.T2 = r.T1 + ode_hit_time([&](double s) { return rhs_G_m(s, r.m, p); }, p.q(), r.q2, up);
  r.T3 = r.T2 + relaxation_hit_time(r.c_star, r.q2, r.q3);
  r.kappa_star = find_root_G_star(r.q3, p);
  require_interval(p.q(), r.kappa_star, upper, "kappa_star");
  r.u_star = r.kappa_star + u_margin * (upper - r.kappa_star);
  require_interval(r.kappa_star, r.u_star, upper, "u_star");
  HitOptions down;
  down.step = kinetic_hit_step(r.q3, r.m, p);
  r.T4 = r.T3 + ode_hit_time([&](double s) { return rhs_G_star(s, r.q3, p); }, r.m, r.u_star, down);
  r.mu_target = upper - kEdgeEps * (upper - r.u_star);
  r.T_sharp = r.T4 + (r.m > r.mu_target ? relaxation_hit_time(r.m, r.u_star, r.mu_target) : 0.0);
}

void check_margins(const ChainMargins& m) {
  for (double x : {m.q2, m.q3, m.u}) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError("trap chain: margins must lie in (0, 1)");
  }
}

}  // namespace

double logistic_hit_time(double c_star, double target, const ModelParams& p) {
  if (!(c_star > 0.0 && c_star <= target && target < 1.0)) {
    throw DomainError("logistic_hit_time: need 0 < c_star <= target < 1");
  }
  if (c_star == target) return 0.0;
  return p.epsilon() * std::log((1.0 - c_star) * target / (c_star * (1.0 - target)));
}

double relaxation_hit_time(double y0, double source, double target) {
  if (target == y0) return 0.0;
  const bool between = (y0 < target && target < source) || (source < target && target < y0);
  if (!between) {
    throw DomainError("relaxation_hit_time: target " + format_double(target) + " is not reached from " +
                      format_double(y0) + " with source " + format_double(source));
  }
  return std::log((source - y0) / (source - target));
}

double ode_hit_time(const std::function<double(double)>& rhs, double y0, double target, const HitOptions& opt) {
  if (target == y0) return 0.0;
  if (!(opt.step > 0.0) || !(opt.max_T > 0.0)) throw DomainError("ode_hit_time: step and max_T must be positive");
  const double dir = target > y0 ? 1.0 : -1.0;
  if (!(dir * rhs(y0) > 0.0)) throw DomainError("ode_hit_time: rhs does not point from y0 towards the target");
  double t = 0.0;
  double y = y0;
  while (t < opt.max_T) {
    const double next = rk4(rhs, y, opt.step);
    if (!std::isfinite(next)) throw NumericalError("ode_hit_time: non-finite state at t = " + format_double(t));
    if (!(dir * (next - y) > 0.0)) {
      throw ConvergenceError("ode_hit_time: solution stalled at " + format_double(y) + " before reaching " +
                             format_double(target) + " (t = " + format_double(t) + ")");
    }
    if (dir * (next - target) >= 0.0) {
      double lo = 0.0;
      double hi = opt.step;
      while (hi - lo > opt.hit_tol) {
        const double mid = 0.5 * (lo + hi);
        if (dir * (rk4(rhs, y, mid) - target) >= 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return t + 0.5 * (lo + hi);
    }
    y = next;
    t += opt.step;
  }
  throw ConvergenceError("ode_hit_time: max_T = " + format_double(opt.max_T) + " reached at value " +
                         format_double(y) + " (target " + format_double(target) + ")");
}

double kinetic_hit_step(double coupling, double top, const ModelParams& p) {
  const double span = std::max(1.0, 2.0 * std::max(1.0, top) - 1.0);
  const double L = span / p.epsilon() + p.h() * coupling / (2.0 * p.q());
  return std::min(std::min(p.epsilon(), 1.0) / 100.0, 0.5 / L);
}

TrapChainResult trap_chain(double c_star, double m, const ModelParams& p, const ChainMargins& margins) {
  if (!(c_star > 0.0 && c_star < p.q())) throw DomainError("trap_chain: c_star must lie in (0, q)");
  if (!(m >= 1.0) || !std::isfinite(m)) throw DomainError("trap_chain: m must be >= 1");
  check_margins(margins);
  TrapChainResult r;
  r.c_star = c_star;
  r.m = m;
  r.margins = margins;
  r.u_bar = find_u_bar(p);
  r.q1 = find_root_G_m(m, p);
  require_interval(p.q(), r.q1, 1.0, "q1");
  r.q2 = p.q() + margins.q2 * (r.q1 - p.q());
  require_interval(p.q(), r.q2, r.q1, "q2");
  r.q3 = p.q() + margins.q3 * (r.q2 - p.q());
  require_interval(p.q(), r.q3, r.q2, "q3");
  finish_chain(r, p, r.u_bar, margins.u);
  return r;
}

NaturalRegion natural_region(double m, const ModelParams& p, double q_nat, double u_nat, double c_star,
                             const ChainMargins& margins) {
  if (!(c_star > 0.0 && c_star < p.q())) throw DomainError("natural_region: c_star must lie in (0, q)");
  if (!(m >= 1.0) || !std::isfinite(m)) throw DomainError("natural_region: m must be >= 1");
  check_margins(margins);
  NaturalRegion nr;
  nr.q_nat = q_nat;
  nr.u_nat = u_nat;
  TrapChainResult& r = nr.chain;
  r.c_star = c_star;
  r.m = m;
  r.margins = margins;
  r.u_bar = find_u_bar(p);
  r.q1 = find_root_G_m(m, p);
  nr.kappa_bar = find_kappa_bar(r.q1, p);
  if (!(q_nat >= p.q() && q_nat < r.q1)) {
    throw DomainError("natural_region: q_nat must lie in [q, q1) = [" + format_double(p.q()) + ", " +
                      format_double(r.q1) + ")");
  }
  if (!(u_nat > nr.kappa_bar && u_nat <= r.u_bar)) {
    throw DomainError("natural_region: u_nat must lie in (kappa_bar, u_bar] = (" + format_double(nr.kappa_bar) +
                      ", " + format_double(r.u_bar) + "]");
  }
  // coupling at which u_nat itself is a rest point of κ' = G_*(κ)
  const double crit = u_nat * (1.0 - u_nat) * (u_nat + p.q()) / (p.epsilon() * p.h() * (u_nat - p.q()));
  nr.q3_floor = std::max({q_nat, crit, p.q()});
  if (!(nr.q3_floor < r.q1)) {
    throw BoundViolation("natural_region: q3 floor " + format_double(nr.q3_floor) + " is not below q1 = " +
                         format_double(r.q1));
  }
  r.q3 = nr.q3_floor + margins.q3 * (r.q1 - nr.q3_floor);
  r.q2 = r.q3 + margins.q2 * (r.q1 - r.q3);
  require_interval(r.q3, r.q2, r.q1, "q2");
  finish_chain(r, p, u_nat, margins.u);
  nr.T_nat = r.T_sharp;
  return nr;
}

}  // namespace bz
