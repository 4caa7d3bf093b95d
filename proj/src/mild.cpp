#include "bz/mild.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bz/error.hpp"

namespace bz {

namespace {

Field lerp(const Field& a, const Field& b, double w) {
  Field out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - w) * a[i] + w * b[i];
  return out;
}

void guard_pole(double u, const ModelParams& p) {
  if (!(u + p.q() > kDenomGuard)) {
    throw SingularityError("picard_solve: iterate value " + format_double(u) + " reached the pole u = -q");
  }
}

/// η = h v/(u+q).
Field potential(const Field& u, const Field& v, const ModelParams& p) {
  Field eta(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) {
    guard_pole(u[i], p);
    eta[i] = p.h() * v[i] / (u[i] + p.q());
  }
  return eta;
}

/// ζ = u(1-u)/ε + hq v/(u+q).
Field forcing(const Field& u, const Field& v, const ModelParams& p) {
  Field zeta(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) {
    guard_pole(u[i], p);
    zeta[i] = u[i] * (1.0 - u[i]) / p.epsilon() + p.h() * p.q() * v[i] / (u[i] + p.q());
  }
  return zeta;
}

struct Iterate {
  std::vector<Field> u;
  std::vector<Field> v;
  std::optional<double> homogeneous_sup;
};

IterateRecord summarize(int index, const Iterate& it, const std::vector<double>& times) {
  IterateRecord r;
  r.index = index;
  r.min_u = std::numeric_limits<double>::infinity();
  r.min_v = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double root_t = std::sqrt(times[k]);
    r.K1 = std::max(r.K1, sup_norm(it.u[k]));
    r.K2 = std::max(r.K2, sup_norm(it.v[k]));
    r.K3 = std::max(r.K3, root_t * grad_sup_norm(it.u[k]));
    r.K4 = std::max(r.K4, root_t * grad_sup_norm(it.v[k]));
    r.min_u = std::min(r.min_u, min_value(it.u[k]));
    r.min_v = std::min(r.min_v, min_value(it.v[k]));
  }
  r.homogeneous_sup = it.homogeneous_sup;
  return r;
}

void enforce(const IterateRecord& r, double limit, double positivity_tol) {
  const double ks[4] = {r.K1, r.K2, r.K3, r.K4};
  for (int j = 0; j < 4; ++j) {
    if (ks[j] > limit) {
      std::ostringstream os;
      os << "picard_solve: K_" << (j + 1) << "," << r.index << " = " << format_double(ks[j])
         << " exceeds its bound " << format_double(limit);
      throw BoundViolation(os.str());
    }
  }
  if (r.min_u < -positivity_tol || r.min_v < -positivity_tol) {
    std::ostringstream os;
    os << "picard_solve: iterate " << r.index << " lost positivity (min u = " << format_double(r.min_u)
       << ", min v = " << format_double(r.min_v) << ")";
    throw BoundViolation(os.str());
  }
}

Iterate next_iterate(const Iterate& cur, const Field& u0, const Field& v0, const ModelParams& p, double horizon,
                     std::size_t samples, std::size_t quad, HeatMode mode) {
  const double dt = horizon / static_cast<double>(samples);
  const double delta = dt / static_cast<double>(quad);
  Iterate next;
  next.u.reserve(samples + 1);
  next.v.reserve(samples + 1);
  next.u.push_back(u0);
  next.v.push_back(v0);

  Field x = u0;
  Field y = v0;
  Field homogeneous = u0;
  double hom_sup = sup_norm(u0);

  for (std::size_t k = 0; k < samples; ++k) {
    const Field& ua = cur.u[k];
    const Field& ub = cur.u[k + 1];
    const Field& va = cur.v[k];
    const Field& vb = cur.v[k + 1];
    Field u_lo = ua;
    Field zeta_lo = forcing(ua, va, p);
    for (std::size_t j = 0; j < quad; ++j) {
      const double w_mid = (static_cast<double>(j) + 0.5) / static_cast<double>(quad);
      const double w_hi = static_cast<double>(j + 1) / static_cast<double>(quad);
      const Field eta_mid = potential(lerp(ua, ub, w_mid), lerp(va, vb, w_mid), p);
      Field u_hi = j + 1 == quad ? ub : lerp(ua, ub, w_hi);
      const Field v_hi = j + 1 == quad ? vb : lerp(va, vb, w_hi);
      Field zeta_hi = forcing(u_hi, v_hi, p);

      x = source_substep(x, eta_mid, zeta_lo, zeta_hi, delta, mode);
      y = damped_source_substep(y, u_lo, u_hi, delta, p.d(), mode);
      homogeneous = strang_substep(homogeneous, eta_mid, delta, mode);

      u_lo = std::move(u_hi);
      zeta_lo = std::move(zeta_hi);
    }
    hom_sup = std::max(hom_sup, sup_norm(homogeneous));
    next.u.push_back(x);
    next.v.push_back(y);
  }
  next.homogeneous_sup = hom_sup;
  return next;
}

double iterate_distance(const Iterate& a, const Iterate& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.u.size(); ++k) {
    d = std::max(d, sup_distance(a.u[k], b.u[k]) + sup_distance(a.v[k], b.v[k]));
  }
  return d;
}

}  // namespace

SolverBounds solver_bounds(const Field& u0, const Field& v0, const ModelParams& p, std::size_t quad_substeps) {
  if (!(u0.grid() == v0.grid())) throw DomainError("solver_bounds: u0 and v0 live on different grids");
  if (min_value(u0) < 0.0 || min_value(v0) < 0.0) {
    throw DomainError("solver_bounds: initial data must be non-negative");
  }
  SolverBounds b;
  b.quad_substeps = quad_substeps;
  b.m = std::max(sup_norm(u0), sup_norm(v0));
  if (b.m == 0.0) {
    b.T0 = kHorizonDefault;
    return b;
  }
  b.a = 2.0 * p.h() * b.m / p.q();
  b.b = 2.0 * b.m * (1.0 + 2.0 * b.m) / p.epsilon() + 2.0 * p.h() * b.m;
  b.T0 = std::min(1.0 / (4.0 * b.a), b.m / (2.0 * b.b));
  return b;
}

PicardResult picard_solve(const Field& u0, const Field& v0, const ModelParams& p, const PicardConfig& cfg) {
  if (cfg.samples < 1 || cfg.quad_substeps < 1) throw DomainError("picard_solve: samples and quad_substeps must be >= 1");
  ensure_finite(u0, "picard_solve u0");
  ensure_finite(v0, "picard_solve v0");
  const SolverBounds bounds = solver_bounds(u0, v0, p, cfg.quad_substeps);

  double horizon = bounds.T0;
  if (cfg.horizon) {
    if (!(*cfg.horizon > 0.0)) throw DomainError("picard_solve: horizon must be positive");
    if (*cfg.horizon > bounds.T0 * (1.0 + 1e-12)) {
      throw DomainError("picard_solve: horizon " + format_double(*cfg.horizon) + " exceeds T0 = " +
                        format_double(bounds.T0));
    }
    horizon = *cfg.horizon;
  }

  std::vector<double> times(cfg.samples + 1);
  for (std::size_t k = 0; k <= cfg.samples; ++k) {
    times[k] = horizon * static_cast<double>(k) / static_cast<double>(cfg.samples);
  }

  PicardResult result{Trajectory(u0.grid(), "picard"), {}, bounds, horizon};
  IterationDiagnostics& diag = result.diagnostics;
  diag.diag_tol = cfg.diag_rel_tol * bounds.m;

  if (bounds.m == 0.0) {
    // zero data: the trivial steady state, exactly
    for (double t : times) result.trajectory.push_back({Field(u0.grid()), Field(u0.grid()), t});
    IterateRecord first;
    first.index = 1;
    diag.iterates.push_back(first);
    diag.converged = true;
    return result;
  }

  const double ptol = cfg.positivity_tol >= 0.0 ? cfg.positivity_tol
                                                : (cfg.mode == HeatMode::Kernel ? 0.0 : 1e-9 * bounds.m);

  Iterate cur;
  for (double t : times) {
    cur.u.push_back(heat(u0, t, 1.0, cfg.mode));
    cur.v.push_back(heat(v0, t, p.d(), cfg.mode));
  }
  diag.iterates.push_back(summarize(1, cur, times));
  if (cfg.enforce_bounds) enforce(diag.iterates.back(), bounds.m + diag.diag_tol, ptol);

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    Iterate next = next_iterate(cur, u0, v0, p, horizon, cfg.samples, cfg.quad_substeps, cfg.mode);
    const double delta = iterate_distance(next, cur);
    diag.deltas.push_back(delta);
    diag.iterates.push_back(summarize(iter + 1, next, times));
    if (cfg.enforce_bounds) enforce(diag.iterates.back(), 2.0 * bounds.m + diag.diag_tol, ptol);
    cur = std::move(next);
    if (delta < cfg.tol) {
      diag.converged = true;
      break;
    }
  }
  if (!diag.converged) {
    std::ostringstream os;
    os << "picard_solve: no convergence to tol " << format_double(cfg.tol) << " within " << cfg.max_iter
       << " iterations; delta history:";
    for (double d : diag.deltas) os << ' ' << format_double(d);
    throw ConvergenceError(os.str());
  }

  for (std::size_t k = 0; k < times.size(); ++k) {
    result.trajectory.push_back({std::move(cur.u[k]), std::move(cur.v[k]), times[k]});
  }
  return result;
}

Trajectory picard_extend(const Field& u0, const Field& v0, const ModelParams& p, double T, const PicardConfig& cfg) {
  if (!(T >= 0.0)) throw DomainError("picard_extend: T must be non-negative");
  Trajectory out(u0.grid(), "picard-extended");
  out.push_back({u0, v0, 0.0});
  Field u = u0;
  Field v = v0;
  double t = 0.0;
  PicardConfig window = cfg;
  while (T - t > 1e-14 * std::max(1.0, T)) {
    const SolverBounds b = solver_bounds(u, v, p, cfg.quad_substeps);
    window.horizon = std::min(b.T0, T - t);
    PicardResult r = picard_solve(u, v, p, window);
    t = (T - t) <= b.T0 ? T : t + *window.horizon;
    u = r.trajectory.back().u;
    v = r.trajectory.back().v;
    // clamp roundoff-level negatives so the next window's bounds stay defined
    for (double& x : u.values()) x = std::max(x, 0.0);
    for (double& x : v.values()) x = std::max(x, 0.0);
    out.push_back({u, v, t});
  }
  return out;
}

Field duhamel_v(const Field& v0, const Trajectory& u_traj, double t, const ModelParams& p, std::size_t quad_substeps,
                HeatMode mode) {
  if (u_traj.empty()) throw DomainError("duhamel_v: empty trajectory");
  const double t0 = u_traj.start_time();
  const double eps = 1e-12 * std::max(1.0, std::abs(u_traj.end_time()));
  if (t < t0 - eps || t > u_traj.end_time() + eps) throw DomainError("duhamel_v: t outside the trajectory span");
  if (quad_substeps < 1) throw DomainError("duhamel_v: quad_substeps must be >= 1");
  if (t <= t0) return v0;

  double min_gap = u_traj.end_time() - t0;
  for (std::size_t i = 1; i < u_traj.size(); ++i) min_gap = std::min(min_gap, u_traj[i].time - u_traj[i - 1].time);
  if (!(min_gap > 0.0)) min_gap = t - t0;

  PropagatorConfig cfg;
  cfg.mode = mode;
  cfg.substeps_per_unit = static_cast<double>(quad_substeps) / min_gap;
  const double t_end = std::min(t, u_traj.end_time());
  return damped_with_source(v0, [&](double s) { return u_traj.at(s).u; }, t0, t_end, p.d(), cfg);
}

double uniqueness_residual(const Field& u0, const Field& v0, const ModelParams& p, const PicardConfig& a,
                           const PicardConfig& b) {
  if (a.samples != b.samples) throw DomainError("uniqueness_residual: configurations must share the sample count");
  const PicardResult ra = picard_solve(u0, v0, p, a);
  const PicardResult rb = picard_solve(u0, v0, p, b);
  return trajectory_gap(ra.trajectory, rb.trajectory);
}

double uniqueness_residual(const Field& u0, const Field& v0, const ModelParams& p, const PicardConfig& cfg,
                           std::size_t refinement_factor) {
  if (refinement_factor < 1) throw DomainError("uniqueness_residual: refinement factor must be >= 1");
  PicardConfig refined = cfg;
  refined.quad_substeps = cfg.quad_substeps * refinement_factor;
  return uniqueness_residual(u0, v0, p, cfg, refined);
}

}  // namespace bz
