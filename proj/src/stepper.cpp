#include "bz/stepper.hpp"

#include <algorithm>
#include <cmath>

#include "bz/error.hpp"
#include "bz/mild.hpp"

namespace bz {

namespace {

/// Explicit Euler step of the kinetics u' = reaction_u, v' = u - v.
void kinetic_euler(std::span<const double> u, std::span<const double> v, double dt, const ModelParams& p,
                   std::span<double> u_out, std::span<double> v_out) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double du = reaction_u(u[i], v[i], p);
    const double dv = reaction_v(u[i], v[i]);
    u_out[i] = u[i] + dt * du;
    v_out[i] = v[i] + dt * dv;
  }
}

/// SSP-RK2 (Heun): average of the state and two chained Euler steps.
void kinetic_ssprk2(Field& u, Field& v, double dt, const ModelParams& p) {
  Field u1(u.grid());
  Field v1(v.grid());
  kinetic_euler(u.values(), v.values(), dt, p, u1.values(), v1.values());
  Field u2(u.grid());
  Field v2(v.grid());
  kinetic_euler(u1.values(), v1.values(), dt, p, u2.values(), v2.values());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = 0.5 * (u[i] + u2[i]);
    v[i] = 0.5 * (v[i] + v2[i]);
  }
}

}  // namespace

const char* to_string(StepperScheme s) { return s == StepperScheme::ImexEuler ? "imex-euler" : "imex-strang"; }

StepperScheme stepper_scheme_from_string(const std::string& name) {
  if (name == "imex-euler") return StepperScheme::ImexEuler;
  if (name == "imex-strang") return StepperScheme::ImexStrang;
  throw ConfigError("unknown stepper scheme '" + name + "' (expected imex-euler or imex-strang)");
}

double max_stable_dt(const ModelParams& p, double m_box) {
  const double m = std::max(1.0, m_box);
  return std::min(1.0, 1.0 / ((2.0 * m - 1.0) / p.epsilon() + 2.0 * p.h() * m / p.q()));
}

void validate(const StepperConfig& cfg, const ModelParams& p, double m_box) {
  if (!(cfg.dt > 0.0)) throw DomainError("stepper: dt must be positive");
  if (cfg.snapshot_stride < 1) throw DomainError("stepper: snapshot_stride must be >= 1");
  const double limit = max_stable_dt(p, m_box);
  if (cfg.dt > limit * (1.0 + 1e-12)) {
    throw DomainError("stepper: dt = " + format_double(cfg.dt) + " exceeds the kinetic monotonicity limit " +
                      format_double(limit) + " for the box [0, " + format_double(std::max(1.0, m_box)) + "]^2");
  }
}

StatePair imex_step(const StatePair& s, double dt, const ModelParams& p, const StepperConfig& cfg) {
  if (!(dt > 0.0)) throw DomainError("imex_step: dt must be positive");
  if (cfg.scheme == StepperScheme::ImexEuler) {
    Field u(s.u.grid());
    Field v(s.v.grid());
    kinetic_euler(s.u.values(), s.v.values(), dt, p, u.values(), v.values());
    return {heat(u, dt, 1.0, cfg.mode), heat(v, dt, p.d(), cfg.mode), s.time + dt};
  }
  Field u = s.u;
  Field v = s.v;
  kinetic_ssprk2(u, v, 0.5 * dt, p);
  u = heat(u, dt, 1.0, cfg.mode);
  v = heat(v, dt, p.d(), cfg.mode);
  kinetic_ssprk2(u, v, 0.5 * dt, p);
  ensure_finite(u, "imex_step u");
  ensure_finite(v, "imex_step v");
  return {std::move(u), std::move(v), s.time + dt};
}

Trajectory simulate(const StatePair& s0, double T, const ModelParams& p, const StepperConfig& cfg,
                    const std::vector<Monitor>& monitors) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw DomainError("simulate: T must be finite and >= 0");
  const double m_box = std::max(sup_norm(s0.u), sup_norm(s0.v));
  validate(cfg, p, m_box);

  Trajectory traj(s0.u.grid(), std::string("imex:") + to_string(cfg.scheme));
  auto observe = [&](const StatePair& s, std::size_t step) {
    for (const auto& mon : monitors) {
      if (mon(s, step) == MonitorAction::Abort) return false;
    }
    return true;
  };

  traj.push_back(s0);
  if (!observe(s0, 0) || T == 0.0) return traj;

  const auto steps = static_cast<std::size_t>(std::ceil(T / cfg.dt * (1.0 - 1e-12)));
  const double dt = T / static_cast<double>(steps);
  StatePair cur = s0;
  for (std::size_t k = 1; k <= steps; ++k) {
    try {
      cur = imex_step(cur, dt, p, cfg);
    } catch (const NumericalError& e) {
      throw NumericalError("simulate: step " + std::to_string(k) + ": " + e.what());
    } catch (const SingularityError& e) {
      throw SingularityError("simulate: step " + std::to_string(k) + ": " + e.what());
    }
    cur.time = k == steps ? s0.time + T : s0.time + static_cast<double>(k) * dt;
    if (k % cfg.snapshot_stride == 0 || k == steps) {
      const bool go_on = observe(cur, k);
      if (cfg.keep_snapshots || k == steps || !go_on) traj.push_back(cur);
      if (!go_on) break;
    }
  }
  return traj;
}

CrossValidationResult cross_validate(const Field& u0, const Field& v0, const ModelParams& p, double horizon, int level,
                                     const CrossValidationConfig& cfg) {
  if (level < 0) throw DomainError("cross_validate: level must be >= 0");
  const SolverBounds b = solver_bounds(u0, v0, p, cfg.quad_substeps);
  if (!(horizon > 0.0) || horizon > b.T0 * (1.0 + 1e-12)) {
    throw DomainError("cross_validate: horizon must lie in (0, T0]");
  }
  const std::size_t samples = cfg.base_samples << level;

  PicardConfig pc;
  pc.samples = samples;
  pc.quad_substeps = cfg.quad_substeps;
  pc.tol = cfg.picard_tol;
  pc.mode = cfg.mode;
  pc.horizon = horizon;
  const PicardResult mild = picard_solve(u0, v0, p, pc);

  StepperConfig sc;
  sc.dt = horizon / static_cast<double>(samples * cfg.steps_per_sample);
  sc.scheme = cfg.scheme;
  sc.snapshot_stride = cfg.steps_per_sample;
  sc.mode = cfg.mode;
  const Trajectory imex = simulate({u0, v0, 0.0}, horizon, p, sc);

  return {trajectory_gap(mild.trajectory, imex), samples, sc.dt};
}

}  // namespace bz
