#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "bz/grid.hpp"
#include "bz/model.hpp"
#include "bz/semigroup.hpp"
#include "bz/trajectory.hpp"

namespace bz {

enum class StepperScheme {
  /// kinetics by one explicit Euler step, then exact diffusion (first order)
  ImexEuler,
  /// K(dt/2) ∘ H(dt) ∘ K(dt/2) with K an SSP-RK2 kinetic step (second order)
  ImexStrang,
};

const char* to_string(StepperScheme s);
StepperScheme stepper_scheme_from_string(const std::string& name);

struct StepperConfig {
  double dt = 1e-5;
  StepperScheme scheme = StepperScheme::ImexStrang;
  std::size_t snapshot_stride = 1;
  HeatMode mode = HeatMode::Spectral;
  /// false: monitors still see every snapshot but the returned trajectory
  /// holds only the initial and final states.
  bool keep_snapshots = true;
};

/// Largest dt for which the explicit kinetic update is monotone on the box
/// [0, m_box]² (m_box >= 1):  1 / ((2 m_box - 1)/ε + 2 h m_box / q), capped at 1.
/// Under it the Euler map preserves [0,m]², S = (q,ū)² and [0,∞)².
double max_stable_dt(const ModelParams& p, double m_box);

/// Throws DomainError unless 0 < cfg.dt <= max_stable_dt(p, m_box) and the
/// stride is positive.
void validate(const StepperConfig& cfg, const ModelParams& p, double m_box);

/// One step of the chosen IMEX scheme; time advances by dt.
StatePair imex_step(const StatePair& s, double dt, const ModelParams& p, const StepperConfig& cfg);

enum class MonitorAction { Continue, Abort };

/// Called with every stored snapshot and its step index.
using Monitor = std::function<MonitorAction(const StatePair&, std::size_t)>;

/// Advances s0 to s0.time + T with ceil(T/dt) equal steps (none longer than
/// cfg.dt), storing every snapshot_stride-th state and the final one.
/// A monitor returning Abort ends the run early; the trajectory then ends at
/// the snapshot that triggered it.  Non-finite values raise NumericalError
/// naming the step index.
Trajectory simulate(const StatePair& s0, double T, const ModelParams& p, const StepperConfig& cfg,
                    const std::vector<Monitor>& monitors = {});

struct CrossValidationConfig {
  std::size_t base_samples = 4;  ///< Picard samples at level 0
  std::size_t quad_substeps = 1;
  std::size_t steps_per_sample = 1;  ///< IMEX steps between shared sample times
  StepperScheme scheme = StepperScheme::ImexStrang;
  HeatMode mode = HeatMode::Spectral;
  double picard_tol = 1e-13;
};

struct CrossValidationResult {
  double gap = 0.0;  ///< sup over shared times of |Δu|∞ + |Δv|∞
  std::size_t picard_samples = 0;
  double stepper_dt = 0.0;
};

/// Solves the same data on [0, horizon] with the Picard scheme and the IMEX
/// stepper at refinement `level` (both resolutions doubled per level) and
/// returns their gap.  horizon must not exceed T0 of the data.
CrossValidationResult cross_validate(const Field& u0, const Field& v0, const ModelParams& p, double horizon,
                                     int level = 0, const CrossValidationConfig& cfg = {});

}  // namespace bz
