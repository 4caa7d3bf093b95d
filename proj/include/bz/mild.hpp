#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bz/grid.hpp"
#include "bz/model.hpp"
#include "bz/semigroup.hpp"
#include "bz/trajectory.hpp"

namespace bz {

/// Constants of the local existence argument for data bounded by m:
/// |η| <= a = 2hm/q, 0 <= ζ <= b = 2m(1+2m)/ε + 2hm, horizon T0 = min{1/(4a), m/(2b)}.
struct SolverBounds {
  double m = 0.0;
  double a = 0.0;
  double b = 0.0;
  double T0 = 0.0;
  std::size_t quad_substeps = 4;
};

/// Horizon used when m = 0 (the T0 formula degenerates).
inline constexpr double kHorizonDefault = 1.0;

/// Throws DomainError for negative initial data.
SolverBounds solver_bounds(const Field& u0, const Field& v0, const ModelParams& p,
                           std::size_t quad_substeps = 4);

struct PicardConfig {
  std::size_t samples = 64;       ///< M: stored snapshots are t_k = k·T/M
  std::size_t quad_substeps = 4;  ///< trapezoid substeps between snapshots
  double tol = 1e-8;              ///< stop once δ_ℓ < tol
  int max_iter = 50;
  HeatMode mode = HeatMode::Kernel;
  /// Solve on [0, horizon] instead of [0, T0]; must not exceed T0.
  std::optional<double> horizon;
  /// diag_tol = diag_rel_tol·m separates quadrature noise from bound violations.
  double diag_rel_tol = 1e-6;
  /// Iterate minima below -positivity_tol are violations (negative: mode default).
  double positivity_tol = -1.0;
  bool enforce_bounds = true;
};

/// Norms of one iterate (u_ℓ, v_ℓ) over the stored samples.
struct IterateRecord {
  int index = 0;  ///< ℓ, starting at 1
  double K1 = 0.0;  ///< sup_t |u_ℓ(t)|∞
  double K2 = 0.0;  ///< sup_t |v_ℓ(t)|∞
  double K3 = 0.0;  ///< sup_t t^{1/2} |∇u_ℓ(t)|∞
  double K4 = 0.0;  ///< sup_t t^{1/2} |∇v_ℓ(t)|∞
  double min_u = 0.0;
  double min_v = 0.0;
  /// sup_t |U_{ℓ-1}(t,0)u0|∞, the homogeneous part of u_ℓ (absent for ℓ = 1).
  std::optional<double> homogeneous_sup;
};

struct IterationDiagnostics {
  std::vector<IterateRecord> iterates;
  /// δ_ℓ = sup_t (|u_{ℓ+1} - u_ℓ|∞ + |v_{ℓ+1} - v_ℓ|∞), ℓ = 1, 2, ...
  std::vector<double> deltas;
  bool converged = false;
  double diag_tol = 0.0;
};

struct PicardResult {
  Trajectory trajectory;
  IterationDiagnostics diagnostics;
  SolverBounds bounds;
  double horizon = 0.0;
};

/// Successive approximation of the mild solution on [0, T]:
///   u_1(t) = e^{tΔ}u0, v_1(t) = e^{dtΔ}v0,
///   u_{ℓ+1}(t) = U_ℓ(t,0)u0 + ∫_0^t U_ℓ(t,s)ζ_ℓ(s) ds,
///   v_{ℓ+1}(t) = e^{tL}v0 + ∫_0^t e^{(t-s)L}u_ℓ(s) ds,
/// with η_ℓ = h v_ℓ/(u_ℓ+q) driving U_ℓ and ζ_ℓ = u_ℓ(1-u_ℓ)/ε + hq v_ℓ/(u_ℓ+q).
/// Iterates are stored at the M+1 sample times and linearly interpolated in
/// between.  Throws ConvergenceError (with the δ history) if tol is not met
/// within max_iter, and BoundViolation if K_{j,1} > m, K_{j,ℓ} > 2m or an
/// iterate turns negative beyond tolerance.
PicardResult picard_solve(const Field& u0, const Field& v0, const ModelParams& p, const PicardConfig& cfg = {});

/// Chains local Picard solves, each on the T0 of its own initial state, up
/// to time T.  The returned trajectory holds the window end points.
Trajectory picard_extend(const Field& u0, const Field& v0, const ModelParams& p, double T,
                         const PicardConfig& cfg = {});

/// v(t) = e^{tL}v0 + ∫_0^t e^{(t-s)L}u(s) ds with u read (linearly
/// interpolated) from u_traj; quad_substeps trapezoid nodes per stored interval.
Field duhamel_v(const Field& v0, const Trajectory& u_traj, double t, const ModelParams& p,
                std::size_t quad_substeps = 4, HeatMode mode = HeatMode::Kernel);

/// Sup-over-time gap between two Picard solutions of the same data computed
/// with configurations a and b (same sample count).
double uniqueness_residual(const Field& u0, const Field& v0, const ModelParams& p, const PicardConfig& a,
                           const PicardConfig& b);

/// Convenience form: compares cfg against cfg with quad_substeps multiplied
/// by refinement_factor.
double uniqueness_residual(const Field& u0, const Field& v0, const ModelParams& p, const PicardConfig& cfg,
                           std::size_t refinement_factor);

}  // namespace bz
