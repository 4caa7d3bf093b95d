#pragma once

#include <functional>

#include "bz/grid.hpp"
#include "bz/model.hpp"

namespace bz {

/// How the heat semigroup is realised on the grid.
///
/// Spectral multiplies each Fourier coefficient by exp(-D|k|²t): exact on
/// trigonometric polynomials and an exact semigroup, but the maximum principle
/// only holds up to roundoff/Gibbs level.
///
/// Kernel convolves with the nonnegative, unit-mass kernel of the periodic
/// second-order discrete Laplacian, exp(tDΔ_h).  Sign and bound preservation
/// are exact; the price is the O(h²) symbol error of Δ_h.
enum class HeatMode { Spectral, Kernel };

const char* to_string(HeatMode mode);
HeatMode heat_mode_from_string(const std::string& name);

struct PropagatorConfig {
  HeatMode mode = HeatMode::Spectral;
  /// Strang substeps per unit time for the evolution family U(t,s).
  double substeps_per_unit = 1000.0;
  /// Negative selects the mode default (see positivity_tolerance).
  double positivity_tol = -1.0;
};

/// 0 in kernel mode; 1e-9·sup|f| in spectral mode; cfg.positivity_tol when set.
double positivity_tolerance(const PropagatorConfig& cfg, const Field& f);

/// e^{tDΔ} f.  t = 0 is the identity.
Field heat(const Field& f, double t, double diffusivity, HeatMode mode = HeatMode::Spectral);

/// e^{tL} f with L = dΔ - 1, i.e. e^{-t}·e^{dtΔ} f.
Field damped(const Field& f, double t, const ModelParams& p, HeatMode mode = HeatMode::Spectral);

/// Time-indexed field, e.g. the potential η(·, t) of A = Δ - η.
using FieldSource = std::function<Field(double)>;

/// One Strang substep of U(t+δ, t) for A = Δ - η:
/// exp(-ηδ/2) · e^{δΔ} · exp(-ηδ/2) with η frozen at the substep midpoint.
Field strang_substep(const Field& f, const Field& eta_mid, double delta, HeatMode mode);

/// One trapezoid substep of θ(t+δ) = U(t+δ,t)θ(t) + ∫ U(t+δ,s)ζ(s) ds:
/// returns S(x + δ/2·ζ_lo) + δ/2·ζ_hi with S the Strang substep.
Field source_substep(const Field& x, const Field& eta_mid, const Field& zeta_lo, const Field& zeta_hi,
                     double delta, HeatMode mode);

/// One substep of ψ(t+δ) = e^{δL}ψ(t) + ∫ e^{(t+δ-s)L} φ(s) ds with the
/// exponential factor integrated exactly against linear interpolation of φ
/// and the heat factor applied trapezoid-style at the endpoints:
/// e^{dδΔ}(e^{-δ}y + w_lo φ_lo) + w_hi φ_hi.  All weights are nonnegative and
/// sum to 1 - e^{-δ}, so constants ψ ≡ φ ≡ c are reproduced.
Field damped_source_substep(const Field& y, const Field& phi_lo, const Field& phi_hi, double delta,
                            double diffusivity, HeatMode mode);

/// Number of substeps used on an interval of length span.
std::size_t substep_count(double span, double substeps_per_unit);

/// U(t,s) f for A = Δ - η(·,τ), τ ∈ [s,t].  Throws DomainError if t < s.
Field evolve(const Field& f, const FieldSource& eta, double s, double t, const PropagatorConfig& cfg);

/// Solution at t of θ_τ = Δθ - ηθ + ζ, θ(s) = θ0 (the problem behind the
/// u-iterates; with θ = ξ - c it is the shifted linearisation).
Field evolve_with_source(const Field& theta0, const FieldSource& eta, const FieldSource& zeta, double s,
                         double t, const PropagatorConfig& cfg);

/// Solution at t of ψ_τ = dΔψ - ψ + φ, ψ(s) = ψ0.
Field damped_with_source(const Field& psi0, const FieldSource& phi, double s, double t,
                         double diffusivity, const PropagatorConfig& cfg);

namespace testing {
/// Fault injection for the verification pipeline: every heat application is
/// scaled by (1 + skew).  Zero restores correct behaviour.
void set_heat_multiplier_skew(double skew);
double heat_multiplier_skew();
}  // namespace testing

}  // namespace bz
