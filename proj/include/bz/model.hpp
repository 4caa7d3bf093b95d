#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace bz {

/// Constants of the reaction-diffusion system
///
///   u_t = Δu + u(1-u)/ε - h v (u-q)/(u+q),
///   v_t = dΔv - v + u.
///
/// Construction validates ε, h, d > 0 and 0 < q < 1.
class ModelParams {
 public:
  ModelParams(double epsilon, double h, double q, double d);

  /// ε = 0.032, q = 2e-4, d = 0.6 with the excitability supplied by the caller.
  static ModelParams standard(double h);
  /// Looks up a named preset; throws ConfigError for unknown names.
  static ModelParams preset(std::string_view name, double h);
  static std::vector<std::string> preset_names();

  double epsilon() const { return epsilon_; }
  double h() const { return h_; }
  double q() const { return q_; }
  double d() const { return d_; }

  ModelParams with_h(double h) const { return {epsilon_, h, q_, d_}; }

 private:
  double epsilon_;
  double h_;
  double q_;
  double d_;
};

/// Distance from the pole u = -q below which the kinetics refuse to evaluate.
inline constexpr double kDenomGuard = 1e-12;
/// Residual tolerance demanded of every root.
inline constexpr double kRootTol = 1e-10;
/// Default bracket width at which bisection stops.
inline constexpr double kBracketTol = 1e-12;

double reaction_u(double u, double v, const ModelParams& p);

inline double reaction_v(double u, double v) { return -v + u; }

/// u(1-u)(u+q) - εh·coupling·(u-q).  With coupling = q this is g, with
/// coupling = m (resp. q3, q1) its roots are those of G_m (resp. G_*, and the
/// cubic defining κ̄).
double kinetic_cubic(double u, double coupling, const ModelParams& p);

/// g(u) = u(1-u)(u+q) - εhq(u-q); its largest root in (q,1) is ū.
inline double cubic_g(double u, const ModelParams& p) { return kinetic_cubic(u, p.q(), p); }

/// g̃(u) = (1-u)(u+q) - εh(u-q); its root in (q,1) is ũ.
double quad_g_tilde(double u, const ModelParams& p);

/// G_m(s) = s(1-s)/ε - h m (s-q)/(s+q), the kinetics of u with v frozen at m.
double rhs_G_m(double s, double m, const ModelParams& p);

/// G_*(s) = s(1-s)/ε - h q3 (s-q)/(s+q).
inline double rhs_G_star(double s, double q3, const ModelParams& p) { return rhs_G_m(s, q3, p); }

struct Bracket {
  double root = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double residual = 0.0;
  double width() const { return hi - lo; }
};

/// Bisection on [lo, hi] for a continuous f with f(lo)·f(hi) <= 0.  Stops once
/// the bracket is no wider than bracket_tol; throws ConvergenceError if the
/// residual at the midpoint then exceeds root_tol.
Bracket bisect(const std::function<double(double)>& f, double lo, double hi,
               double bracket_tol = kBracketTol, double root_tol = kRootTol);

/// All sign-change roots of f strictly inside (lo, hi), ascending.  The scan
/// grid is geometric towards both ends so roots hugging an endpoint are seen.
std::vector<Bracket> scan_roots(const std::function<double(double)>& f, double lo, double hi,
                                double bracket_tol = kBracketTol, double root_tol = kRootTol);

/// Largest root of g in (q,1).
Bracket find_u_bar_bracket(const ModelParams& p, double bracket_tol = kBracketTol);
double find_u_bar(const ModelParams& p);

/// Root of g̃ in (q,1), bisected and cross-checked against the quadratic formula.
double find_u_tilde(const ModelParams& p);
/// Positive root of u² - (1-q-εh)u - (q+εhq) = 0 by the cancellation-free
/// quadratic formula.
double u_tilde_closed_form(const ModelParams& p);

/// q1: the root of G_m in (q,1) reached by the increasing solution of
/// σ' = G_m(σ), σ(0) = q, i.e. the smallest one.
double find_root_G_m(double m, const ModelParams& p);

/// κ*: the root of G_* in (q, ū) approached by the decreasing solution of
/// κ' = G_*(κ) started above 1, i.e. the largest one below ū.
double find_root_G_star(double q3, const ModelParams& p);

/// κ̄: largest root in (q, ū) of κ(1-κ)(κ+q) - εhq1(κ-q).
double find_kappa_bar(double q1, const ModelParams& p);

struct KineticRoots {
  double u_bar = 0.0;
  double u_tilde = 0.0;
  double residual_g = 0.0;
  double residual_g_tilde = 0.0;
  /// Number of sign-change roots of g found in (q,1); ū is the largest.
  int g_root_count = 0;
};

/// ū and ũ with residuals; throws BoundViolation unless q < ũ < ū < 1.
KineticRoots kinetic_roots(const ModelParams& p);

struct SteadyState {
  double u = 0.0;
  double v = 0.0;
};

struct SteadyStates {
  SteadyState trivial;
  SteadyState nontrivial;
};

/// (0,0) and (ũ,ũ); both kinetic rates are checked to vanish to 10·kRootTol.
SteadyStates steady_states(const ModelParams& p);

}  // namespace bz
