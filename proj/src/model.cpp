#include "bz/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bz/error.hpp"

namespace bz {

namespace {

std::string describe(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

ModelParams::ModelParams(double epsilon, double h, double q, double d)
    : epsilon_(epsilon), h_(h), q_(q), d_(d) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("epsilon must be positive and finite, got " + describe(epsilon));
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw DomainError("h must be positive and finite, got " + describe(h));
  }
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError("q must lie in (0,1), got " + describe(q));
  }
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw DomainError("d must be positive and finite, got " + describe(d));
  }
}

ModelParams ModelParams::standard(double h) { return {0.032, h, 2.0e-4, 0.6}; }

ModelParams ModelParams::preset(std::string_view name, double h) {
  if (name == "standard") return standard(h);
  throw ConfigError("unknown parameter preset '" + std::string(name) + "'");
}

std::vector<std::string> ModelParams::preset_names() { return {"standard"}; }

double reaction_u(double u, double v, const ModelParams& p) {
  const double denom = u + p.q();
  if (!(denom > kDenomGuard)) {
    throw SingularityError("reaction_u: u = " + describe(u) + " is within the guard of the pole u = -q");
  }
  return u * (1.0 - u) / p.epsilon() - p.h() * v * (u - p.q()) / denom;
}

double kinetic_cubic(double u, double coupling, const ModelParams& p) {
  return u * (1.0 - u) * (u + p.q()) - p.epsilon() * p.h() * coupling * (u - p.q());
}

double quad_g_tilde(double u, const ModelParams& p) {
  return (1.0 - u) * (u + p.q()) - p.epsilon() * p.h() * (u - p.q());
}

double rhs_G_m(double s, double m, const ModelParams& p) {
  const double denom = s + p.q();
  if (!(denom > kDenomGuard)) {
    throw SingularityError("rhs_G_m: s = " + describe(s) + " is within the guard of the pole s = -q");
  }
  return s * (1.0 - s) / p.epsilon() - p.h() * m * (s - p.q()) / denom;
}

Bracket bisect(const std::function<double(double)>& f, double lo, double hi, double bracket_tol,
               double root_tol) {
  if (!(lo < hi)) throw DomainError("bisect: empty interval");
  if (!(bracket_tol > 0.0)) throw DomainError("bisect: bracket_tol must be positive");
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return {lo, lo, lo, 0.0};
  if (fhi == 0.0) return {hi, hi, hi, 0.0};
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw ConvergenceError("bisect: no sign change on [" + describe(lo) + ", " + describe(hi) + "]");
  }
  while (hi - lo > bracket_tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;  // bracket at machine resolution
    const double fm = f(mid);
    if (fm == 0.0) return {mid, mid, mid, 0.0};
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double root = lo + 0.5 * (hi - lo);
  const double residual = f(root);
  if (!(std::abs(residual) <= root_tol)) {
    throw ConvergenceError("bisect: residual " + describe(residual) + " at " + describe(root) +
                           " exceeds tolerance");
  }
  return {root, lo, hi, residual};
}

std::vector<Bracket> scan_roots(const std::function<double(double)>& f, double lo, double hi,
                                double bracket_tol, double root_tol) {
  if (!(lo < hi)) throw DomainError("scan_roots: empty interval");
  constexpr int kPerSide = 1200;
  constexpr double kSmallest = 1e-13;
  const double width = hi - lo;

  std::vector<double> grid;
  grid.reserve(2 * kPerSide + 2);
  grid.push_back(lo);
  grid.push_back(hi);
  for (int i = 0; i < kPerSide; ++i) {
    // geometric offsets from kSmallest·width up to width/2, from both ends
    const double s = kSmallest * std::pow(0.5 / kSmallest, static_cast<double>(i) / (kPerSide - 1));
    grid.push_back(lo + s * width);
    grid.push_back(hi - s * width);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<Bracket> roots;
  double prev_x = grid.front();
  double prev_f = f(prev_x);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double x = grid[i];
    const double fx = f(x);
    const bool interior_zero = fx == 0.0 && i + 1 < grid.size();
    if (interior_zero) {
      roots.push_back({x, x, x, 0.0});
    } else if (prev_f != 0.0 && fx != 0.0 && ((prev_f > 0.0) != (fx > 0.0))) {
      roots.push_back(bisect(f, prev_x, x, bracket_tol, root_tol));
    }
    prev_x = x;
    prev_f = fx;
  }
  return roots;
}

namespace {

std::vector<Bracket> cubic_roots_in(double coupling, double lo, double hi, const ModelParams& p,
                                    double bracket_tol) {
  return scan_roots([&](double u) { return kinetic_cubic(u, coupling, p); }, lo, hi, bracket_tol);
}

}  // namespace

Bracket find_u_bar_bracket(const ModelParams& p, double bracket_tol) {
  // g(q) = 2q²(1-q) > 0 and g(1) = -εhq(1-q) < 0, so the scan always succeeds.
  const auto roots = cubic_roots_in(p.q(), p.q(), 1.0, p, bracket_tol);
  if (roots.empty()) throw ConvergenceError("find_u_bar: g has no sign change on (q,1)");
  return roots.back();
}

double find_u_bar(const ModelParams& p) { return find_u_bar_bracket(p).root; }

double u_tilde_closed_form(const ModelParams& p) {
  const double eh = p.epsilon() * p.h();
  const double b = 1.0 - p.q() - eh;
  const double c = p.q() + eh * p.q();
  const double s = std::sqrt(b * b + 4.0 * c);
  return b >= 0.0 ? 0.5 * (b + s) : 2.0 * c / (s - b);
}

double find_u_tilde(const ModelParams& p) {
  // g̃ is a downward parabola with g̃(q) > 0 > g̃(1): exactly one root in (q,1).
  const Bracket b = bisect([&](double u) { return quad_g_tilde(u, p); }, p.q(), 1.0);
  const double closed = u_tilde_closed_form(p);
  if (std::abs(closed - b.root) > 1e-10) {
    throw ConvergenceError("find_u_tilde: bisection " + describe(b.root) +
                           " disagrees with closed form " + describe(closed));
  }
  return b.root;
}

double find_root_G_m(double m, const ModelParams& p) {
  if (!(m > 0.0)) throw DomainError("find_root_G_m: m must be positive");
  const auto roots = cubic_roots_in(m, p.q(), 1.0, p, kBracketTol);
  if (roots.empty()) throw ConvergenceError("find_root_G_m: G_m has no root in (q,1)");
  return roots.front().root;
}

double find_root_G_star(double q3, const ModelParams& p) {
  if (!(q3 > p.q())) throw DomainError("find_root_G_star: q3 must exceed q");
  const double u_bar = find_u_bar(p);
  const auto roots = cubic_roots_in(q3, p.q(), u_bar, p, kBracketTol);
  if (roots.empty()) throw ConvergenceError("find_root_G_star: G_* has no root in (q, u_bar)");
  return roots.back().root;
}

double find_kappa_bar(double q1, const ModelParams& p) {
  if (!(q1 > p.q())) throw DomainError("find_kappa_bar: q1 must exceed q");
  const double u_bar = find_u_bar(p);
  const auto roots = cubic_roots_in(q1, p.q(), u_bar, p, kBracketTol);
  if (roots.empty()) throw ConvergenceError("find_kappa_bar: no root in (q, u_bar)");
  return roots.back().root;
}

KineticRoots kinetic_roots(const ModelParams& p) {
  const auto g_roots = cubic_roots_in(p.q(), p.q(), 1.0, p, kBracketTol);
  if (g_roots.empty()) throw ConvergenceError("kinetic_roots: g has no sign change on (q,1)");
  KineticRoots r;
  r.u_bar = g_roots.back().root;
  r.g_root_count = static_cast<int>(g_roots.size());
  r.u_tilde = find_u_tilde(p);
  r.residual_g = cubic_g(r.u_bar, p);
  r.residual_g_tilde = quad_g_tilde(r.u_tilde, p);
  if (!(p.q() < r.u_tilde && r.u_tilde < r.u_bar && r.u_bar < 1.0)) {
    throw BoundViolation("kinetic_roots: ordering q < u_tilde < u_bar < 1 violated (u_tilde = " +
                         describe(r.u_tilde) + ", u_bar = " + describe(r.u_bar) + ")");
  }
  return r;
}

SteadyStates steady_states(const ModelParams& p) {
  const double ut = find_u_tilde(p);
  SteadyStates s{{0.0, 0.0}, {ut, ut}};
  const double ru = reaction_u(ut, ut, p);
  const double rv = reaction_v(ut, ut);
  if (std::abs(ru) > 10.0 * kRootTol || std::abs(rv) > 10.0 * kRootTol) {
    throw BoundViolation("steady_states: kinetic rates at (u_tilde, u_tilde) do not vanish, reaction_u = " +
                         describe(ru));
  }
  return s;
}

}  // namespace bz
