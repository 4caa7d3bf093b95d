#include "bz/semigroup.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "bz/error.hpp"

namespace bz {

namespace {

std::atomic<double> g_heat_skew{0.0};

// ---------------------------------------------------------------------------
// Spectral mode

struct SpectralPlan {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  std::size_t real_size = 0;
  std::size_t complex_size = 0;

  SpectralPlan() = default;
  SpectralPlan(const SpectralPlan&) = delete;
  SpectralPlan& operator=(const SpectralPlan&) = delete;
  ~SpectralPlan() {
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
  }
};

std::mutex g_plan_mutex;

// FFTW planning is not thread-safe; execution with the new-array interface is.
const SpectralPlan& plan_for(int dim, std::size_t n) {
  static std::map<std::pair<int, std::size_t>, std::unique_ptr<SpectralPlan>> cache;
  std::lock_guard lock(g_plan_mutex);
  auto& slot = cache[{dim, n}];
  if (!slot) {
    auto plan = std::make_unique<SpectralPlan>();
    const int ni = static_cast<int>(n);
    plan->real_size = dim == 1 ? n : n * n;
    plan->complex_size = dim == 1 ? n / 2 + 1 : n * (n / 2 + 1);
    std::vector<double> rbuf(plan->real_size);
    std::vector<fftw_complex> cbuf(plan->complex_size);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (dim == 1) {
      plan->forward = fftw_plan_dft_r2c_1d(ni, rbuf.data(), cbuf.data(), flags);
      plan->inverse = fftw_plan_dft_c2r_1d(ni, cbuf.data(), rbuf.data(), flags);
    } else {
      plan->forward = fftw_plan_dft_r2c_2d(ni, ni, rbuf.data(), cbuf.data(), flags);
      plan->inverse = fftw_plan_dft_c2r_2d(ni, ni, cbuf.data(), rbuf.data(), flags);
    }
    if (!plan->forward || !plan->inverse) throw Error("FFTW planning failed");
    slot = std::move(plan);
  }
  return *slot;
}

Field heat_spectral(const Field& f, double t, double diffusivity) {
  const GridSpec& g = f.grid();
  const std::size_t n = g.points();
  const SpectralPlan& plan = plan_for(g.dim(), n);

  std::vector<double> real(f.values().begin(), f.values().end());
  std::vector<fftw_complex> spec(plan.complex_size);
  fftw_execute_dft_r2c(plan.forward, real.data(), spec.data());

  const double w = 2.0 * std::numbers::pi / g.extent();
  const double rate = diffusivity * t * w * w;
  const double norm = 1.0 / static_cast<double>(plan.real_size);
  const std::size_t half = n / 2 + 1;

  // Multipliers depend on |k|² only through kx² + ky², so tabulate per axis.
  std::vector<double> axis(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = j <= n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
    axis[j] = std::exp(-rate * k * k);
  }
  if (g.dim() == 1) {
    for (std::size_t j = 0; j < half; ++j) {
      const double m = axis[j] * norm;
      spec[j][0] *= m;
      spec[j][1] *= m;
    }
  } else {
    for (std::size_t iy = 0; iy < n; ++iy) {
      for (std::size_t jx = 0; jx < half; ++jx) {
        const double m = axis[iy] * axis[jx] * norm;
        spec[iy * half + jx][0] *= m;
        spec[iy * half + jx][1] *= m;
      }
    }
  }
  fftw_execute_dft_c2r(plan.inverse, spec.data(), real.data());
  return Field(g, std::move(real));
}

// ---------------------------------------------------------------------------
// Kernel mode

/// Periodic kernel of exp(tDΔ_h) along one axis: out_i = f_i + Σ w_o (f_{i+o} - f_i).
struct Kernel {
  std::vector<std::pair<std::size_t, double>> taps;  // offsets in [1, N)
};

constexpr double kTapFloor = 1e-22;   // relative to the largest weight
constexpr double kBesselLimit = 600;  // exp(-x) I_j(x) evaluated directly below this

std::vector<double> lattice_weights_bessel(std::size_t n, double x) {
  // Infinite-lattice kernel e^{-x} I_j(x), folded onto the torus.
  std::vector<double> w(n, 0.0);
  const double w0 = std::exp(-x) * std::cyl_bessel_i(0.0, x);
  w[0] += w0;
  for (std::size_t j = 1;; ++j) {
    const double wj = std::exp(-x) * std::cyl_bessel_i(static_cast<double>(j), x);
    if (!(wj > kTapFloor * w0)) break;
    w[j % n] += wj;
    w[(n - j % n) % n] += wj;
    if (j > 64 * n) break;
  }
  return w;
}

std::vector<double> lattice_weights_fourier(std::size_t n, double x) {
  // Inverse DFT of the symbol exp(-2x sin²(πk/N)); only used when the kernel is wide.
  std::vector<double> symbol(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    symbol[k] = std::exp(-2.0 * x * s * s);
  }
  std::vector<double> w(n, 0.0);
  for (std::size_t o = 0; o < n; ++o) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t phase = (o * k) % n;
      acc += symbol[k] * std::cos(2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(n));
    }
    w[o] = std::max(0.0, acc / static_cast<double>(n));
  }
  return w;
}

Kernel build_kernel(std::size_t n, double x) {
  std::vector<double> w = x <= kBesselLimit ? lattice_weights_bessel(n, x) : lattice_weights_fourier(n, x);
  const double wmax = *std::max_element(w.begin(), w.end());
  double mass = 0.0;
  for (double& wi : w) {
    if (wi < kTapFloor * wmax) wi = 0.0;
    mass += wi;
  }
  Kernel k;
  for (std::size_t o = 1; o < n; ++o) {
    if (w[o] > 0.0) k.taps.emplace_back(o, w[o] / mass);
  }
  return k;
}

std::mutex g_kernel_mutex;

std::shared_ptr<const Kernel> kernel_for(std::size_t n, double x) {
  static std::map<std::pair<std::size_t, std::uint64_t>, std::shared_ptr<const Kernel>> cache;
  const std::pair<std::size_t, std::uint64_t> key{n, std::bit_cast<std::uint64_t>(x)};
  {
    std::lock_guard lock(g_kernel_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const Kernel>(build_kernel(n, x));
  std::lock_guard lock(g_kernel_mutex);
  if (cache.size() > 4096) cache.clear();
  return cache.emplace(key, std::move(built)).first->second;
}

// Applies the kernel along one axis of the line starting at `base` with `stride`.
void convolve_line(const double* in, double* out, std::size_t n, std::size_t stride, const Kernel& k) {
  for (std::size_t i = 0; i < n; ++i) {
    const double fi = in[i * stride];
    double acc = 0.0;
    double lo = fi;
    double hi = fi;
    for (const auto& [o, w] : k.taps) {
      const double fj = in[((i + o) % n) * stride];
      acc += w * (fj - fi);
      lo = std::min(lo, fj);
      hi = std::max(hi, fj);
    }
    out[i * stride] = std::clamp(fi + acc, lo, hi);
  }
}

Field heat_kernel(const Field& f, double t, double diffusivity) {
  const GridSpec& g = f.grid();
  const std::size_t n = g.points();
  const double hsp = g.spacing();
  const double x = 2.0 * diffusivity * t / (hsp * hsp);
  const auto kernel = kernel_for(n, x);
  if (kernel->taps.empty()) return f;

  if (g.dim() == 1) {
    Field out(g);
    convolve_line(f.values().data(), out.values().data(), n, 1, *kernel);
    return out;
  }
  Field tmp(g);
  for (std::size_t iy = 0; iy < n; ++iy) {
    convolve_line(f.values().data() + iy * n, tmp.values().data() + iy * n, n, 1, *kernel);
  }
  Field out(g);
  for (std::size_t ix = 0; ix < n; ++ix) {
    convolve_line(tmp.values().data() + ix, out.values().data() + ix, n, n, *kernel);
  }
  return out;
}

void check_non_negative_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError(std::string(who) + ": time must be finite and >= 0");
}

}  // namespace

const char* to_string(HeatMode mode) { return mode == HeatMode::Spectral ? "spectral" : "kernel"; }

HeatMode heat_mode_from_string(const std::string& name) {
  if (name == "spectral") return HeatMode::Spectral;
  if (name == "kernel") return HeatMode::Kernel;
  throw ConfigError("unknown heat mode '" + name + "' (expected spectral or kernel)");
}

double positivity_tolerance(const PropagatorConfig& cfg, const Field& f) {
  if (cfg.positivity_tol >= 0.0) return cfg.positivity_tol;
  return cfg.mode == HeatMode::Kernel ? 0.0 : 1e-9 * sup_norm(f);
}

Field heat(const Field& f, double t, double diffusivity, HeatMode mode) {
  check_non_negative_time(t, "heat");
  if (!(diffusivity > 0.0)) throw DomainError("heat: diffusivity must be positive");
  if (t == 0.0) return f;
  Field out = mode == HeatMode::Spectral ? heat_spectral(f, t, diffusivity) : heat_kernel(f, t, diffusivity);
  if (const double skew = g_heat_skew.load(std::memory_order_relaxed); skew != 0.0) {
    for (double& x : out.values()) x *= 1.0 + skew;
  }
  ensure_finite(out, "heat");
  return out;
}

Field damped(const Field& f, double t, const ModelParams& p, HeatMode mode) {
  check_non_negative_time(t, "damped");
  Field out = heat(f, t, p.d(), mode);
  const double decay = std::exp(-t);
  for (double& x : out.values()) x *= decay;
  return out;
}

Field strang_substep(const Field& f, const Field& eta_mid, double delta, HeatMode mode) {
  Field half(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) half[i] = f[i] * std::exp(-0.5 * delta * eta_mid[i]);
  Field out = heat(half, delta, 1.0, mode);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::exp(-0.5 * delta * eta_mid[i]);
  ensure_finite(out, "strang_substep");
  return out;
}

Field source_substep(const Field& x, const Field& eta_mid, const Field& zeta_lo, const Field& zeta_hi,
                     double delta, HeatMode mode) {
  Field pre(x.grid());
  for (std::size_t i = 0; i < x.size(); ++i) pre[i] = x[i] + 0.5 * delta * zeta_lo[i];
  Field out = strang_substep(pre, eta_mid, delta, mode);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += 0.5 * delta * zeta_hi[i];
  return out;
}

Field damped_source_substep(const Field& y, const Field& phi_lo, const Field& phi_hi, double delta,
                            double diffusivity, HeatMode mode) {
  const double decay = std::exp(-delta);
  const double one_minus = -std::expm1(-delta);
  // ∫_0^δ e^{-(δ-s)} s/δ ds and its complement within 1 - e^{-δ}
  const double w_hi = delta > 1e-4 ? (delta - one_minus) / delta
                                   : delta * (0.5 - delta * (1.0 / 6.0 - delta / 24.0));
  const double w_lo = one_minus - w_hi;
  Field pre(y.grid());
  for (std::size_t i = 0; i < y.size(); ++i) pre[i] = decay * y[i] + w_lo * phi_lo[i];
  Field out = heat(pre, delta, diffusivity, mode);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += w_hi * phi_hi[i];
  ensure_finite(out, "damped_source_substep");
  return out;
}

std::size_t substep_count(double span, double substeps_per_unit) {
  if (!(substeps_per_unit > 0.0)) throw DomainError("substeps_per_unit must be positive");
  if (span <= 0.0) return 0;
  const double raw = span * substeps_per_unit;
  // guard against ceil(Q·(1 + ulp)) = Q + 1
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(raw * (1.0 - 1e-12))));
}

Field evolve(const Field& f, const FieldSource& eta, double s, double t, const PropagatorConfig& cfg) {
  if (t < s) throw DomainError("evolve: t < s");
  const std::size_t steps = substep_count(t - s, cfg.substeps_per_unit);
  Field x = f;
  if (steps == 0) return x;
  const double delta = (t - s) / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double mid = s + (static_cast<double>(k) + 0.5) * delta;
    x = strang_substep(x, eta(mid), delta, cfg.mode);
  }
  return x;
}

Field evolve_with_source(const Field& theta0, const FieldSource& eta, const FieldSource& zeta, double s,
                         double t, const PropagatorConfig& cfg) {
  if (t < s) throw DomainError("evolve_with_source: t < s");
  const std::size_t steps = substep_count(t - s, cfg.substeps_per_unit);
  Field x = theta0;
  if (steps == 0) return x;
  const double delta = (t - s) / static_cast<double>(steps);
  Field z_lo = zeta(s);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t_lo = s + static_cast<double>(k) * delta;
    const double t_hi = k + 1 == steps ? t : t_lo + delta;
    Field z_hi = zeta(t_hi);
    x = source_substep(x, eta(t_lo + 0.5 * delta), z_lo, z_hi, delta, cfg.mode);
    z_lo = std::move(z_hi);
  }
  return x;
}

Field damped_with_source(const Field& psi0, const FieldSource& phi, double s, double t, double diffusivity,
                         const PropagatorConfig& cfg) {
  if (t < s) throw DomainError("damped_with_source: t < s");
  const std::size_t steps = substep_count(t - s, cfg.substeps_per_unit);
  Field y = psi0;
  if (steps == 0) return y;
  const double delta = (t - s) / static_cast<double>(steps);
  Field p_lo = phi(s);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t_hi = k + 1 == steps ? t : s + static_cast<double>(k + 1) * delta;
    Field p_hi = phi(t_hi);
    y = damped_source_substep(y, p_lo, p_hi, delta, diffusivity, cfg.mode);
    p_lo = std::move(p_hi);
  }
  return y;
}

namespace testing {
void set_heat_multiplier_skew(double skew) { g_heat_skew.store(skew, std::memory_order_relaxed); }
double heat_multiplier_skew() { return g_heat_skew.load(std::memory_order_relaxed); }
}  // namespace testing

}  // namespace bz
