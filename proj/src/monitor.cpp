#include "bz/monitor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

#include "bz/error.hpp"

namespace bz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

EnvelopeRow envelope_of(const StatePair& s) {
  return {s.time, min_value(s.u), max_value(s.u), min_value(s.v), max_value(s.v)};
}

double torus_distance(const GridSpec& g, std::size_t i, const std::array<double, 2>& c) {
  const double L = g.extent();
  auto axis = [&](double x, double y) {
    double d = std::fmod(std::abs(x - y), L);
    return std::min(d, L - d);
  };
  if (g.dim() == 1) return axis(g.coord(i), c[0]);
  const std::size_t n = g.points();
  const double dx = axis(g.coord(i % n), c[0]);
  const double dy = axis(g.coord(i / n), c[1]);
  return std::hypot(dx, dy);
}

/// Accumulates the worst case of one property over trials.
class Check {
 public:
  explicit Check(std::string name, bool gating = true) {
    res_.name = std::move(name);
    res_.worst_excess = -kInf;
    res_.gating = gating;
  }
  void add(double excess) {
    res_.worst_excess = std::max(res_.worst_excess, std::isnan(excess) ? kInf : excess);
    ++res_.trials;
  }
  CheckResult result() const {
    CheckResult r = res_;
    r.pass = r.trials > 0 && r.worst_excess <= 0.0;
    return r;
  }

 private:
  CheckResult res_;
};

}  // namespace

bool RegionBox::bounded() const { return std::isfinite(hi_u) && std::isfinite(hi_v); }

double RegionBox::width() const {
  if (!bounded()) return 1.0;
  return std::min(hi_u - lo_u, hi_v - lo_v);
}

RegionBox nonneg_quadrant() { return {"quadrant", 0.0, kInf, 0.0, kInf}; }

RegionBox square_box(double m) {
  if (!(m > 0.0)) throw DomainError("square_box: m must be positive");
  return {"box[0," + format_double(m) + "]", 0.0, m, 0.0, m};
}

RegionBox region_S(const ModelParams& p) {
  const double ub = find_u_bar(p);
  return {"S", p.q(), ub, p.q(), ub};
}

RegionBox natural_box(double q_nat, double u_nat) {
  if (!(q_nat < u_nat)) throw DomainError("natural_box: need q_nat < u_nat");
  return {"S_nat", q_nat, u_nat, q_nat, u_nat};
}

RegionTracker::RegionTracker(RegionBox region, double tol, std::size_t snapshot_stride, std::size_t envelope_every)
    : envelope_every_(std::max<std::size_t>(1, envelope_every)) {
  if (!(tol >= 0.0)) throw DomainError("RegionTracker: tol must be non-negative");
  rep_.region = std::move(region);
  rep_.tol = tol;
  rep_.snapshot_stride = snapshot_stride;
}

void RegionTracker::observe(const StatePair& s) {
  const RegionBox& r = rep_.region;
  auto scan = [&](const Field& f, char var, double lo, double hi) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double x = f[i];
      const double over = std::max(lo - x, x - hi);
      if (over > 0.0) rep_.worst_overshoot = std::max(rep_.worst_overshoot, over);
      if (over > rep_.tol) {
        ++rep_.violation_count;
        if (rep_.violations.size() < kMaxViolations) rep_.violations.push_back({s.time, i, var, x, over});
      }
    }
  };
  scan(s.u, 'u', r.lo_u, r.hi_u);
  scan(s.v, 'v', r.lo_v, r.hi_v);
  const EnvelopeRow row = envelope_of(s);
  if (rep_.snapshots_checked % envelope_every_ == 0) {
    rep_.envelope.push_back(row);
    last_.reset();
  } else {
    last_ = row;
  }
  ++rep_.snapshots_checked;
  rep_.pass = rep_.violation_count == 0;
}

RegionReport RegionTracker::report() const {
  RegionReport r = rep_;
  if (last_) r.envelope.push_back(*last_);
  return r;
}

RegionReport check_box(const Trajectory& traj, const RegionBox& region, double tol, std::size_t snapshot_stride) {
  RegionTracker tracker(region, tol, snapshot_stride);
  for (const auto& s : traj) tracker.observe(s);
  return tracker.report();
}

bool strictly_inside(const StatePair& s, const RegionBox& region) {
  auto inside = [](const Field& f, double lo, double hi) {
    for (double x : f.values()) {
      if (!(x > lo && x < hi)) return false;
    }
    return true;
  };
  return inside(s.u, region.lo_u, region.hi_u) && inside(s.v, region.lo_v, region.hi_v);
}

std::uint64_t sample_seed(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  return rng();
}

InvarianceReport invariance_experiment(const ModelParams& p, const RegionBox& region, const InvarianceConfig& cfg) {
  const double diffusion_length = std::sqrt(2.0 * std::max(1.0, p.d()) * cfg.T);
  if (diffusion_length > cfg.grid.extent() / 4.0) {
    throw DomainError("invariance_experiment: diffusion length " + format_double(diffusion_length) +
                      " exceeds a quarter of the box length " + format_double(cfg.grid.extent()));
  }
  if (!(cfg.margin > 0.0 && cfg.margin < 0.5)) throw DomainError("invariance_experiment: margin must lie in (0, 0.5)");
  if (cfg.check_stride < 1) throw DomainError("invariance_experiment: check_stride must be >= 1");

  InvarianceReport rep;
  rep.region = region;
  rep.config = cfg;
  const double hi_u = region.bounded() ? region.hi_u : 1.0;
  const double hi_v = region.bounded() ? region.hi_v : 1.0;
  const double m_box = std::max(hi_u, hi_v);
  rep.dt = cfg.dt > 0.0 ? cfg.dt : max_stable_dt(p, m_box);
  rep.samples.resize(cfg.samples);
  if (cfg.samples == 0) return rep;

  StepperConfig sc;
  sc.dt = rep.dt;
  sc.scheme = cfg.scheme;
  sc.mode = cfg.mode;
  sc.snapshot_stride = cfg.check_stride;
  sc.keep_snapshots = false;
  const auto checks = static_cast<std::size_t>(std::ceil(cfg.T / rep.dt / static_cast<double>(cfg.check_stride)));
  const std::size_t envelope_every = std::max<std::size_t>(1, checks / 200);

  auto run_sample = [&](std::size_t i) {
    SampleVerdict& out = rep.samples[i];
    out.index = i;
    out.seed = sample_seed(cfg.seed, i);
    const double wu = cfg.margin * (hi_u - region.lo_u);
    const double wv = cfg.margin * (hi_v - region.lo_v);
    const Field u0 = band_limited_random_field(cfg.grid, cfg.max_mode, region.lo_u + wu, hi_u - wu, out.seed);
    const Field v0 =
        band_limited_random_field(cfg.grid, cfg.max_mode, region.lo_v + wv, hi_v - wv, out.seed ^ 0x9e3779b97f4a7c15ULL);
    RegionTracker tracker(region, cfg.tol, cfg.check_stride, envelope_every);
    EnvelopeRow ext{0.0, kInf, -kInf, kInf, -kInf};
    const Monitor mon = [&](const StatePair& s, std::size_t) {
      tracker.observe(s);
      const EnvelopeRow e = envelope_of(s);
      ext = {s.time, std::min(ext.min_u, e.min_u), std::max(ext.max_u, e.max_u), std::min(ext.min_v, e.min_v),
             std::max(ext.max_v, e.max_v)};
      return MonitorAction::Continue;
    };
    simulate({u0, v0, 0.0}, cfg.T, p, sc, {mon});
    const RegionReport r = tracker.report();
    out.worst_overshoot = r.worst_overshoot;
    out.violation_count = r.violation_count;
    if (!r.violations.empty()) out.first_violation = r.violations.front();
    out.extremes = ext;
    out.pass = r.pass;
  };

  const unsigned hw = cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<unsigned>(std::min<std::size_t>(hw, cfg.samples));
  std::vector<std::exception_ptr> errors(cfg.samples);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cfg.samples; i = next++) {
      try {
        run_sample(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (const auto& s : rep.samples) {
    rep.worst_overshoot = std::max(rep.worst_overshoot, s.worst_overshoot);
    rep.pass = rep.pass && s.pass;
  }
  return rep;
}

EntryResult entry_check(const Trajectory& traj, const TrapChainResult& chain, const ModelParams& p,
                        double entry_tol) {
  if (traj.empty()) throw DomainError("entry_check: empty trajectory");
  const double t0 = traj.start_time();
  if (traj.end_time() - t0 < chain.T_sharp * (1.0 - 1e-12)) {
    throw DomainError("entry_check: trajectory ends at " + format_double(traj.end_time() - t0) +
                      " before T_sharp = " + format_double(chain.T_sharp));
  }
  EntryResult r;
  r.T_sharp = chain.T_sharp;
  r.entry_tol = entry_tol;
  const RegionBox S = region_S(p);
  for (const auto& s : traj) {
    if (strictly_inside(s, S)) {
      r.entry_time = s.time - t0;
      break;
    }
  }
  r.satisfied = r.entry_time && *r.entry_time <= chain.T_sharp + entry_tol;
  return r;
}

SemigroupReport semigroup_suite(const GridSpec& grid, std::size_t trials, std::uint64_t seed, const ModelParams& p) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, U(rng)); };
  const double L = grid.extent();
  const double two_pi = 2.0 * std::acos(-1.0);

  Check contraction_k("heat contraction (kernel, exact)");
  Check minimum_k("heat minimum preservation (kernel, exact)");
  Check contraction_s("heat contraction (spectral, 1e-9 relative, rough data)", false);
  Check decay("damped decay e^{-t}|f| + 1e-12");
  Check law("semigroup law (spectral, 1e-12)");
  Check mean("mean preservation (spectral, 1e-12)");
  Check mode("Fourier eigenmode decay (spectral, 1e-12)");
  Check smoothing("smoothing t^{1/2}|grad e^{t Lap} f| <= |f|");
  Check psi_bound("damped Duhamel |psi| <= |psi0| + t max|phi|");
  Check psi_lower("damped Duhamel psi >= c");
  Check evolve_bound("evolution family |xi| <= 4/3 |xi0| for t <= 1/(4a)");
  Check shifted_bound("shifted problem |xi| <= 2 |xi0|");
  Check shifted_strict("shifted problem xi > c (strict floor)");
  double c_obs = 0.0;

  for (std::size_t trial = 0; trial < trials; ++trial) {
    const double lo = -U(rng);
    const double hi = 2.0 * U(rng);
    const Field f = random_uniform_field(grid, lo, hi, rng());
    const double sf = sup_norm(f);
    const double t = log_uniform(1e-4, 1.0);
    const double D = U(rng) < 0.5 ? 1.0 : p.d();

    const Field hk = heat(f, t, D, HeatMode::Kernel);
    contraction_k.add(sup_norm(hk) - sf);
    minimum_k.add(min_value(f) - min_value(hk));
    const Field hs = heat(f, t, D, HeatMode::Spectral);
    contraction_s.add(sup_norm(hs) - sf * (1.0 + 1e-9));
    decay.add(sup_norm(damped(f, t, p, HeatMode::Kernel)) - std::exp(-t) * sf - 1e-12);

    const double s = log_uniform(1e-4, 1.0);
    law.add(sup_distance(heat(heat(f, s, D), t, D), heat(f, s + t, D)) - 1e-12);
    mean.add(std::abs(mean_value(hs) - mean_value(f)) - 1e-12);

    const int k = 1 + static_cast<int>(U(rng) * static_cast<double>(grid.points() / 4));
    const std::array<int, 2> kv{k, grid.dim() == 2 ? static_cast<int>(U(rng) * 3.0) : 0};
    const Field g = single_mode(grid, kv, 1.0, 0.0, two_pi * U(rng));
    const double k2 = std::pow(two_pi / L, 2) * (kv[0] * kv[0] + kv[1] * kv[1]);
    const Field hg = heat(g, t, D);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(hg[i] - std::exp(-D * k2 * t) * g[i]));
    mode.add(err - 1e-12);

    double trial_c = 0.0;
    for (double ts = 1e-4; ts <= 1.0 + 1e-12; ts *= std::sqrt(10.0)) {
      trial_c = std::max(trial_c, std::sqrt(ts) * grad_sup_norm(heat(f, ts, 1.0, HeatMode::Kernel)) / sf);
    }
    c_obs = std::max(c_obs, trial_c);
    smoothing.add(trial_c - 1.0);

    {
      const double c = 0.3 * U(rng);
      const Field psi0 = random_uniform_field(grid, c, c + 1.0, rng());
      const Field phi_a = random_uniform_field(grid, c, c + 2.0 * U(rng), rng());
      const Field phi_b = random_uniform_field(grid, c, c + 2.0 * U(rng), rng());
      const double tl = log_uniform(1e-3, 1.0);
      const FieldSource phi = [&](double tau) {
        const double w = tau / tl;
        Field out(grid);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - w) * phi_a[i] + w * phi_b[i];
        return out;
      };
      PropagatorConfig pc;
      pc.mode = HeatMode::Kernel;
      pc.substeps_per_unit = 200.0;
      const Field psi = damped_with_source(psi0, phi, 0.0, tl, p.d(), pc);
      psi_bound.add(sup_norm(psi) - (sup_norm(psi0) + tl * std::max(sup_norm(phi_a), sup_norm(phi_b))) - 1e-12);
      psi_lower.add(c - min_value(psi) - 1e-14 * std::max(1.0, c));
    }

    const double a = log_uniform(1.0, 1e3);
    const std::uint64_t eta_seed = rng();
    const double omega = 10.0 * U(rng);
    const Field eta_base = random_uniform_field(grid, -a, a, eta_seed);
    const FieldSource eta = [&](double tau) {
      Field e = eta_base;
      for (std::size_t i = 0; i < e.size(); ++i) e[i] *= std::cos(omega * tau + 0.1 * static_cast<double>(i));
      return e;
    };
    PropagatorConfig pc;
    pc.mode = HeatMode::Kernel;
    pc.substeps_per_unit = 200.0 * a;
    {
      const Field xi0 = random_uniform_field(grid, -1.0, 1.0, rng());
      const Field xi = evolve(xi0, eta, 0.0, U(rng) / (4.0 * a), pc);
      evolve_bound.add(sup_norm(xi) - 4.0 / 3.0 * sup_norm(xi0));
    }
    {
      const double c = U(rng);
      const Field xi0 = random_uniform_field(grid, c, c + 1.0 + U(rng), rng());
      Field theta0 = xi0;
      for (std::size_t i = 0; i < theta0.size(); ++i) theta0[i] -= c;
      const double b = log_uniform(1e-2, 1e2);
      const Field zeta_base = random_uniform_field(grid, 1e-3 * b, b, rng());
      const FieldSource zeta = [&](double tau) {
        Field z = zeta_base;
        for (std::size_t i = 0; i < z.size(); ++i) z[i] *= 0.75 + 0.25 * std::sin(omega * tau + static_cast<double>(i));
        return z;
      };
      const double horizon = std::min(1.0 / (4.0 * a), sup_norm(theta0) / (2.0 * b)) * U(rng);
      const Field theta = evolve_with_source(theta0, eta, zeta, 0.0, horizon, pc);
      Field xi = theta;
      for (std::size_t i = 0; i < xi.size(); ++i) xi[i] += c;
      shifted_bound.add(sup_norm(xi) - 2.0 * sup_norm(xi0));
      shifted_strict.add(kStrictFloor - min_value(theta));
    }
  }

  SemigroupReport rep;
  for (const Check* c : {&contraction_k, &minimum_k, &contraction_s, &decay, &law, &mean, &mode, &smoothing,
                         &psi_bound, &psi_lower, &evolve_bound, &shifted_bound, &shifted_strict}) {
    rep.checks.push_back(c->result());
    if (rep.checks.back().gating) rep.pass = rep.pass && rep.checks.back().pass;
  }
  rep.smoothing_constant = c_obs;
  return rep;
}

InstabilityReport instability_probe(const ModelParams& p, double amplitude, double T, ProbeShape shape,
                                    const GridSpec& grid, const StepperConfig& cfg) {
  if (!(amplitude >= 0.0 && amplitude < p.q())) throw DomainError("instability_probe: amplitude must lie in [0, q)");
  if (!(T > 0.0)) throw DomainError("instability_probe: T must be positive");
  InstabilityReport r;
  r.amplitude = amplitude;
  r.T = T;
  r.shape = shape;
  const std::array<double, 2> center{grid.extent() / 2.0, grid.extent() / 2.0};
  const Field u0 = shape == ProbeShape::Uniform ? constant_field(grid, amplitude)
                                                : gaussian_bump(grid, center, grid.extent() / 20.0, amplitude);
  r.initial_max = max_value(u0);
  double min_after = kInf;
  const Monitor mon = [&](const StatePair& s, std::size_t step) {
    if (step > 0) min_after = std::min(min_after, min_value(s.u));
    return MonitorAction::Continue;
  };
  StepperConfig sc = cfg;
  sc.keep_snapshots = false;
  const Trajectory traj = simulate({u0, Field(grid), 0.0}, T, p, sc, {mon});
  const Field& uT = traj.back().u;
  r.final_max = max_value(uT);
  r.final_min = min_value(uT);
  r.growth = amplitude > 0.0 ? r.final_max / amplitude : 0.0;
  r.grew = r.growth >= 10.0;
  r.min_positive_time_value = min_after;
  r.strictly_positive = min_after > 0.0 && r.final_min >= kStrictFloor;
  if (shape == ProbeShape::Bump) {
    for (double frac : {0.125, 0.25, 0.5}) {
      double m = kInf;
      for (std::size_t i = 0; i < uT.size(); ++i) {
        if (torus_distance(grid, i, center) <= frac * grid.extent()) m = std::min(m, uT[i]);
      }
      r.ball_minima.push_back(m);
    }
  }
  return r;
}

}  // namespace bz
