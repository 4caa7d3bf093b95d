// Acceptance run: one PASS/FAIL line per criterion.  Criteria 1-8 decide the
// exit status; criterion 9 is reported only.
//
//   acceptance [--quick] [--only N]
//
// --quick uses 10 invariance samples per region instead of 50.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bz/cli.hpp"
#include "bz/comparison.hpp"
#include "bz/config.hpp"
#include "bz/error.hpp"
#include "bz/mild.hpp"
#include "bz/monitor.hpp"
#include "bz/stepper.hpp"
#include "ode_oracle.hpp"

using namespace bz;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

const ModelParams kP = ModelParams::standard(1.0);

// 1 ---------------------------------------------------------------------------
void roots(Outcome& o) {
  const KineticRoots r = kinetic_roots(kP);
  const double closed = u_tilde_closed_form(kP);
  o.require(std::abs(cubic_g(r.u_bar, kP)) <= 1e-10, "|g(u_bar)| <= 1e-10");
  o.require(std::abs(quad_g_tilde(r.u_tilde, kP)) <= 1e-10, "|g~(u_tilde)| <= 1e-10");
  o.require(kP.q() < r.u_tilde && r.u_tilde < r.u_bar && r.u_bar < 1.0, "q < u_tilde < u_bar < 1");
  o.require(std::abs(r.u_tilde - closed) <= 1e-12, "u_tilde matches closed form");
  o.detail << "u_bar=" << format_double(r.u_bar) << " u_tilde=" << format_double(r.u_tilde)
           << " |g|=" << fmt(std::abs(cubic_g(r.u_bar, kP))) << " closed-form gap=" << fmt(std::abs(r.u_tilde - closed));
}

// 2 ---------------------------------------------------------------------------
void semigroup(Outcome& o) {
  const SemigroupReport r = semigroup_suite(GridSpec(1, 100.0, 256), 100, 2024, kP);
  int gating = 0;
  for (const auto& c : r.checks) {
    if (c.gating) {
      ++gating;
      o.require(c.pass, c.name + " (excess " + fmt(c.worst_excess) + ")");
    }
  }
  o.require(std::isfinite(r.smoothing_constant) && r.smoothing_constant <= 1.0, "smoothing constant bounded");
  o.detail << gating << " gating checks x 100 fields, observed smoothing constant " << fmt(r.smoothing_constant);
}

// 3 ---------------------------------------------------------------------------
void picard(Outcome& o) {
  const GridSpec g(1, 20.0, 32);
  const SolverBounds spot = solver_bounds(constant_field(g, 1.0), constant_field(g, 1.0), kP);
  o.require(std::abs(spot.T0 - 2.5e-5) <= 1e-12 && std::abs(spot.a - 1e4) <= 1e-8 && std::abs(spot.b - 189.5) <= 1e-10,
            "spot values T0, a, b");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> top(0.05, 2.0);
  double worst_ratio = 0.0;
  int most_iter = 0;
  for (int k = 0; k < 20; ++k) {
    const double mu = top(rng), mv = top(rng);
    const Field u0 = random_uniform_field(g, 0.0, mu, sample_seed(11, 2 * k));
    const Field v0 = random_uniform_field(g, 0.0, mv, sample_seed(11, 2 * k + 1));
    PicardConfig cfg;
    cfg.tol = 1e-8;
    cfg.max_iter = 20;
    std::optional<PicardResult> res;
    try {
      res = picard_solve(u0, v0, kP, cfg);
    } catch (const Error& e) {
      o.require(false, std::string("sample ") + std::to_string(k) + ": " + e.what());
      continue;
    }
    const PicardResult& r = *res;
    const auto& d = r.diagnostics;
    const double m = r.bounds.m;
    o.require(d.converged, "converged within 20 iterations");
    most_iter = std::max(most_iter, static_cast<int>(d.iterates.size()));
    const auto& first = d.iterates.front();
    o.require(first.K1 <= m && first.K2 <= m, "K_{j,1} <= m");
    for (const auto& it : d.iterates) {
      o.require(it.K1 <= 2 * m + 1e-6 * m && it.K2 <= 2 * m + 1e-6 * m, "K_{j,l} <= 2m");
      o.require(it.min_u >= -1e-9 && it.min_v >= -1e-9, "iterates nonnegative");
    }
    for (std::size_t l = 3; l + 1 < d.deltas.size(); ++l) {
      if (d.deltas[l] <= 1e-13) continue;
      const double ratio = d.deltas[l + 1] / d.deltas[l];
      worst_ratio = std::max(worst_ratio, ratio);
      o.require(ratio <= 0.8, "delta decay ratio <= 0.8");
    }
  }
  o.detail << "20 data sets, T0(m=1)=" << fmt(spot.T0) << " a=" << fmt(spot.a) << " b=" << fmt(spot.b)
           << ", worst delta ratio " << fmt(worst_ratio) << ", at most " << most_iter << " iterates";
}

// 4 ---------------------------------------------------------------------------
void oracle_equivalence(Outcome& o) {
  const GridSpec g(1, 10.0, 8);
  double worst_picard = 0.0, worst_stepper = 0.0;
  for (auto [u, v] : {std::pair{0.01, 0.005}, std::pair{0.3, 0.1}, std::pair{1.0, 0.2}, std::pair{0.9, 0.9}}) {
    PicardConfig pc;
    pc.tol = 1e-13;
    const PicardResult r = picard_solve(constant_field(g, u), constant_field(g, v), kP, pc);
    const auto x = oracle::kinetics(u, v, r.horizon, kP);
    worst_picard = std::max({worst_picard, std::abs(max_value(r.trajectory.back().u) - x[0]),
                             std::abs(max_value(r.trajectory.back().v) - x[1])});

    StepperConfig sc;
    sc.dt = 1e-6;
    sc.mode = HeatMode::Kernel;
    sc.snapshot_stride = 1000000;
    const double T = 0.1;
    const Trajectory tr = simulate({constant_field(g, u), constant_field(g, v)}, T, kP, sc);
    const auto y = oracle::kinetics(u, v, T, kP);
    worst_stepper = std::max({worst_stepper, std::abs(max_value(tr.back().u) - y[0]),
                              std::abs(max_value(tr.back().v) - y[1])});
  }
  o.require(worst_picard <= 1e-6, "Picard vs oracle <= 1e-6");
  o.require(worst_stepper <= 1e-6, "stepper vs oracle <= 1e-6");

  const GridSpec gx(1, 10.0, 16);
  const Field u0 = random_uniform_field(gx, 0.1, 0.9, 31);
  const Field v0 = random_uniform_field(gx, 0.1, 0.9, 32);
  const double T0 = solver_bounds(u0, v0, kP).T0;
  std::vector<double> gaps;
  for (int level = 0; level < 3; ++level) gaps.push_back(cross_validate(u0, v0, kP, T0, level).gap);
  for (std::size_t k = 0; k + 1 < gaps.size(); ++k) o.require(gaps[k] / gaps[k + 1] >= 1.8, "gap shrinks >= 1.8x");
  o.detail << "Picard gap " << fmt(worst_picard) << " (over T0), stepper gap " << fmt(worst_stepper)
           << " (T=0.1, dt=1e-6), cross-validation ratios " << fmt(gaps[0] / gaps[1]) << ", " << fmt(gaps[1] / gaps[2]);
}

// 5 ---------------------------------------------------------------------------
void invariance(Outcome& o, std::size_t samples) {
  InvarianceConfig cfg;
  cfg.samples = samples;
  cfg.T = 10.0;
  cfg.grid = GridSpec(1, 100.0, 128);
  cfg.mode = HeatMode::Kernel;
  cfg.tol = 1e-8;
  cfg.seed = 5;
  for (const RegionBox& box : {region_S(kP), square_box(2.0)}) {
    const InvarianceReport r = invariance_experiment(kP, box, cfg);
    std::size_t violations = 0;
    for (const auto& s : r.samples) violations += s.violation_count;
    o.require(r.pass, box.name + " invariance");
    o.detail << box.name << ": " << violations << " violations, worst overshoot " << fmt(r.worst_overshoot) << "; ";
  }
  o.detail << samples << " samples each, T=10, 128 points";
}

// 6 ---------------------------------------------------------------------------
void trap_times(Outcome& o) {
  const TrapChainResult r = trap_chain(kP.q() / 2, 1.0, kP);
  o.require(kP.q() < r.q3 && r.q3 < r.q2 && r.q2 < r.q1, "q < q3 < q2 < q1");
  o.require(0.0 <= r.T1 && r.T1 <= r.T2 && r.T2 <= r.T3 && r.T3 <= r.T4 && r.T4 <= r.T_sharp, "T1 <= ... <= T_sharp");
  auto closed = [](double c, double q, double eps) { return eps * std::log((1.0 - c) * q / (c * (1.0 - q))); };
  const double eps = kP.epsilon(), q = kP.q();
  o.require(std::abs(r.T1 - closed(r.c_star, q, eps)) <= 1e-8, "logistic leg closed form");
  const double spot = logistic_hit_time(1e-5, q, kP);
  o.require(std::abs(spot - closed(1e-5, q, eps)) <= 1e-8 && std::abs(spot - 0.09588) <= 5e-5, "spot value 0.09588");
  HitOptions opt;
  opt.step = 1e-5;
  const double rk4 = ode_hit_time([&](double s) { return s * (1.0 - s) / eps; }, 1e-5, q, opt);
  o.require(std::abs(rk4 - spot) <= 1e-8, "RK4 logistic hit time");

  const GridSpec g(1, 100.0, 16);
  StepperConfig sc;
  sc.dt = max_stable_dt(kP, 1.0);
  sc.mode = HeatMode::Kernel;
  sc.snapshot_stride = 10;
  const Trajectory tr =
      simulate({constant_field(g, r.c_star), constant_field(g, r.c_star)}, r.T_sharp + 1.0, kP, sc);
  const EntryResult e = entry_check(tr, r, kP, sc.dt * static_cast<double>(sc.snapshot_stride));
  o.require(e.satisfied, "entry into S by T_sharp");
  o.detail << "T1=" << fmt(r.T1) << " T_sharp=" << fmt(r.T_sharp) << " tau(1e-5)=" << format_double(spot)
           << " RK4 gap " << fmt(std::abs(rk4 - spot)) << ", PDE entry at t="
           << (e.entry_time ? fmt(*e.entry_time) : std::string("never"));
}

// 7 ---------------------------------------------------------------------------
void steady_and_instability(Outcome& o) {
  const GridSpec g(1, 10.0, 8);
  const double ut = find_u_tilde(kP);
  StepperConfig sc;
  sc.dt = 1e-5;
  sc.mode = HeatMode::Kernel;
  sc.snapshot_stride = 1000;
  double drift = 0.0;
  for (double c : {0.0, ut}) {
    const Trajectory tr = simulate({constant_field(g, c), constant_field(g, c)}, 1.0, kP, sc);
    for (const auto& s : tr) drift = std::max({drift, sup_distance(s.u, constant_field(g, c)), sup_distance(s.v, constant_field(g, c))});
    PicardConfig pc;
    pc.samples = 8;
    pc.quad_substeps = 1;
    const Trajectory mt = picard_extend(constant_field(g, c), constant_field(g, c), kP, 1.0, pc);
    for (const auto& s : mt) drift = std::max({drift, sup_distance(s.u, constant_field(g, c)), sup_distance(s.v, constant_field(g, c))});
    o.require(std::abs(mt.end_time() - 1.0) <= 1e-12, "Picard reaches T = 1");
  }
  o.require(drift <= 1e-10, "steady states held to 1e-10");

  StepperConfig pc = sc;
  pc.dt = 1e-6;
  const InstabilityReport r = instability_probe(kP, 1e-6, 1.0, ProbeShape::Uniform, g, pc);
  const auto x = oracle::kinetics(1e-6, 0.0, 1.0, kP);
  const double gap = std::abs(r.final_max - x[0]);
  o.require(r.growth >= 10.0, "growth >= 10x");
  o.require(gap <= 1e-6, "perturbation matches oracle to 1e-6");
  o.detail << "steady drift " << fmt(drift) << ", growth " << fmt(r.growth) << "x, oracle gap " << fmt(gap);
}

// 8 ---------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void determinism(Outcome& o) {
  const fs::path root = fs::temp_directory_path() / ("bzwell-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(root);
  const fs::path config = root / "config.json";
  {
    std::ofstream os(config);
    os << R"({"simulate": {"T": 0.2, "initial": {"u": {"kind": "band_limited", "max_mode": 4, "lo": 0.0, "hi": 0.9},
                                                  "v": {"kind": "uniform_random", "lo": 0.0, "hi": 0.5}}},
              "solver": {"snapshot_stride": 200},
              "sweep": {"h_values": [0.5, 1.0, 2.0], "T": 0.2, "points": 24, "threads": 3}})";
  }
  std::ostringstream sink;
  std::size_t compared = 0;
  for (const std::string cmd : {"simulate", "sweep", "trap-time"}) {
    const fs::path a = root / (cmd + "-a"), b = root / (cmd + "-b");
    const int ra = run_cli({cmd, "--config", config.string(), "--output", a.string(), "--quiet"}, sink, sink);
    const int rb = run_cli({cmd, "--config", config.string(), "--output", b.string(), "--quiet"}, sink, sink);
    o.require(ra == 0 && rb == 0, cmd + " runs");
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
      if (!entry.is_regular_file()) continue;
      const fs::path rel = fs::relative(entry.path(), a);
      if (rel == "manifest.json") continue;
      o.require(slurp(entry.path()) == slurp(b / rel), cmd + "/" + rel.string() + " identical");
      ++compared;
    }
    const std::string ma = slurp(a / "manifest.json"), mb = slurp(b / "manifest.json");
    o.require(!ma.empty() && Json::parse(ma)["config"].dump().size() > 0, "manifest written");
  }
  fs::remove_all(root);
  o.require(compared > 10, "outputs compared");
  o.detail << compared << " output files byte-identical across repeated runs";
}

// 9 ---------------------------------------------------------------------------
void qualitative(Outcome& o) {
  const GridSpec g(2, 60.0, 32);
  Field u0(g, 0.0);
  for (std::array<double, 2> c : {std::array{15.0, 20.0}, std::array{40.0, 35.0}, std::array{25.0, 45.0}}) {
    const Field b = gaussian_bump(g, c, 3.0, 0.9);
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = std::min(1.0, u0[i] + b[i]);
  }
  std::vector<double> idx;
  for (double h : {0.5, 1.0, 2.0, 4.0}) {
    const ModelParams p = kP.with_h(h);
    StepperConfig sc;
    sc.dt = max_stable_dt(p, 1.0);
    sc.mode = HeatMode::Kernel;
    sc.keep_snapshots = false;
    const Field u = simulate({u0, Field(g)}, 1.0, p, sc).back().u;
    const double mean = mean_value(u);
    double var = 0.0;
    for (double x : u.values()) var += (x - mean) * (x - mean);
    idx.push_back(var / static_cast<double>(u.size()) / mean);
    o.detail << "h=" << h << ": " << fmt(idx.back()) << "  ";
  }
  const auto [lo, hi] = std::minmax_element(idx.begin(), idx.end());
  o.require(*hi - *lo > 1e-3, "index varies with h");
  o.detail << "(nonuniformity index at T=1)";
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) {
      quick = true;
    } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--quick] [--only N]\n";
      return 2;
    }
  }
  struct Criterion {
    int id;
    const char* name;
    bool gating;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "root structure", true, roots},
      {2, "semigroup estimates", true, semigroup},
      {3, "Picard scheme", true, picard},
      {4, "oracle equivalence", true, oracle_equivalence},
      {5, "invariant regions", true, [&](Outcome& o) { invariance(o, quick ? 10 : 50); }},
      {6, "trap times", true, trap_times},
      {7, "steady states and instability", true, steady_and_instability},
      {8, "determinism", true, determinism},
      {9, "qualitative sweep (reported only)", false, qualitative},
  };
  bool all = true;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.gating) all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << " -- " << o.detail.str() << " ("
              << fmt(secs) << " s)" << std::endl;
  }
  std::cout << (all ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << std::endl;
  return all ? 0 : 1;
}
