#include "bz/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <thread>

#include "bz/comparison.hpp"
#include "bz/config.hpp"
#include "bz/error.hpp"
#include "bz/mild.hpp"
#include "bz/monitor.hpp"
#include "bz/stepper.hpp"

namespace bz {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

class Log {
 public:
  Log(std::ostream& os, bool quiet) : os_(os), quiet_(quiet) {}
  template <class... A>
  void line(const A&... parts) {
    if (quiet_) return;
    (os_ << ... << parts) << '\n';
  }

 private:
  std::ostream& os_;
  bool quiet_;
};

void write_json(const fs::path& path, const Json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& path, const std::string& header) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << header << '\n';
  return os;
}

std::string frame_name(const char* var, std::size_t index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06zu.%s", var, index, ext);
  return buf;
}

void prepare_output(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir.string() + "'");
}

ChainMargins margins_from(const Json& j) {
  ChainMargins m;
  m.q2 = j.at("q2").get<double>();
  m.q3 = j.at("q3").get<double>();
  m.u = j.at("u").get<double>();
  return m;
}

Json chain_json(const TrapChainResult& r) {
  return Json{{"c_star", r.c_star}, {"m", r.m},       {"q1", r.q1},         {"q2", r.q2},
              {"q3", r.q3},         {"kappa_star", r.kappa_star}, {"u_star", r.u_star},
              {"mu_target", r.mu_target}, {"T1", r.T1}, {"T2", r.T2}, {"T3", r.T3}, {"T4", r.T4},
              {"T_sharp", r.T_sharp}};
}

Json box_json(const RegionBox& b) {
  auto edge = [](double x) { return std::isfinite(x) ? Json(x) : Json("inf"); };
  return Json{{"name", b.name}, {"lo_u", b.lo_u}, {"hi_u", edge(b.hi_u)}, {"lo_v", b.lo_v}, {"hi_v", edge(b.hi_v)}};
}

Json region_report_json(const RegionReport& r) {
  return Json{{"region", box_json(r.region)},
              {"tol", r.tol},
              {"snapshot_stride", r.snapshot_stride},
              {"snapshots_checked", r.snapshots_checked},
              {"worst_overshoot", r.worst_overshoot},
              {"violation_count", r.violation_count},
              {"verdict", r.pass ? "pass" : "fail"}};
}

StepperConfig stepper_from(const ExperimentConfig& cfg, double m_box) {
  const Json& sj = cfg.raw.at("solver");
  StepperConfig sc;
  sc.scheme = stepper_scheme_from_string(sj.at("scheme").get<std::string>());
  sc.mode = heat_mode_from_string(sj.at("mode").get<std::string>());
  sc.snapshot_stride = sj.at("snapshot_stride").get<std::size_t>();
  const double dt = sj.at("dt").get<double>();
  sc.dt = dt > 0.0 ? dt : max_stable_dt(cfg.params, m_box);
  return sc;
}

PicardConfig picard_from(const ExperimentConfig& cfg) {
  const Json& pj = cfg.raw.at("solver").at("picard");
  PicardConfig pc;
  pc.samples = pj.at("samples").get<std::size_t>();
  pc.quad_substeps = pj.at("quad_substeps").get<std::size_t>();
  pc.tol = pj.at("tol").get<double>();
  pc.max_iter = pj.at("max_iter").get<int>();
  pc.mode = heat_mode_from_string(cfg.raw.at("solver").at("mode").get<std::string>());
  return pc;
}

/// Runs f(i) for i in [0, n) on up to `threads` workers; exceptions are
/// rethrown in index order after all workers finish.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F f) {
  const unsigned hw = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<unsigned>(std::min<std::size_t>(hw, n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  if (n > 0) work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// --- analyze ----------------------------------------------------------------

int cmd_analyze(const ExperimentConfig& cfg, Log& log) {
  const ModelParams& p = cfg.params;
  const Json& aj = cfg.raw.at("analyze");
  const KineticRoots roots = kinetic_roots(p);
  const SteadyStates ss = steady_states(p);
  const double m = aj.at("m").get<double>();
  const double c_star = aj.at("c_star_fraction").get<double>() * p.q();
  const ChainMargins margins = margins_from(aj.at("margins"));
  const TrapChainResult chain = trap_chain(c_star, m, p, margins);
  const double q_nat = aj.at("q_nat").is_null() ? p.q() : aj.at("q_nat").get<double>();
  const double u_nat = aj.at("u_nat").is_null() ? roots.u_bar : aj.at("u_nat").get<double>();
  const NaturalRegion nat = natural_region(m, p, q_nat, u_nat, c_star, margins);
  const SolverBounds sb = solver_bounds(constant_field(cfg.grid, m), constant_field(cfg.grid, m), p);

  Json rep;
  rep["params"] = {{"preset", cfg.preset}, {"epsilon", p.epsilon()}, {"h", p.h()}, {"q", p.q()}, {"d", p.d()}};
  rep["roots"] = {{"u_bar", roots.u_bar},
                  {"u_tilde", roots.u_tilde},
                  {"u_tilde_closed_form", u_tilde_closed_form(p)},
                  {"residual_g", roots.residual_g},
                  {"residual_g_tilde", roots.residual_g_tilde},
                  {"g_root_count", roots.g_root_count}};
  rep["steady_states"] = {{"trivial", {0.0, 0.0}}, {"nontrivial", {ss.nontrivial.u, ss.nontrivial.v}}};
  rep["thresholds"] = {{"m", m}, {"q1", chain.q1}, {"kappa_star", chain.kappa_star}, {"kappa_bar", nat.kappa_bar}};
  rep["trap_chain"] = chain_json(chain);
  rep["regions"] = {{"S", box_json(region_S(p))},
                    {"S_nat", box_json(natural_box(q_nat, u_nat))},
                    {"S_nat_entry_time", nat.T_nat},
                    {"S_nat_chain", chain_json(nat.chain)}};
  rep["solver_bounds"] = {{"m", sb.m}, {"a", sb.a}, {"b", sb.b}, {"T0", sb.T0}, {"max_stable_dt", max_stable_dt(p, m)}};
  write_json(cfg.output_dir / "analysis.json", rep);

  log.line("u_bar    = ", format_double(roots.u_bar));
  log.line("u_tilde  = ", format_double(roots.u_tilde));
  log.line("q1       = ", format_double(chain.q1), "  (m = ", format_double(m), ")");
  log.line("kappa*   = ", format_double(chain.kappa_star));
  log.line("kappa_bar= ", format_double(nat.kappa_bar));
  log.line("T_sharp  = ", format_double(chain.T_sharp));
  log.line("T0       = ", format_double(sb.T0), "  a = ", format_double(sb.a), "  b = ", format_double(sb.b));
  return kExitOk;
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(const ExperimentConfig& cfg, Log& log) {
  const ModelParams& p = cfg.params;
  const Json& sj = cfg.raw.at("simulate");
  const Field u0 = field_from_json(sj.at("initial").at("u"), cfg.grid, sample_seed(cfg.seed, 0));
  const Field v0 = field_from_json(sj.at("initial").at("v"), cfg.grid, sample_seed(cfg.seed, 1));
  const double T = sj.at("T").get<double>();
  const std::string kind = cfg.raw.at("solver").at("kind").get<std::string>();
  const double m = std::max(sup_norm(u0), sup_norm(v0));

  std::optional<Trajectory> traj;
  Json solver;
  if (kind == "imex") {
    const StepperConfig sc = stepper_from(cfg, m);
    traj = simulate({u0, v0, 0.0}, T, p, sc);
    solver = {{"kind", kind}, {"scheme", to_string(sc.scheme)}, {"dt", sc.dt}, {"mode", to_string(sc.mode)}};
  } else if (kind == "mild") {
    const PicardConfig pc = picard_from(cfg);
    traj = picard_extend(u0, v0, p, T, pc);
    solver = {{"kind", kind}, {"samples", pc.samples}, {"quad_substeps", pc.quad_substeps}, {"mode", to_string(pc.mode)}};
  } else {
    throw ConfigError("solver.kind must be 'imex' or 'mild'");
  }

  write_envelope_csv(cfg.output_dir / "envelope.csv", *traj);
  write_field_csv(cfg.output_dir / "final_u.csv", traj->back().u);
  write_field_csv(cfg.output_dir / "final_v.csv", traj->back().v);
  if (sj.at("frames").get<bool>()) {
    const fs::path frames = cfg.output_dir / "frames";
    fs::create_directories(frames);
    for (std::size_t k = 0; k < traj->size(); ++k) {
      const StatePair& s = (*traj)[k];
      if (cfg.grid.dim() == 2) {
        write_field_pgm(frames / frame_name("u", k, "pgm"), s.u);
        write_field_pgm(frames / frame_name("v", k, "pgm"), s.v);
      } else {
        write_field_csv(frames / frame_name("u", k, "csv"), s.u);
        write_field_csv(frames / frame_name("v", k, "csv"), s.v);
      }
    }
    std::ofstream times = open_csv(frames / "times.csv", "frame,t");
    for (std::size_t k = 0; k < traj->size(); ++k) times << k << ',' << format_double((*traj)[k].time) << '\n';
  }

  Json rep;
  rep["solver"] = solver;
  rep["T"] = T;
  rep["snapshots"] = traj->size();
  rep["m"] = m;
  rep["regions"] = Json::array({region_report_json(check_box(*traj, nonneg_quadrant(), 0.0)),
                                region_report_json(check_box(*traj, square_box(std::max(1.0, m)), 0.0)),
                                region_report_json(check_box(*traj, region_S(p), 0.0))});
  write_json(cfg.output_dir / "report.json", rep);
  log.line("simulated to t = ", format_double(traj->end_time()), " with ", traj->size(), " snapshots");
  log.line("final u in [", format_double(min_value(traj->back().u)), ", ", format_double(max_value(traj->back().u)),
           "]");
  return kExitOk;
}

// --- verify -----------------------------------------------------------------

struct Verdict {
  std::string name;
  bool pass;
};

int cmd_verify(const ExperimentConfig& cfg, Log& log) {
  const ModelParams& p = cfg.params;
  const Json& vj = cfg.raw.at("verify");
  std::vector<Verdict> verdicts;
  Json rep;

  const Json& sg = vj.at("semigroup");
  if (sg.at("enabled").get<bool>()) {
    const GridSpec g(1, sg.at("extent").get<double>(), sg.at("points").get<std::size_t>());
    const SemigroupReport r = semigroup_suite(g, sg.at("trials").get<std::size_t>(), cfg.seed, p);
    Json checks = Json::array();
    for (const auto& c : r.checks) {
      checks.push_back({{"name", c.name}, {"worst_excess", c.worst_excess}, {"trials", c.trials},
                        {"gating", c.gating}, {"verdict", c.pass ? "pass" : "fail"}});
      if (c.gating) verdicts.push_back({"semigroup: " + c.name, c.pass});
    }
    rep["semigroup"] = {{"checks", checks}, {"smoothing_constant", r.smoothing_constant}};
  }

  const Json& inv = vj.at("invariance");
  if (inv.at("enabled").get<bool>()) {
    InvarianceConfig ic;
    ic.samples = inv.at("samples").get<std::size_t>();
    ic.T = inv.at("T").get<double>();
    ic.grid = GridSpec(1, inv.at("extent").get<double>(), inv.at("points").get<std::size_t>());
    ic.max_mode = inv.at("max_mode").get<int>();
    ic.tol = inv.at("tol").get<double>();
    ic.check_stride = inv.at("check_stride").get<std::size_t>();
    ic.threads = inv.at("threads").get<unsigned>();
    ic.mode = heat_mode_from_string(cfg.raw.at("solver").at("mode").get<std::string>());
    ic.scheme = stepper_scheme_from_string(cfg.raw.at("solver").at("scheme").get<std::string>());
    ic.seed = cfg.seed;
    Json regions = Json::array();
    for (const auto& name : inv.at("regions").get<std::vector<std::string>>()) {
      RegionBox box;
      if (name == "S") {
        box = region_S(p);
      } else if (name == "box") {
        box = square_box(inv.at("box_m").get<double>());
      } else if (name == "quadrant") {
        box = nonneg_quadrant();
      } else if (name == "natural") {
        const Json& aj = cfg.raw.at("analyze");
        const double q_nat = aj.at("q_nat").is_null() ? p.q() : aj.at("q_nat").get<double>();
        const double u_nat = aj.at("u_nat").is_null() ? find_u_bar(p) : aj.at("u_nat").get<double>();
        box = natural_box(q_nat, u_nat);
      } else {
        throw ConfigError("unknown invariance region '" + name + "' (expected S, box, quadrant or natural)");
      }
      const InvarianceReport r = invariance_experiment(p, box, ic);
      Json samples = Json::array();
      for (const auto& s : r.samples) {
        samples.push_back({{"index", s.index}, {"seed", s.seed}, {"worst_overshoot", s.worst_overshoot},
                           {"violations", s.violation_count}, {"min_u", s.extremes.min_u},
                           {"max_u", s.extremes.max_u}, {"min_v", s.extremes.min_v}, {"max_v", s.extremes.max_v},
                           {"verdict", s.pass ? "pass" : "fail"}});
      }
      regions.push_back({{"region", box_json(box)}, {"dt", r.dt}, {"tol", ic.tol}, {"check_stride", ic.check_stride},
                         {"mode", to_string(ic.mode)}, {"worst_overshoot", r.worst_overshoot},
                         {"samples", samples}, {"verdict", r.pass ? "pass" : "fail"}});
      verdicts.push_back({"invariance: " + box.name, r.pass});
    }
    rep["invariance"] = regions;
  }

  const Json& ins = vj.at("instability");
  if (ins.at("enabled").get<bool>()) {
    const GridSpec g(1, ins.at("extent").get<double>(), ins.at("points").get<std::size_t>());
    StepperConfig sc;
    sc.dt = ins.at("dt").get<double>();
    sc.mode = HeatMode::Kernel;
    sc.snapshot_stride = 100;
    Json probes = Json::array();
    for (ProbeShape shape : {ProbeShape::Uniform, ProbeShape::Bump}) {
      const InstabilityReport r =
          instability_probe(p, ins.at("amplitude").get<double>(), ins.at("T").get<double>(), shape, g, sc);
      const char* name = shape == ProbeShape::Uniform ? "uniform" : "bump";
      const bool ok = r.grew && r.strictly_positive;
      probes.push_back({{"shape", name}, {"amplitude", r.amplitude}, {"T", r.T}, {"final_max", r.final_max},
                        {"final_min", r.final_min}, {"growth", r.growth}, {"strict_floor", kStrictFloor},
                        {"min_u_after_start", r.min_positive_time_value}, {"ball_minima", r.ball_minima},
                        {"verdict", ok ? "pass" : "fail"}});
      verdicts.push_back({std::string("instability: ") + name, ok});
    }
    rep["instability"] = probes;
  }

  bool all = true;
  Json list = Json::array();
  for (const auto& v : verdicts) {
    all = all && v.pass;
    list.push_back({{"name", v.name}, {"verdict", v.pass ? "pass" : "fail"}});
    log.line(v.pass ? "PASS  " : "FAIL  ", v.name);
  }
  rep["verdicts"] = list;
  rep["verdict"] = all ? "pass" : "fail";
  write_json(cfg.output_dir / "verdicts.json", rep);
  log.line(all ? "verification passed" : "verification FAILED");
  return all ? kExitOk : kExitVerificationFailed;
}

// --- trap-time --------------------------------------------------------------

int cmd_trap_time(const ExperimentConfig& cfg, Log& log) {
  const Json& tj = cfg.raw.at("trap_time");
  const ChainMargins margins = margins_from(tj.at("margins"));
  const Json& ej = tj.at("entry_check");
  const bool entry = ej.at("enabled").get<bool>();
  std::string header = "h,m,c_star,q1,q2,q3,kappa_star,u_star,T1,T2,T3,T4,T_sharp";
  if (entry) header += ",entry_time,entry_ok";
  std::ofstream csv = open_csv(cfg.output_dir / "trap_times.csv", header);
  bool all = true;
  for (double h : tj.at("h_values").get<std::vector<double>>()) {
    const ModelParams p = cfg.params.with_h(h);
    for (double m : tj.at("m_values").get<std::vector<double>>()) {
      for (double frac : tj.at("c_star_fractions").get<std::vector<double>>()) {
        const TrapChainResult r = trap_chain(frac * p.q(), m, p, margins);
        csv << format_double(h) << ',' << format_double(m) << ',' << format_double(r.c_star) << ','
            << format_double(r.q1) << ',' << format_double(r.q2) << ',' << format_double(r.q3) << ','
            << format_double(r.kappa_star) << ',' << format_double(r.u_star) << ',' << format_double(r.T1) << ','
            << format_double(r.T2) << ',' << format_double(r.T3) << ',' << format_double(r.T4) << ','
            << format_double(r.T_sharp);
        if (entry) {
          const GridSpec g(1, ej.at("extent").get<double>(), ej.at("points").get<std::size_t>());
          StepperConfig sc;
          sc.dt = max_stable_dt(p, m);
          sc.mode = HeatMode::Kernel;
          sc.snapshot_stride = 100;
          const Trajectory traj = simulate({constant_field(g, m), constant_field(g, r.c_star), 0.0},
                                           r.T_sharp + ej.at("extra_time").get<double>(), p, sc);
          const double tol = ej.at("entry_tol").get<double>() + static_cast<double>(sc.snapshot_stride) * sc.dt;
          const EntryResult e = entry_check(traj, r, p, tol);
          csv << ',' << (e.entry_time ? format_double(*e.entry_time) : std::string("none")) << ','
              << (e.satisfied ? "true" : "false");
          all = all && e.satisfied;
        }
        csv << '\n';
        log.line("h = ", format_double(h), "  m = ", format_double(m), "  c* = ", format_double(r.c_star),
                 "  T_sharp = ", format_double(r.T_sharp));
      }
    }
  }
  return all ? kExitOk : kExitVerificationFailed;
}

// --- sweep ------------------------------------------------------------------

struct SweepRow {
  double h = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double index = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
};

int cmd_sweep(const ExperimentConfig& cfg, Log& log) {
  const Json& wj = cfg.raw.at("sweep");
  const auto hs = wj.at("h_values").get<std::vector<double>>();
  const double T = wj.at("T").get<double>();
  const GridSpec g(2, wj.at("extent").get<double>(), wj.at("points").get<std::size_t>());
  const auto bumps = wj.at("bumps").get<int>();
  const double width = wj.at("bump_width").get<double>();
  const double amp = wj.at("amplitude").get<double>();

  Field u0(g, 0.0);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> pos(0.0, g.extent());
  for (int b = 0; b < bumps; ++b) {
    const Field bump = gaussian_bump(g, {pos(rng), pos(rng)}, width, amp);
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = std::min(1.0, u0[i] + bump[i]);
  }

  std::vector<SweepRow> rows(hs.size());
  parallel_for(hs.size(), wj.at("threads").get<unsigned>(), [&](std::size_t k) {
    const ModelParams p = cfg.params.with_h(hs[k]);
    StepperConfig sc = stepper_from(cfg, 1.0);
    if (cfg.raw.at("solver").at("dt").get<double>() <= 0.0) sc.dt = max_stable_dt(p, 1.0);
    const Trajectory traj = simulate({u0, Field(g), 0.0}, T, p, sc);
    const fs::path dir = cfg.output_dir / ("run_h" + format_double(hs[k]));
    fs::create_directories(dir);
    write_envelope_csv(dir / "envelope.csv", traj);
    write_field_pgm(dir / "final_u.pgm", traj.back().u);
    write_field_pgm(dir / "final_v.pgm", traj.back().v);
    const Field& u = traj.back().u;
    SweepRow& r = rows[k];
    r.h = hs[k];
    r.mean = mean_value(u);
    double var = 0.0;
    for (double x : u.values()) var += (x - r.mean) * (x - r.mean);
    r.variance = var / static_cast<double>(u.size());
    r.index = r.mean > 0.0 ? r.variance / r.mean : 0.0;
    r.min_u = min_value(u);
    r.max_u = max_value(u);
  });

  std::ofstream csv = open_csv(cfg.output_dir / "sweep.csv", "h,T,mean_u,var_u,nonuniformity_index,min_u,max_u");
  for (const auto& r : rows) {
    csv << format_double(r.h) << ',' << format_double(T) << ',' << format_double(r.mean) << ','
        << format_double(r.variance) << ',' << format_double(r.index) << ',' << format_double(r.min_u) << ','
        << format_double(r.max_u) << '\n';
    log.line("h = ", format_double(r.h), "  nonuniformity index = ", format_double(r.index));
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Well-posedness toolkit for a two-variable BZ reaction-diffusion model", "bzwell"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("-c,--config", opt.config, "JSON configuration file")->required();
  app.add_option("-o,--output", opt.output, "output directory (overrides output_dir)");
  app.add_option("--seed", opt.seed, "random seed (overrides seed)");
  app.add_flag("-q,--quiet", opt.quiet, "suppress progress output");
  app.fallthrough();
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"analyze", "roots, thresholds, regions and solver constants"},
      {"simulate", "run one solver and write frames and envelopes"},
      {"verify", "semigroup estimates, invariant regions, instability of the trivial state"},
      {"trap-time", "comparison-chain thresholds and trap times over a parameter grid"},
      {"sweep", "2-D runs over excitability values with a nonuniformity index"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "bzwell: " << e.what() << '\n' << "run 'bzwell --help' for usage\n";
    return kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  std::optional<ExperimentConfig> loaded;
  try {
    Json raw = load_config(opt.config).raw;
    if (opt.output) raw["output_dir"] = *opt.output;
    if (opt.seed) raw["seed"] = *opt.seed;
    loaded = make_config(raw);
    prepare_output(loaded->output_dir);
  } catch (const ConfigError& e) {
    err << "bzwell: " << e.what() << '\n';
    return kExitUsage;
  }
  const ExperimentConfig& cfg = *loaded;

  Log log(out, opt.quiet);
  const double skew = cfg.raw.at("fault_injection").at("heat_multiplier_skew").get<double>();
  testing::set_heat_multiplier_skew(skew);
  struct ResetSkew {
    ~ResetSkew() { testing::set_heat_multiplier_skew(0.0); }
  } reset;
  try {
    write_json(cfg.output_dir / "manifest.json", manifest(cfg, command));
    if (command == "analyze") return cmd_analyze(cfg, log);
    if (command == "simulate") return cmd_simulate(cfg, log);
    if (command == "verify") {
      try {
        return cmd_verify(cfg, log);
      } catch (const Error& e) {
        // a broken propagator may trip the solvers' own guards before a verdict is reached
        err << "bzwell: verification aborted: " << e.what() << '\n';
        return kExitVerificationFailed;
      }
    }
    if (command == "trap-time") return cmd_trap_time(cfg, log);
    return cmd_sweep(cfg, log);
  } catch (const ConfigError& e) {
    err << "bzwell: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "bzwell: configuration: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "bzwell: " << e.what() << '\n';
    return kExitVerificationFailed;
  }
}

}  // namespace bz
