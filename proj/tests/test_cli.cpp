#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bz/cli.hpp"
#include "bz/config.hpp"
#include "bz/error.hpp"
#include "bz/semigroup.hpp"

using namespace bz;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("bzwell-test-" + tag + "-" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("config merging and validation") {
  const auto cfg = make_config(Json::parse(R"({"params": {"h": 2.0}, "grid": {"points": 64}})"));
  CHECK(cfg.params.h() == 2.0);
  CHECK(cfg.params.epsilon() == 0.032);
  CHECK(cfg.grid.points() == 64);
  CHECK(cfg.raw.at("solver").at("scheme") == "imex-strang");
  CHECK_THROWS_AS(make_config(Json::parse(R"({"grid": {"pionts": 64}})")), ConfigError);
  CHECK_THROWS_AS(make_config(Json::parse(R"({"params": {"h": -1.0}})")), ConfigError);
  CHECK_THROWS_AS(make_config(Json::parse(R"({"grid": {"points": "many"}})")), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/bzwell.json"), ConfigError);
  const GridSpec g(1, 10.0, 8);
  CHECK(max_value(field_from_json(Json::parse(R"({"kind": "constant", "value": 0.25})"), g, 1)) == 0.25);
  CHECK_THROWS_AS(field_from_json(Json::parse(R"({"kind": "spiral"})"), g, 1), ConfigError);
}

TEST_CASE("cli usage errors") {
  TempDir dir("usage");
  auto r = run({"analyze", "--config", (dir.path / "missing.json").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("missing.json") != std::string::npos);
  CHECK(run({"analyze"}).code == 2);
  CHECK(run({"frobnicate", "--config", "x.json"}).code == 2);
  const auto cfg = write_config(dir.path, R"({"unknown": 1})");
  CHECK(run({"analyze", "--config", cfg.string()}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("cli analyze reports roots") {
  TempDir dir("analyze");
  const auto cfg = write_config(dir.path, "{}");
  const auto out = dir.path / "out";
  const auto r = run({"analyze", "--config", cfg.string(), "--output", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("u_bar    = 0.99999360") != std::string::npos);
  CHECK(r.out.find("u_tilde  = 0.96801") != std::string::npos);
  const Json rep = Json::parse(slurp(out / "analysis.json"));
  CHECK(rep["roots"]["u_bar"].get<double>() == doctest::Approx(0.9999936).epsilon(1e-7));
  CHECK(rep["solver_bounds"]["T0"].get<double>() == doctest::Approx(2.5e-5));
  const Json man = Json::parse(slurp(out / "manifest.json"));
  CHECK(man["command"] == "analyze");
  CHECK(man["config"]["params"]["h"] == 1.0);
  CHECK(run({"analyze", "--config", cfg.string(), "--output", out.string(), "--quiet"}).out.empty());
}

TEST_CASE("cli verify detects an injected fault") {
  TempDir dir("verify");
  const std::string base = R"("verify": {"semigroup": {"trials": 5, "points": 64, "extent": 50.0},
                                         "invariance": {"samples": 2, "T": 0.5, "points": 32, "extent": 50.0},
                                         "instability": {"T": 0.2, "points": 16}})";
  const auto good = write_config(dir.path, "{" + base + "}");
  CHECK(run({"verify", "--config", good.string(), "--output", (dir.path / "a").string(), "-q"}).code == 0);
  const Json rep = Json::parse(slurp(dir.path / "a" / "verdicts.json"));
  CHECK(rep["verdict"] == "pass");
  const auto bad = write_config(dir.path, "{" + base + R"(, "fault_injection": {"heat_multiplier_skew": 0.01}})");
  CHECK(run({"verify", "--config", bad.string(), "--output", (dir.path / "b").string(), "-q"}).code == 1);
  CHECK(testing::heat_multiplier_skew() == 0.0);
}

TEST_CASE("cli simulate, trap-time and sweep are deterministic") {
  TempDir dir("determinism");
  const auto cfg = write_config(dir.path, R"({
    "grid": {"dim": 2, "extent": 20.0, "points": 16},
    "simulate": {"T": 0.02, "initial": {"u": {"kind": "uniform_random", "lo": 0.0, "hi": 1.0},
                                         "v": {"kind": "band_limited", "max_mode": 3, "lo": 0.0, "hi": 0.5}}},
    "solver": {"snapshot_stride": 50},
    "trap_time": {"m_values": [1.0, 2.0], "entry_check": {"enabled": true, "points": 8}},
    "sweep": {"h_values": [0.5, 2.0], "T": 0.05, "points": 16, "threads": 2}})");
  for (const std::string cmd : {"simulate", "trap-time", "sweep"}) {
    const auto a = dir.path / (cmd + "a"), b = dir.path / (cmd + "b");
    REQUIRE(run({cmd, "--config", cfg.string(), "--output", a.string(), "-q"}).code == 0);
    REQUIRE(run({cmd, "--config", cfg.string(), "--output", b.string(), "-q", "--seed", "1"}).code == 0);
    for (const auto& e : fs::recursive_directory_iterator(a)) {
      if (!e.is_regular_file() || e.path().extension() == ".json") continue;
      CHECK(slurp(e.path()) == slurp(b / fs::relative(e.path(), a)));
    }
  }
  CHECK(fs::exists(dir.path / "simulatea" / "frames" / "u_000000.pgm"));
  CHECK(fs::exists(dir.path / "sweepa" / "run_h0.5" / "final_u.pgm"));
  const std::string trap = slurp(dir.path / "trap-timea" / "trap_times.csv");
  CHECK(trap.find("entry_ok") != std::string::npos);
  CHECK(trap.find("false") == std::string::npos);

  const auto c = dir.path / "simulatec";
  REQUIRE(run({"simulate", "--config", cfg.string(), "--output", c.string(), "-q", "--seed", "2"}).code == 0);
  CHECK(slurp(c / "final_u.csv") != slurp(dir.path / "simulatea" / "final_u.csv"));
}
