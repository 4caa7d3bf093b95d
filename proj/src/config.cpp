#include "bz/config.hpp"

#include <fftw3.h>

#include <fstream>

#include "bz/error.hpp"

#ifndef BZWELL_VERSION
#define BZWELL_VERSION "unknown"
#endif

namespace bz {

namespace {

const char* const kDefaults = R"({
  "params": {"preset": "standard", "h": 1.0, "epsilon": null, "q": null, "d": null},
  "grid": {"dim": 1, "extent": 100.0, "points": 128},
  "seed": 1,
  "output_dir": "bzwell-out",
  "solver": {
    "kind": "imex",
    "scheme": "imex-strang",
    "dt": 0.0,
    "mode": "kernel",
    "snapshot_stride": 1000,
    "picard": {"samples": 64, "quad_substeps": 4, "tol": 1e-8, "max_iter": 50}
  },
  "analyze": {"m": 1.0, "c_star_fraction": 0.5, "q_nat": null, "u_nat": null,
              "margins": {"q2": 0.5, "q3": 0.5, "u": 0.5}},
  "simulate": {
    "T": 1.0,
    "frames": true,
    "initial": {
      "u": {"kind": "bump", "center": [50.0, 50.0], "width": 5.0, "amplitude": 0.8, "baseline": 0.01},
      "v": {"kind": "constant", "value": 0.01}
    }
  },
  "verify": {
    "semigroup": {"enabled": true, "trials": 100, "points": 256, "extent": 100.0},
    "invariance": {"enabled": true, "regions": ["S", "box"], "box_m": 2.0, "samples": 10, "T": 10.0,
                   "points": 128, "extent": 100.0, "max_mode": 4, "tol": 1e-8, "check_stride": 1,
                   "threads": 0},
    "instability": {"enabled": true, "amplitude": 1e-6, "T": 1.0, "dt": 1e-5, "points": 64, "extent": 20.0}
  },
  "trap_time": {
    "h_values": [1.0],
    "m_values": [1.0, 1.5, 2.0],
    "c_star_fractions": [0.5],
    "margins": {"q2": 0.5, "q3": 0.5, "u": 0.5},
    "entry_check": {"enabled": false, "points": 16, "extent": 100.0, "extra_time": 1.0, "entry_tol": 0.0}
  },
  "sweep": {"h_values": [0.25, 0.5, 1.0, 2.0, 4.0], "T": 2.0, "points": 64, "extent": 60.0, "bumps": 3,
            "bump_width": 3.0, "amplitude": 0.9, "threads": 0},
  "fault_injection": {"heat_multiplier_skew": 0.0}
})";

void check_keys(const Json& user, const Json& defaults, const std::string& where) {
  // field descriptions ({"kind": ...}) are validated by field_from_json
  if (!user.is_object() || !defaults.is_object() || defaults.contains("kind")) return;
  for (const auto& [key, value] : user.items()) {
    if (!defaults.contains(key)) throw ConfigError("unknown configuration key '" + where + key + "'");
    check_keys(value, defaults.at(key), where + key + ".");
  }
}

void merge(Json& base, const Json& over) {
  for (const auto& [key, value] : over.items()) {
    if (value.is_object() && base.contains(key) && base[key].is_object()) {
      merge(base[key], value);
    } else {
      base[key] = value;
    }
  }
}

template <class T>
T get(const Json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("configuration key '" + where + key + "': " + e.what());
  }
}

}  // namespace

const Json& default_config() {
  static const Json d = Json::parse(kDefaults);
  return d;
}

ExperimentConfig make_config(const Json& user) {
  if (!user.is_object()) throw ConfigError("configuration must be a JSON object");
  check_keys(user, default_config(), "");
  Json raw = default_config();
  merge(raw, user);
  try {
    const Json& pj = raw.at("params");
    const std::string preset = get<std::string>(pj, "preset", "params.");
    ModelParams p = ModelParams::preset(preset, get<double>(pj, "h", "params."));
    const double eps = pj.at("epsilon").is_null() ? p.epsilon() : get<double>(pj, "epsilon", "params.");
    const double q = pj.at("q").is_null() ? p.q() : get<double>(pj, "q", "params.");
    const double d = pj.at("d").is_null() ? p.d() : get<double>(pj, "d", "params.");
    const ModelParams params(eps, p.h(), q, d);
    const Json& gj = raw.at("grid");
    const GridSpec grid(get<int>(gj, "dim", "grid."), get<double>(gj, "extent", "grid."),
                        get<std::size_t>(gj, "points", "grid."));
    const auto seed = get<std::uint64_t>(raw, "seed", "");
    const std::filesystem::path out = get<std::string>(raw, "output_dir", "");
    return {raw, preset, params, grid, seed, out};
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read configuration file '" + path.string() + "'");
  Json user;
  try {
    user = Json::parse(is, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cannot parse configuration file '" + path.string() + "': " + e.what());
  }
  return make_config(user);
}

Field field_from_json(const Json& spec, const GridSpec& grid, std::uint64_t seed) {
  try {
    const std::string kind = spec.at("kind").get<std::string>();
    auto num = [&](const char* key, double fallback) { return spec.contains(key) ? spec.at(key).get<double>() : fallback; };
    auto pair = [&](const char* key, std::array<double, 2> fallback) {
      if (!spec.contains(key)) return fallback;
      const auto v = spec.at(key).get<std::vector<double>>();
      if (v.empty() || v.size() > 2) throw ConfigError(std::string("field key '") + key + "' needs 1 or 2 entries");
      return std::array<double, 2>{v[0], v.size() > 1 ? v[1] : 0.0};
    };
    if (kind == "constant") return constant_field(grid, num("value", 0.0));
    if (kind == "uniform_random") return random_uniform_field(grid, num("lo", 0.0), num("hi", 1.0), seed);
    if (kind == "bump") {
      const double c = grid.extent() / 2.0;
      return gaussian_bump(grid, pair("center", {c, c}), num("width", 1.0), num("amplitude", 1.0),
                           num("baseline", 0.0));
    }
    if (kind == "mode") {
      const auto k = pair("k", {1.0, 0.0});
      return single_mode(grid, {static_cast<int>(k[0]), static_cast<int>(k[1])}, num("amplitude", 1.0),
                         num("baseline", 0.0), num("phase", 0.0));
    }
    if (kind == "band_limited") {
      return band_limited_random_field(grid, static_cast<int>(num("max_mode", 4.0)), num("lo", 0.0), num("hi", 1.0),
                                       seed);
    }
    throw ConfigError("unknown field kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid field description: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid field description: ") + e.what());
  }
}

Json manifest(const ExperimentConfig& cfg, const std::string& command) {
  Json m;
  m["tool"] = "bzwell";
  m["version"] = BZWELL_VERSION;
  m["fftw_version"] = std::string(fftw_version);
  m["command"] = command;
  m["seed"] = cfg.seed;
  m["config"] = cfg.raw;
  return m;
}

}  // namespace bz
