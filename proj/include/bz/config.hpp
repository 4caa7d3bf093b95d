#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "bz/grid.hpp"
#include "bz/model.hpp"

namespace bz {

using Json = nlohmann::ordered_json;

/// Every key the front end understands, with its default value.
const Json& default_config();

/// A validated experiment description.  `raw` is the full configuration
/// (defaults merged with the user file and command-line overrides) and is
/// what gets echoed into run manifests.
struct ExperimentConfig {
  Json raw;
  std::string preset;
  ModelParams params;
  GridSpec grid;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir;
};

/// Merges `user` over the defaults, rejecting keys the defaults do not have,
/// and validates model and grid parameters.  Throws ConfigError.
ExperimentConfig make_config(const Json& user);

/// Reads a JSON file and calls make_config.  A missing or unparsable file
/// raises ConfigError naming the path.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Field described by a JSON object {"kind": constant | uniform_random | bump
/// | mode | band_limited, ...}; random kinds draw from `seed`.
Field field_from_json(const Json& spec, const GridSpec& grid, std::uint64_t seed);

/// Run manifest: tool version, FFTW version, seed, command and the full config.
Json manifest(const ExperimentConfig& cfg, const std::string& command);

}  // namespace bz
