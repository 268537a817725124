#pragma once

// Run configuration: a JSON document with the sections integrator, pathint,
// lab and output. Missing keys keep their defaults; unknown keys are errors.

#include <optional>
#include <string>

#include "hkpath/exchange.hpp"
#include "hkpath/integrator.hpp"
#include "hkpath/pathint.hpp"

namespace hkpath::config {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kConfigEnv = "HKPATH_CONFIG";

struct RunConfig {
  integrate::IntegratorConfig integrator;
  pathint::PathintConfig pathint;
  exchange::LabConfig lab;
  std::string output_dir = ".";
};

/// Throws ConfigError on malformed JSON, wrong types, unknown keys or values
/// that break the invariants (tolerances positive, radii increasing).
RunConfig parse_config(const std::string& json_text);

RunConfig load_config(const std::string& path);

/// `path` when given, else the file named by HKPATH_CONFIG, else defaults.
RunConfig resolve_config(const std::optional<std::string>& path);

void validate(const RunConfig& cfg);

/// Pretty JSON holding every key, with format_version.
std::string to_json(const RunConfig& cfg);

}  // namespace hkpath::config
