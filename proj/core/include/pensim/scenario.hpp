#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pensim/simulate.hpp"

namespace pensim {

// A scenario file is a flat JSON object. Every calibration parameter has a
// named key with the built-in default; unknown keys are rejected and missing
// keys are filled from the defaults with a notice.
struct Scenario {
  PlanConfig config;
  SimulationSpec sim;
  std::string out_dir = "out";
};

Scenario default_scenario();

struct ScenarioLoad {
  Scenario scenario;
  std::vector<std::string> notices;  // one per defaulted key
};

ScenarioLoad parse_scenario(const std::string& json_text);
ScenarioLoad load_scenario_file(const std::string& path);

// Serializes the fully resolved scenario; parse(emit(s)) is the identity.
std::string emit_scenario(const Scenario& scenario);

// Validates plan constraints and simulation settings, reporting every
// violation at once.
void validate_scenario(const Scenario& scenario);

struct ManifestEntry {
  std::string path;
  std::string hash;  // fnv1a64 of the file content
};

struct RunManifest {
  std::string tool_version;
  std::string command;
  std::uint64_t seed = 0;
  std::string created_utc;
  std::string scenario;  // resolved scenario JSON
  std::vector<ManifestEntry> artifacts;
};

std::string to_json(const RunManifest& manifest);

}  // namespace pensim
