#pragma once

#include <string>

#include "ranstack/domain.hpp"

namespace ranstack {

// Scenario file <-> config. Field names are frozen; round-tripping any valid
// config yields a structurally equal config.
ScenarioConfig scenario_from_json_text(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);
std::string scenario_to_json_text(const ScenarioConfig& config, int indent = 2);

// FNV-1a over the canonical serialized form; stamped into every report so
// results can be traced back to the exact configuration.
std::string scenario_hash_hex(const ScenarioConfig& config);

// Embedded model defaults (se curve, link model, timers, header costs) as a
// JSON document for `list-defaults`.
std::string defaults_json_text();

}  // namespace ranstack
