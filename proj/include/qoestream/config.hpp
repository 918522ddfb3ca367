#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

#include "qoestream/engine.hpp"

namespace qoe {

/// Applies the keys present in `doc` on top of `base`. Unknown keys and
/// ill-typed values throw std::invalid_argument naming the offending key.
/// Relative trace paths resolve against `base_dir`. The result is not
/// validated; call ScenarioConfig::validate().
ScenarioConfig apply_scenario_json(const nlohmann::json& doc, ScenarioConfig base = {},
                                   const std::filesystem::path& base_dir = {});

/// Full description of `config`; apply_scenario_json inverts it (trace
/// sources are written by path and reloaded from disk).
nlohmann::json scenario_to_json(const ScenarioConfig& config);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace qoe
