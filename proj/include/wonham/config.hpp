#pragma once

// JSON experiment configuration (schema_version 1).

#include <filesystem>
#include <string>

#include "json.hpp"

#include "wonham/stability.hpp"

namespace wonham {

inline constexpr int kSchemaVersion = 1;

/// Parses and validates a configuration document. Errors are Error(Config)
/// naming the offending field, or the line and column for syntax errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Config echo written into summaries.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace wonham
