#pragma once

// Experiment configuration document: JSON with four optional sections
// (experiment, common, mpc, rql, sql). Every field has a default; the
// resolved configuration is echoed back so a run can be reproduced from its
// own output.

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "rlmpc/harness.hpp"

namespace rlmpc {

/// Parses and validates a configuration document. Unknown keys and bad
/// values throw InvalidConfig naming the key.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Reads, parses, and validates a config file. Missing/unreadable file
/// throws IoError; syntax errors throw InvalidConfig with the parser's
/// line/column diagnostic.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies a `section.key=value` override to a raw config document before
/// parsing. The value is interpreted as JSON when possible, else as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Fully-resolved configuration, reparseable by parse_config into an
/// identical ExperimentConfig.
nlohmann::json effective_config(const ExperimentConfig& cfg);

/// FNV-1a hash of the canonical effective-config text.
std::uint64_t config_hash(const nlohmann::json& effective);

}  // namespace rlmpc
