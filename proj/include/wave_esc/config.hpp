#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wave_esc/simulation.hpp"

namespace wave_esc {

/// Parses `section.key = value` lines; `#` starts a comment. Unset keys keep
/// their defaults. Unknown keys, malformed values and invariant violations
/// throw ConfigError carrying the offending line number.
SimConfig parse_config(std::string_view text);

/// Reads and parses a file; an unreadable file is a ConfigError.
SimConfig load_config(const std::filesystem::path& path);

/// Sets one key from its textual value. Does not run cross-key validation.
void apply_setting(SimConfig& config, std::string_view key,
                   std::string_view value, int line = 0);

/// All accepted keys in canonical order.
const std::vector<std::string>& config_keys();

/// Canonical text with every key, round-trippable through parse_config.
std::string format_config(const SimConfig& config);

/// FNV-1a of format_config.
std::uint64_t config_hash(const SimConfig& config);

}  // namespace wave_esc
