#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "dyner/experiments.hpp"

namespace dyner {

/// A campaign plus where and how to write it.
struct RunConfig {
  CampaignSpec spec;
  std::string output_dir = "out";
  bool emit_plots = false;

  bool operator==(const RunConfig&) const = default;
};

/// Parses the JSON schema documented in README.md. Every field is validated
/// (EdgeParams and CampaignSpec invariants included); unknown keys, wrong
/// types and out-of-domain values raise ConfigError naming the key.
RunConfig parse_config(const std::string& json_text);

/// Reads and parses a config file; a missing or unreadable file is a ConfigError.
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON echo of a config. parse_config(config_to_json(c)) == c.
/// Without `runtime_fields`, threads and output_dir are left out so the echo
/// depends only on what determines the results.
std::string config_to_json(const RunConfig& config, bool runtime_fields = true);

/// Command-line overrides applied on top of a parsed config.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> output_dir;
  bool plots = false;
};
void apply_overrides(RunConfig& config, const ConfigOverrides& overrides);

}  // namespace dyner
