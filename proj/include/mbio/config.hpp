/**
 * @file config.hpp
 * @brief Run configuration: every tunable keyed as `module.name`, read from a
 *        flat `module.key = value` text file.
 */
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mbio/recognizer.hpp"

namespace mbio {

struct RunConfig {
    PipelineConfig pipeline;
    std::filesystem::path dataset_root;
    /// Derive min-max bounds from enrollment-set comparisons before evaluating.
    bool calibrate = false;
};

/// Applies one setting; throws Config for unknown keys or bad values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Parses `module.key = value` lines; '#' starts a comment.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Every accepted key, in a stable order.
std::vector<std::string> config_keys();

/// Current values as `key = value` lines (parseable by parse_config).
std::string dump_config(const RunConfig& config);

Backend parse_backend(std::string_view name);
std::string_view backend_name(Backend backend);

}  // namespace mbio
