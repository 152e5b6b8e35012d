/*
 * Copyright (c) 2026, The bwma-sim Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bwma/encoder.hpp"

namespace bwma {

enum class OutputFormat : std::uint8_t { Json, Csv, Table };

std::string_view to_string(OutputFormat f);

/// Everything a run/compare/sweep invocation needs.
struct ExperimentConfig {
    RunConfig run;
    bool toy = false;
    OutputFormat format = OutputFormat::Json;
    std::string out;  // empty: stdout
};

/// Ordered key/value pairs as they appear in a file or on the command line.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Every recognized key. Command-line flags are the same names with "--".
std::span<const std::string_view> config_keys();

/// Parses "key = value" lines. Blank lines and lines starting with '#' are
/// ignored, as is anything after a '#' that follows whitespace. Unknown keys
/// and malformed lines throw ConfigError naming the line.
KeyValues parse_config_text(std::string_view text);
KeyValues load_config_file(const std::filesystem::path& path);

/// Applies one setting. Throws ConfigError on an unknown key or bad value.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Builds the configuration with precedence
///   built-in defaults < toy preset < config file < command-line flags.
/// The toy preset is enabled by "toy = true" in either source. head-dim is
/// derived as model-dim / heads unless given explicitly.
ExperimentConfig resolve_config(const KeyValues& file, const KeyValues& flags);

/// Writes every key with its current value; parse + resolve reproduces cfg.
std::string to_config_text(const ExperimentConfig& cfg);

}  // namespace bwma
