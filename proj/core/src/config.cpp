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
#include "bwma/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "bwma/errors.hpp"

namespace bwma {

namespace {

constexpr std::array<std::string_view, 23> kKeys = {
    "layout",    "accel",      "kernel-size", "cores",      "seq-len",    "model-dim",   "heads",    "head-dim",
    "ff-dim",    "layers",     "l1-kb",       "l2-kb",      "line-bytes", "l1-assoc",    "l2-assoc", "l1-latency",
    "l2-latency", "mem-latency", "prefetch",  "seed",       "toy",        "format",      "out",
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool known_key(std::string_view key) { return std::find(kKeys.begin(), kKeys.end(), key) != kKeys.end(); }

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) + " (expected " +
                      std::string(expected) + ")");
}

std::uint64_t parse_uint(std::string_view key, std::string_view value) {
    std::uint64_t v = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc{} || ptr != end || value.empty()) bad_value(key, value, "a non-negative integer");
    return v;
}

std::uint32_t parse_u32(std::string_view key, std::string_view value) {
    const auto v = parse_uint(key, value);
    if (v > UINT32_MAX) bad_value(key, value, "a 32-bit integer");
    return static_cast<std::uint32_t>(v);
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "off" || value == "0" || value == "no") return false;
    bad_value(key, value, "true|false");
}

void apply_toy(ExperimentConfig& cfg) {
    cfg.toy = true;
    cfg.run.model = ModelConfig::toy();
    cfg.run.accel = AcceleratorModel(cfg.run.accel.kind(), 8);
}

}  // namespace

std::string_view to_string(OutputFormat f) {
    switch (f) {
        case OutputFormat::Json: return "json";
        case OutputFormat::Csv: return "csv";
        case OutputFormat::Table: return "table";
    }
    return "?";
}

std::span<const std::string_view> config_keys() { return kKeys; }

KeyValues parse_config_text(std::string_view text) {
    KeyValues out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            if (hash == 0 || line[hash - 1] == ' ' || line[hash - 1] == '\t') line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (!known_key(key)) {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
        out.emplace_back(std::string(key), std::string(value));
    }
    return out;
}

KeyValues load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    RunConfig& r = cfg.run;
    ModelConfig& m = r.model;
    HierarchyConfig& h = r.hierarchy;
    if (key == "layout") {
        if (value == "rwma") r.layout = LayoutKind::RowWise;
        else if (value == "bwma") r.layout = LayoutKind::BlockWise;
        else bad_value(key, value, "rwma|bwma");
    } else if (key == "accel") {
        if (value == "sa") r.accel = AcceleratorModel::systolic(r.accel.kernel_size());
        else if (value == "simd") r.accel = AcceleratorModel::simd(r.accel.kernel_size());
        else bad_value(key, value, "sa|simd");
    } else if (key == "kernel-size") {
        const auto k = parse_u32(key, value);
        if (k == 0) bad_value(key, value, "a positive integer");
        r.accel = AcceleratorModel(r.accel.kind(), k);
    } else if (key == "cores") {
        const auto c = parse_u32(key, value);
        if (c != 1 && c != 2 && c != 4) bad_value(key, value, "1|2|4");
        h.cores = c;
    } else if (key == "seq-len") {
        m.seq_len = parse_uint(key, value);
    } else if (key == "model-dim") {
        m.model_dim = parse_uint(key, value);
    } else if (key == "heads") {
        m.heads = parse_uint(key, value);
    } else if (key == "head-dim") {
        m.head_dim = parse_uint(key, value);
    } else if (key == "ff-dim") {
        m.ff_dim = parse_uint(key, value);
    } else if (key == "layers") {
        m.layers = parse_uint(key, value);
    } else if (key == "l1-kb") {
        h.l1.capacity_bytes = parse_uint(key, value) * 1024;
    } else if (key == "l2-kb") {
        h.l2.capacity_bytes = parse_uint(key, value) * 1024;
    } else if (key == "line-bytes") {
        h.l1.line_bytes = h.l2.line_bytes = parse_u32(key, value);
    } else if (key == "l1-assoc") {
        h.l1.associativity = parse_u32(key, value);
    } else if (key == "l2-assoc") {
        h.l2.associativity = parse_u32(key, value);
    } else if (key == "l1-latency") {
        h.l1.hit_latency = parse_u32(key, value);
    } else if (key == "l2-latency") {
        h.l2.hit_latency = parse_u32(key, value);
    } else if (key == "mem-latency") {
        h.mem_latency = parse_u32(key, value);
    } else if (key == "prefetch") {
        if (value == "on" || value == "tagged") h.prefetch = PrefetchPolicy::TaggedNextLine;
        else if (value == "off") h.prefetch = PrefetchPolicy::Off;
        else if (value == "next-line") h.prefetch = PrefetchPolicy::NextLine;
        else bad_value(key, value, "on|off|next-line|tagged");
    } else if (key == "seed") {
        r.seed = parse_uint(key, value);
    } else if (key == "toy") {
        if (parse_bool(key, value)) apply_toy(cfg);
        else cfg.toy = false;
    } else if (key == "format") {
        if (value == "json") cfg.format = OutputFormat::Json;
        else if (value == "csv") cfg.format = OutputFormat::Csv;
        else if (value == "table") cfg.format = OutputFormat::Table;
        else bad_value(key, value, "json|csv|table");
    } else if (key == "out") {
        cfg.out = std::string(value);
    } else {
        throw ConfigError("unknown setting '" + std::string(key) + "'");
    }
}

ExperimentConfig resolve_config(const KeyValues& file, const KeyValues& flags) {
    ExperimentConfig cfg;
    bool toy = false;
    bool explicit_head_dim = false;
    for (const KeyValues* src : {&file, &flags}) {
        for (const auto& [k, v] : *src) {
            if (k == "toy") toy = parse_bool(k, v);
            if (k == "head-dim") explicit_head_dim = true;
        }
    }
    if (toy) apply_toy(cfg);
    for (const KeyValues* src : {&file, &flags}) {
        for (const auto& [k, v] : *src) {
            if (k == "toy") continue;
            apply_setting(cfg, k, v);
        }
    }
    ModelConfig& m = cfg.run.model;
    if (!explicit_head_dim && m.heads != 0) {
        if (m.model_dim % m.heads != 0) {
            throw ConfigError("model-dim " + std::to_string(m.model_dim) + " is not divisible by heads " +
                              std::to_string(m.heads));
        }
        m.head_dim = m.model_dim / m.heads;
    }
    return cfg;
}

std::string to_config_text(const ExperimentConfig& cfg) {
    const RunConfig& r = cfg.run;
    const ModelConfig& m = r.model;
    const HierarchyConfig& h = r.hierarchy;
    std::ostringstream os;
    os << "layout = " << to_string(r.layout) << '\n'
       << "accel = " << to_string(r.accel.kind()) << '\n'
       << "kernel-size = " << r.accel.kernel_size() << '\n'
       << "cores = " << h.cores << '\n'
       << "seq-len = " << m.seq_len << '\n'
       << "model-dim = " << m.model_dim << '\n'
       << "heads = " << m.heads << '\n'
       << "head-dim = " << m.head_dim << '\n'
       << "ff-dim = " << m.ff_dim << '\n'
       << "layers = " << m.layers << '\n'
       << "l1-kb = " << h.l1.capacity_bytes / 1024 << '\n'
       << "l2-kb = " << h.l2.capacity_bytes / 1024 << '\n'
       << "line-bytes = " << h.l1.line_bytes << '\n'
       << "l1-assoc = " << h.l1.associativity << '\n'
       << "l2-assoc = " << h.l2.associativity << '\n'
       << "l1-latency = " << h.l1.hit_latency << '\n'
       << "l2-latency = " << h.l2.hit_latency << '\n'
       << "mem-latency = " << h.mem_latency << '\n'
       << "prefetch = " << to_string(h.prefetch) << '\n'
       << "seed = " << r.seed << '\n'
       << "format = " << to_string(cfg.format) << '\n';
    if (!cfg.out.empty()) os << "out = " << cfg.out << '\n';
    return os.str();
}

}  // namespace bwma
