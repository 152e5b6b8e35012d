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
#include "bwma/report.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace bwma {

using nlohmann::ordered_json;

Shares compute_shares(const TimingTable& t) {
    std::uint64_t by_class[3] = {0, 0, 0};
    std::uint64_t total = 0;
    for (Component c : all_components()) {
        const auto cycles = t[static_cast<std::size_t>(c)].total_cycles();
        by_class[static_cast<std::size_t>(component_class(c))] += cycles;
        total += cycles;
    }
    Shares s;
    if (total == 0) return s;
    const double scale = 100.0 / static_cast<double>(total);
    s.gemm = static_cast<double>(by_class[0]) * scale;
    s.non_gemm = static_cast<double>(by_class[1]) * scale;
    s.conversion = static_cast<double>(by_class[2]) * scale;
    return s;
}

std::uint64_t output_checksum(const Matrix& m) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (float v : m.to_row_major()) {
        std::uint32_t bits = 0;
        std::memcpy(&bits, &v, sizeof bits);
        for (int i = 0; i < 4; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

RunReport make_run_report(const RunConfig& cfg, const RunResult& result) {
    RunReport r;
    r.config = cfg;
    r.total_cycles = result.total_cycles;
    r.components = result.components;
    r.cache = result.cache;
    r.shares = compute_shares(result.components);
    r.checksum = output_checksum(result.output);
    return r;
}

CompareReport make_compare_report(RunReport rwma, RunReport bwma, bool outputs_equal) {
    CompareReport c;
    c.speedup = bwma.total_cycles == 0 ? 0.0
                                       : static_cast<double>(rwma.total_cycles) / static_cast<double>(bwma.total_cycles);
    const auto bm = bwma.cache.l1_total().misses;
    if (bm != 0) c.l1_miss_ratio = static_cast<double>(rwma.cache.l1_total().misses) / static_cast<double>(bm);
    c.rwma = std::move(rwma);
    c.bwma = std::move(bwma);
    c.outputs_equal = outputs_equal;
    return c;
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016" PRIx64, v);
    return buf;
}

// Shares are rounded so that JSON and CSV print the same digits.
double round4(double v) { return std::round(v * 1e4) / 1e4; }

ordered_json level_json(const LevelStats& s) {
    return ordered_json{{"accesses", s.accesses},     {"hits", s.hits},
                        {"misses", s.misses},         {"writebacks", s.writebacks},
                        {"prefetches", s.prefetches}, {"useful_prefetches", s.useful_prefetches}};
}

ordered_json cache_json(const CacheStats& c) {
    ordered_json l1 = ordered_json::array();
    for (const auto& s : c.l1) l1.push_back(level_json(s));
    return ordered_json{{"l1", l1},
                        {"l1_total", level_json(c.l1_total())},
                        {"l2", level_json(c.l2)},
                        {"mem_reads", c.mem_reads},
                        {"mem_writes", c.mem_writes}};
}

ordered_json config_json(const RunConfig& cfg) {
    const ModelConfig& m = cfg.model;
    const HierarchyConfig& h = cfg.hierarchy;
    auto level = [](const CacheLevelConfig& l) {
        return ordered_json{{"capacity_bytes", l.capacity_bytes},
                            {"line_bytes", l.line_bytes},
                            {"associativity", l.associativity},
                            {"hit_latency", l.hit_latency}};
    };
    return ordered_json{
        {"model",
         {{"seq_len", m.seq_len},
          {"model_dim", m.model_dim},
          {"heads", m.heads},
          {"head_dim", m.head_dim},
          {"ff_dim", m.ff_dim},
          {"layers", m.layers}}},
        {"accelerator",
         {{"kind", to_string(cfg.accel.kind())}, {"kernel_size", cfg.accel.kernel_size()}, {"name", cfg.accel.name()}}},
        {"hierarchy",
         {{"l1", level(h.l1)},
          {"l2", level(h.l2)},
          {"mem_latency", h.mem_latency},
          {"prefetch", to_string(h.prefetch)}}},
        {"layout", to_string(cfg.layout)},
        {"cores", h.cores},
        {"seed", cfg.seed},
        {"activation", to_string(cfg.activation)},
        {"partitioning", "round-robin: heads per round, output tile rows, row bands"},
        {"interleave_chunk", cfg.interleave_chunk},
    };
}

ordered_json run_json(const RunReport& r) {
    ordered_json comps = ordered_json::array();
    for (Component c : all_components()) {
        const ComponentTiming& t = r.components[static_cast<std::size_t>(c)];
        comps.push_back(ordered_json{{"name", component_name(c)},
                                     {"compute_cycles", t.compute_cycles},
                                     {"memory_cycles", t.memory_cycles},
                                     {"total_cycles", t.total_cycles()},
                                     {"element_accesses", t.element_accesses},
                                     {"l1_accesses", t.cache.l1_total().accesses},
                                     {"l1_misses", t.cache.l1_total().misses},
                                     {"l2_accesses", t.cache.l2.accesses},
                                     {"l2_misses", t.cache.l2.misses}});
    }
    return ordered_json{{"schema", kRunReportSchema},
                        {"config", config_json(r.config)},
                        {"total_cycles", r.total_cycles},
                        {"components", comps},
                        {"cache", cache_json(r.cache)},
                        {"shares_pct",
                         {{"gemm", round4(r.shares.gemm)},
                          {"non_gemm", round4(r.shares.non_gemm)},
                          {"conversion", round4(r.shares.conversion)}}},
                        {"output_checksum", hex64(r.checksum)}};
}

ordered_json compare_json(const CompareReport& r) {
    ordered_json j{{"schema", kCompareReportSchema},
                   {"speedup", round4(r.speedup)},
                   {"l1_miss_ratio", nullptr},
                   {"outputs_equal", r.outputs_equal}};
    if (r.l1_miss_ratio) j["l1_miss_ratio"] = round4(*r.l1_miss_ratio);
    j["rwma"] = run_json(r.rwma);
    j["bwma"] = run_json(r.bwma);
    return j;
}

ordered_json sweep_json(const std::vector<SweepRow>& rows) {
    ordered_json arr = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json j{{"accel", to_string(row.accel)},
                       {"kernel_size", row.kernel_size},
                       {"cores", row.cores},
                       {"rwma_total_cycles", row.compare.rwma.total_cycles},
                       {"bwma_total_cycles", row.compare.bwma.total_cycles},
                       {"speedup", round4(row.compare.speedup)},
                       {"l1_miss_ratio", nullptr},
                       {"rwma_non_gemm_pct", round4(row.compare.rwma.shares.non_gemm)},
                       {"bwma_non_gemm_pct", round4(row.compare.bwma.shares.non_gemm)},
                       {"outputs_equal", row.compare.outputs_equal}};
        if (row.compare.l1_miss_ratio) j["l1_miss_ratio"] = round4(*row.compare.l1_miss_ratio);
        arr.push_back(std::move(j));
    }
    return ordered_json{{"schema", kSweepReportSchema}, {"rows", arr}};
}

void flatten(const ordered_json& j, const std::string& prefix, std::ostringstream& os) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, os);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), os);
    } else {
        std::string v = j.is_string() ? j.get<std::string>() : j.dump();
        if (v.find_first_of(",\"\n") != std::string::npos) {
            std::string q = "\"";
            for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            v = q + "\"";
        }
        os << prefix << ',' << v << '\n';
    }
}

std::string csv_of(const ordered_json& j) {
    std::ostringstream os;
    os << "key,value\n";
    flatten(j, "", os);
    return os.str();
}

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

// Renders rows of cells with every column padded to its widest cell.
// Column 0 is left-aligned, the rest right-aligned.
std::string aligned(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        width.resize(std::max(width.size(), row.size()), 0);
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    std::ostringstream os;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i != 0) os << "  ";
            if (i == 0) os << std::left;
            else os << std::right;
            os << std::setw(static_cast<int>(width[i])) << row[i];
        }
        os << '\n';
    }
    return os.str();
}

std::string config_line(const RunConfig& c) {
    const ModelConfig& m = c.model;
    std::ostringstream os;
    os << "S=" << m.seq_len << " D=" << m.model_dim << " h=" << m.heads << " dq=" << m.head_dim << " F=" << m.ff_dim
       << " L=" << m.layers << "  " << c.accel.name() << "  cores=" << c.hierarchy.cores
       << "  prefetch=" << to_string(c.hierarchy.prefetch) << "  seed=" << c.seed;
    return os.str();
}

}  // namespace

std::string to_json(const RunReport& r) { return run_json(r).dump(2) + "\n"; }
std::string to_json(const CompareReport& r) { return compare_json(r).dump(2) + "\n"; }
std::string to_json(const std::vector<SweepRow>& rows) { return sweep_json(rows).dump(2) + "\n"; }

std::string to_csv(const RunReport& r) { return csv_of(run_json(r)); }
std::string to_csv(const CompareReport& r) { return csv_of(compare_json(r)); }
std::string to_csv(const std::vector<SweepRow>& rows) { return csv_of(sweep_json(rows)); }

std::string to_table(const RunReport& r) {
    std::vector<std::vector<std::string>> rows{
        {"component", "compute", "memory", "total", "share%", "L1 miss", "L2 miss"}};
    const double total = static_cast<double>(std::max<std::uint64_t>(r.total_cycles, 1));
    for (Component c : all_components()) {
        const ComponentTiming& t = r.components[static_cast<std::size_t>(c)];
        rows.push_back({std::string(component_name(c)), std::to_string(t.compute_cycles),
                        std::to_string(t.memory_cycles), std::to_string(t.total_cycles()),
                        fixed(100.0 * static_cast<double>(t.total_cycles()) / total, 2),
                        std::to_string(t.cache.l1_total().misses), std::to_string(t.cache.l2.misses)});
    }
    rows.push_back({"total", "", "", std::to_string(r.total_cycles), "100.00",
                    std::to_string(r.cache.l1_total().misses), std::to_string(r.cache.l2.misses)});
    std::ostringstream os;
    os << to_string(r.config.layout) << "  " << config_line(r.config) << '\n'
       << aligned(rows) << "shares: gemm " << fixed(r.shares.gemm, 2) << "%  non-gemm " << fixed(r.shares.non_gemm, 2)
       << "%  conversion " << fixed(r.shares.conversion, 2) << "%\n";
    return os.str();
}

std::string to_table(const CompareReport& r) {
    auto miss = [](const RunReport& x) { return std::to_string(x.cache.l1_total().misses); };
    std::vector<std::vector<std::string>> rows{
        {"layout", "total cycles", "L1 misses", "gemm%", "non-gemm%", "conversion%"},
        {"rwma", std::to_string(r.rwma.total_cycles), miss(r.rwma), fixed(r.rwma.shares.gemm, 2),
         fixed(r.rwma.shares.non_gemm, 2), fixed(r.rwma.shares.conversion, 2)},
        {"bwma", std::to_string(r.bwma.total_cycles), miss(r.bwma), fixed(r.bwma.shares.gemm, 2),
         fixed(r.bwma.shares.non_gemm, 2), fixed(r.bwma.shares.conversion, 2)},
    };
    std::ostringstream os;
    os << config_line(r.rwma.config) << '\n'
       << aligned(rows) << "speedup " << fixed(r.speedup, 3) << "x  L1 miss ratio "
       << (r.l1_miss_ratio ? fixed(*r.l1_miss_ratio, 2) + "x" : std::string("n/a")) << "  outputs equal "
       << (r.outputs_equal ? "yes" : "no") << '\n';
    return os.str();
}

std::string to_table(const std::vector<SweepRow>& rows) {
    std::vector<std::vector<std::string>> cells{
        {"accel", "K", "cores", "rwma cycles", "bwma cycles", "speedup", "L1 miss ratio", "equal"}};
    for (const auto& row : rows) {
        const auto& c = row.compare;
        cells.push_back({std::string(to_string(row.accel)), std::to_string(row.kernel_size),
                         std::to_string(row.cores), std::to_string(c.rwma.total_cycles),
                         std::to_string(c.bwma.total_cycles), fixed(c.speedup, 3),
                         c.l1_miss_ratio ? fixed(*c.l1_miss_ratio, 2) : std::string("n/a"),
                         c.outputs_equal ? "yes" : "no"});
    }
    return aligned(cells);
}

std::string render(const RunReport& r, OutputFormat f) {
    switch (f) {
        case OutputFormat::Json: return to_json(r);
        case OutputFormat::Csv: return to_csv(r);
        case OutputFormat::Table: return to_table(r);
    }
    return {};
}

std::string render(const CompareReport& r, OutputFormat f) {
    switch (f) {
        case OutputFormat::Json: return to_json(r);
        case OutputFormat::Csv: return to_csv(r);
        case OutputFormat::Table: return to_table(r);
    }
    return {};
}

std::string render(const std::vector<SweepRow>& rows, OutputFormat f) {
    switch (f) {
        case OutputFormat::Json: return to_json(rows);
        case OutputFormat::Csv: return to_csv(rows);
        case OutputFormat::Table: return to_table(rows);
    }
    return {};
}

}  // namespace bwma
