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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bwma/config.hpp"
#include "bwma/encoder.hpp"

namespace bwma {

inline constexpr std::string_view kRunReportSchema = "bwma-run-report/1";
inline constexpr std::string_view kCompareReportSchema = "bwma-compare-report/1";
inline constexpr std::string_view kSweepReportSchema = "bwma-sweep-report/1";

/// Percent of total cycles per component class. Sums to 100.
struct Shares {
    double gemm = 0;
    double non_gemm = 0;
    double conversion = 0;
};

Shares compute_shares(const TimingTable& t);

/// 64-bit FNV-1a over the bit patterns of the row-major output.
std::uint64_t output_checksum(const Matrix& m);

struct RunReport {
    RunConfig config;
    std::uint64_t total_cycles = 0;
    TimingTable components{};
    CacheStats cache;
    Shares shares;
    std::uint64_t checksum = 0;
};

RunReport make_run_report(const RunConfig& cfg, const RunResult& result);

struct CompareReport {
    RunReport rwma;
    RunReport bwma;
    double speedup = 0;                   // rwma.total_cycles / bwma.total_cycles
    std::optional<double> l1_miss_ratio;  // rwma L1 misses / bwma L1 misses; empty if bwma has none
    bool outputs_equal = false;
};

CompareReport make_compare_report(RunReport rwma, RunReport bwma, bool outputs_equal);

struct SweepRow {
    AcceleratorKind accel = AcceleratorKind::SystolicArray;
    std::uint32_t kernel_size = 16;
    std::uint32_t cores = 1;
    CompareReport compare;
};

std::string to_json(const RunReport& r);
std::string to_json(const CompareReport& r);
std::string to_json(const std::vector<SweepRow>& rows);

/// Long-form "key,value" CSV holding exactly the JSON leaves; keys are the
/// dotted JSON paths (array elements by index).
std::string to_csv(const RunReport& r);
std::string to_csv(const CompareReport& r);
std::string to_csv(const std::vector<SweepRow>& rows);

/// Aligned plain-text tables for terminals.
std::string to_table(const RunReport& r);
std::string to_table(const CompareReport& r);
std::string to_table(const std::vector<SweepRow>& rows);

std::string render(const RunReport& r, OutputFormat f);
std::string render(const CompareReport& r, OutputFormat f);
std::string render(const std::vector<SweepRow>& rows, OutputFormat f);

}  // namespace bwma
