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
#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "bwma/errors.hpp"
#include "bwma/experiment.hpp"
#include "json.hpp"

using namespace bwma;
using nlohmann::json;

namespace {

ExperimentConfig toy_config() { return resolve_config({}, {{"toy", "true"}, {"prefetch", "on"}}); }

void flatten(const json& j, const std::string& prefix, std::map<std::string, json>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
    } else {
        out[prefix] = j;
    }
}

std::map<std::string, std::string> parse_csv(const std::string& csv) {
    std::map<std::string, std::string> out;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "key,value");
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        std::string v = line.substr(comma + 1);
        if (v.size() >= 2 && v.front() == '"') v = v.substr(1, v.size() - 2);
        out[line.substr(0, comma)] = v;
    }
    return out;
}

}  // namespace

TEST(Report, RunReportSchema) {
    const RunReport r = cmd_run(toy_config());
    const json j = json::parse(to_json(r));
    const std::vector<std::string> keys = {"schema", "config", "total_cycles", "components",
                                           "cache",  "shares_pct", "output_checksum"};
    ASSERT_EQ(j.size(), keys.size());
    for (const auto& k : keys) EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_EQ(j["schema"], "bwma-run-report/1");
    EXPECT_EQ(j["components"].size(), 11u);
    EXPECT_EQ(j["components"][10]["name"], "LayoutConversion");
    const json& s = j["shares_pct"];
    EXPECT_NEAR(s["gemm"].get<double>() + s["non_gemm"].get<double>() + s["conversion"].get<double>(), 100.0, 0.1);
    EXPECT_EQ(j["config"]["partitioning"].get<std::string>().rfind("round-robin", 0), 0u);
}

TEST(Report, DefaultConfigEcho) {
    ExperimentConfig cfg = resolve_config({}, {});
    RunResult fake;
    fake.output = Matrix(1, 1);
    const json j = json::parse(to_json(make_run_report(cfg.run, fake)));
    EXPECT_EQ(j["config"]["model"]["seq_len"], 512);
    EXPECT_EQ(j["config"]["model"]["model_dim"], 768);
    EXPECT_EQ(j["config"]["model"]["heads"], 12);
    EXPECT_EQ(j["config"]["model"]["ff_dim"], 3072);
    EXPECT_EQ(j["config"]["accelerator"]["name"], "SA16x16");
}

TEST(Report, SameSeedSameBytes) {
    const auto cfg = toy_config();
    EXPECT_EQ(to_json(cmd_run(cfg)), to_json(cmd_run(cfg)));
    EXPECT_EQ(to_csv(cmd_run(cfg)), to_csv(cmd_run(cfg)));
}

TEST(Report, CsvJsonParity) {
    const CompareReport c = cmd_compare(toy_config());
    std::map<std::string, json> flat;
    flatten(json::parse(to_json(c)), "", flat);
    const auto csv = parse_csv(to_csv(c));
    ASSERT_EQ(csv.size(), flat.size());
    for (const auto& [k, v] : flat) {
        ASSERT_TRUE(csv.count(k)) << k;
        EXPECT_EQ(csv.at(k), v.is_string() ? v.get<std::string>() : v.dump()) << k;
    }
}

TEST(Report, CompareDefinitions) {
    const CompareReport c = cmd_compare(toy_config());
    EXPECT_TRUE(c.outputs_equal);
    EXPECT_EQ(c.rwma.checksum, c.bwma.checksum);
    EXPECT_DOUBLE_EQ(c.speedup, static_cast<double>(c.rwma.total_cycles) / static_cast<double>(c.bwma.total_cycles));
    ASSERT_TRUE(c.l1_miss_ratio.has_value());
    EXPECT_DOUBLE_EQ(*c.l1_miss_ratio, static_cast<double>(c.rwma.cache.l1_total().misses) /
                                           static_cast<double>(c.bwma.cache.l1_total().misses));
    EXPECT_GT(c.speedup, 0.0);
    EXPECT_NE(to_table(c).find("speedup"), std::string::npos);
}

TEST(Report, SweepRowsSorted) {
    SweepAxes axes;
    axes.kernel_sizes = {8};
    axes.accels = {AcceleratorKind::Simd, AcceleratorKind::SystolicArray};
    axes.cores = {4, 1, 2};
    const auto rows = cmd_sweep(toy_config(), axes);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0].accel, AcceleratorKind::SystolicArray);
    EXPECT_EQ(rows[0].cores, 1u);
    EXPECT_EQ(rows[2].cores, 4u);
    EXPECT_EQ(rows[3].accel, AcceleratorKind::Simd);
    for (const auto& r : rows) EXPECT_TRUE(r.compare.outputs_equal);
    const json j = json::parse(to_json(rows));
    EXPECT_EQ(j["rows"].size(), 6u);
}

TEST(Report, SweepValidatesBeforeRunning) {
    SweepAxes axes;
    axes.kernel_sizes = {8, 7};
    EXPECT_THROW(cmd_sweep(toy_config(), axes), ConfigError);
}

TEST(Report, SharesOfEmptyTableAreZero) {
    const Shares s = compute_shares(TimingTable{});
    EXPECT_EQ(s.gemm + s.non_gemm + s.conversion, 0.0);
}
