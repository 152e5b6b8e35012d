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

#include "bwma/config.hpp"
#include "bwma/errors.hpp"

using namespace bwma;

TEST(Config, Defaults) {
    const ExperimentConfig cfg = resolve_config({}, {});
    EXPECT_EQ(cfg.run.model, ModelConfig::bert_base());
    EXPECT_EQ(cfg.run.layout, LayoutKind::BlockWise);
    EXPECT_EQ(cfg.run.accel.kind(), AcceleratorKind::SystolicArray);
    EXPECT_EQ(cfg.run.accel.kernel_size(), 16u);
    EXPECT_EQ(cfg.run.hierarchy, HierarchyConfig{});
    EXPECT_EQ(cfg.format, OutputFormat::Json);
}

TEST(Config, ParseText) {
    const auto kv = parse_config_text("# comment\n\nlayout = rwma\n  kernel-size=8  # trailing\nout = a#b.json\n");
    ASSERT_EQ(kv.size(), 3u);
    EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"layout", "rwma"}));
    EXPECT_EQ(kv[1], (std::pair<std::string, std::string>{"kernel-size", "8"}));
    EXPECT_EQ(kv[2].second, "a#b.json");
}

TEST(Config, ParseErrors) {
    EXPECT_THROW(parse_config_text("layout rwma\n"), ConfigError);
    EXPECT_THROW(parse_config_text("colour = blue\n"), ConfigError);
}

TEST(Config, BadValues) {
    ExperimentConfig cfg;
    EXPECT_THROW(apply_setting(cfg, "layout", "diagonal"), ConfigError);
    EXPECT_THROW(apply_setting(cfg, "cores", "3"), ConfigError);
    EXPECT_THROW(apply_setting(cfg, "kernel-size", "0"), ConfigError);
    EXPECT_THROW(apply_setting(cfg, "seq-len", "-4"), ConfigError);
    EXPECT_THROW(apply_setting(cfg, "seq-len", "12abc"), ConfigError);
    EXPECT_THROW(apply_setting(cfg, "prefetch", "maybe"), ConfigError);
}

TEST(Config, EveryFieldReachable) {
    const auto cfg = resolve_config({},
                                    {{"layout", "rwma"},
                                     {"accel", "simd"},
                                     {"kernel-size", "8"},
                                     {"cores", "4"},
                                     {"seq-len", "128"},
                                     {"model-dim", "256"},
                                     {"heads", "4"},
                                     {"ff-dim", "1024"},
                                     {"layers", "2"},
                                     {"l1-kb", "64"},
                                     {"l2-kb", "2048"},
                                     {"line-bytes", "128"},
                                     {"l1-assoc", "8"},
                                     {"l2-assoc", "16"},
                                     {"l1-latency", "3"},
                                     {"l2-latency", "30"},
                                     {"mem-latency", "200"},
                                     {"prefetch", "on"},
                                     {"seed", "99"},
                                     {"format", "csv"},
                                     {"out", "r.csv"}});
    const RunConfig& r = cfg.run;
    EXPECT_EQ(r.layout, LayoutKind::RowWise);
    EXPECT_EQ(r.accel.kind(), AcceleratorKind::Simd);
    EXPECT_EQ(r.accel.kernel_size(), 8u);
    EXPECT_EQ(r.hierarchy.cores, 4u);
    EXPECT_EQ(r.model, (ModelConfig{128, 256, 4, 64, 1024, 2}));
    EXPECT_EQ(r.hierarchy.l1, (CacheLevelConfig{64 * 1024, 128, 8, 3}));
    EXPECT_EQ(r.hierarchy.l2, (CacheLevelConfig{2048 * 1024, 128, 16, 30}));
    EXPECT_EQ(r.hierarchy.mem_latency, 200u);
    EXPECT_EQ(r.hierarchy.prefetch, PrefetchPolicy::TaggedNextLine);
    EXPECT_EQ(r.seed, 99u);
    EXPECT_EQ(cfg.format, OutputFormat::Csv);
    EXPECT_EQ(cfg.out, "r.csv");
}

TEST(Config, Precedence) {
    const KeyValues file = {{"toy", "true"}, {"layout", "rwma"}, {"seq-len", "32"}, {"seed", "5"}};
    const KeyValues flags = {{"layout", "bwma"}};
    const auto cfg = resolve_config(file, flags);
    EXPECT_TRUE(cfg.toy);
    EXPECT_EQ(cfg.run.layout, LayoutKind::BlockWise);  // flag beats file
    EXPECT_EQ(cfg.run.model.seq_len, 32u);             // file beats preset
    EXPECT_EQ(cfg.run.model.model_dim, 96u);           // preset beats default
    EXPECT_EQ(cfg.run.model.head_dim, 24u);
    EXPECT_EQ(cfg.run.accel.kernel_size(), 8u);
    EXPECT_EQ(cfg.run.seed, 5u);
}

TEST(Config, ToyFlagWithFileOverrides) {
    const auto cfg = resolve_config({{"kernel-size", "4"}}, {{"toy", "true"}});
    EXPECT_EQ(cfg.run.accel.kernel_size(), 4u);
    EXPECT_EQ(cfg.run.model, ModelConfig::toy());
}

TEST(Config, HeadDimDerivation) {
    EXPECT_EQ(resolve_config({}, {{"heads", "8"}}).run.model.head_dim, 96u);
    EXPECT_EQ(resolve_config({}, {{"heads", "8"}, {"head-dim", "32"}}).run.model.head_dim, 32u);
    EXPECT_THROW(resolve_config({}, {{"heads", "7"}}), ConfigError);
}

TEST(Config, TextRoundTrip) {
    const auto cfg = resolve_config({}, {{"toy", "true"}, {"accel", "simd"}, {"prefetch", "next-line"}, {"cores", "2"}});
    const auto again = resolve_config(parse_config_text(to_config_text(cfg)), {});
    EXPECT_EQ(again.run.model, cfg.run.model);
    EXPECT_EQ(again.run.hierarchy, cfg.run.hierarchy);
    EXPECT_EQ(again.run.accel.name(), cfg.run.accel.name());
    EXPECT_EQ(again.run.layout, cfg.run.layout);
    EXPECT_EQ(again.run.seed, cfg.run.seed);
}
