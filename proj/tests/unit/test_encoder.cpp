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

#include <random>

#include "bwma/encoder.hpp"
#include "bwma/errors.hpp"
#include "bwma/reference/reference.hpp"

using namespace bwma;

namespace {

RunConfig toy(LayoutKind layout, std::uint32_t cores = 1) {
    RunConfig cfg;
    cfg.model = ModelConfig::toy();
    cfg.accel = AcceleratorModel::systolic(8);
    cfg.layout = layout;
    cfg.hierarchy.cores = cores;
    return cfg;
}

double max_abs_diff(const Matrix& got, const reference::Dense& want) {
    double worst = 0;
    for (std::size_t r = 0; r < want.rows; ++r) {
        for (std::size_t c = 0; c < want.cols; ++c) worst = std::max(worst, std::abs(got.at(r, c) - want(r, c)));
    }
    return worst;
}

}  // namespace

TEST(Encoder, Presets) {
    const ModelConfig d = ModelConfig::bert_base();
    EXPECT_EQ(d.seq_len, 512u);
    EXPECT_EQ(d.model_dim, 768u);
    EXPECT_EQ(d.heads, 12u);
    EXPECT_EQ(d.ff_dim, 3072u);
    EXPECT_EQ(d.layers, 12u);
    EXPECT_NO_THROW(ModelConfig::toy().validate());
    ModelConfig bad = d;
    bad.head_dim = 63;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Encoder, ComponentTable) {
    EXPECT_EQ(all_components().size(), 11u);
    EXPECT_EQ(component_name(Component::QktGemm), "QKT-GEMM");
    EXPECT_EQ(component_class(Component::FF1), ComponentClass::Gemm);
    EXPECT_EQ(component_class(Component::Transpose), ComponentClass::NonGemm);
    EXPECT_EQ(component_class(Component::LayoutConversion), ComponentClass::Conversion);
}

TEST(Encoder, PartitionIsBalanced) {
    for (std::uint32_t cores : {1u, 2u, 3u, 4u}) {
        for (std::size_t items : {0u, 1u, 5u, 32u, 33u}) {
            const auto p = partition_multicore(items, cores);
            ASSERT_EQ(p.size(), cores);
            std::size_t lo = items, hi = 0, total = 0;
            for (const auto& l : p) {
                lo = std::min(lo, l.size());
                hi = std::max(hi, l.size());
                total += l.size();
            }
            EXPECT_EQ(total, items);
            EXPECT_LE(hi - std::min(lo, hi), 1u);
        }
    }
    EXPECT_EQ(partition_multicore(5, 2)[1], (std::vector<std::size_t>{1, 3}));
    EXPECT_THROW(partition_multicore(4, 0), ConfigError);
}

TEST(Encoder, AttentionHeadZeroWeights) {
    std::mt19937_64 rng(1);
    Matrix x(4, 4);
    for (float& v : x.data()) v = static_cast<float>(rng() % 7) - 3.0f;
    const HeadWeights w{Matrix(4, 2), Matrix(4, 2), Matrix(4, 2)};
    NullSink sink;
    const Matrix h = attention_head(x, w, AcceleratorModel::systolic(2), sink);
    EXPECT_EQ(h.rows(), 4u);
    EXPECT_EQ(h.cols(), 2u);
    for (float v : h.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Encoder, AttentionHeadMatchesDenseReference) {
    ModelConfig cfg{8, 8, 2, 4, 16, 1};
    const Matrix x = make_input(cfg, 5);
    const LayerWeights w = make_layer_weights(cfg, 5, 0);
    const auto want = reference::ref_attention_head(reference::to_dense(x), w.heads[0]);
    for (bool block : {false, true}) {
        NullSink sink;
        const LayerWeights lw = convert_weights(w, block ? LayoutSpec::block_wise(4) : LayoutSpec::row_wise());
        const Matrix xin = block ? to_blockwise(x, 4) : x;
        const Matrix h = attention_head(xin, lw.heads[0], AcceleratorModel::systolic(4), sink);
        EXPECT_EQ(h.rows(), 8u);
        EXPECT_EQ(h.cols(), 4u);
        EXPECT_LT(max_abs_diff(h, want), 1e-4);
    }
}

TEST(Encoder, LayerMatchesDenseReference) {
    ModelConfig cfg{32, 32, 4, 8, 64, 1};
    const Matrix x = make_input(cfg, 6);
    const LayerWeights w = make_layer_weights(cfg, 6, 0);
    const auto want = reference::ref_encoder_layer(reference::to_dense(x), w, Activation::Gelu);
    MemoryHierarchy h(HierarchyConfig{});
    const auto res = encoder_layer(to_blockwise(x, 8), convert_weights(w, LayoutSpec::block_wise(8)),
                                   AcceleratorModel::systolic(8), h);
    EXPECT_LT(max_abs_diff(res.out, want), 1e-4);
    EXPECT_GT(res.timing[static_cast<std::size_t>(Component::FF1)].compute_cycles, 0u);
    EXPECT_EQ(res.timing[static_cast<std::size_t>(Component::LayoutConversion)].total_cycles(), 0u);
}

TEST(Encoder, LayerRejectsMixedLayouts) {
    ModelConfig cfg{16, 16, 2, 8, 32, 1};
    MemoryHierarchy h(HierarchyConfig{});
    const LayerWeights w = make_layer_weights(cfg, 1, 0);
    EXPECT_THROW(encoder_layer(to_blockwise(make_input(cfg, 1), 8), w, AcceleratorModel::systolic(8), h),
                 LayoutError);
}

TEST(Encoder, DeterministicAcrossRuns) {
    const auto a = run_model(toy(LayoutKind::BlockWise));
    const auto b = run_model(toy(LayoutKind::BlockWise));
    EXPECT_TRUE(logically_equal(a.output, b.output));
    EXPECT_EQ(a.total_cycles, b.total_cycles);
    EXPECT_EQ(a.cache, b.cache);
    for (std::size_t i = 0; i < kComponentCount; ++i) {
        EXPECT_EQ(a.components[i].total_cycles(), b.components[i].total_cycles());
    }
}

TEST(Encoder, OutputInvariantAcrossLayoutsAndCores) {
    const auto ref = run_model(toy(LayoutKind::RowWise)).output;
    for (auto layout : {LayoutKind::RowWise, LayoutKind::BlockWise}) {
        for (std::uint32_t cores : {1u, 2u, 4u}) {
            EXPECT_TRUE(logically_equal(run_model(toy(layout, cores)).output, ref))
                << to_string(layout) << " cores=" << cores;
        }
    }
}

TEST(Encoder, ConversionOnlyForBlockWise) {
    const auto conv = static_cast<std::size_t>(Component::LayoutConversion);
    const auto bw = run_model(toy(LayoutKind::BlockWise));
    const auto rw = run_model(toy(LayoutKind::RowWise));
    EXPECT_GT(bw.components[conv].total_cycles(), 0u);
    EXPECT_EQ(rw.components[conv].total_cycles(), 0u);
    for (Component c : all_components()) {
        if (c == Component::LayoutConversion) continue;
        EXPECT_GT(rw.components[static_cast<std::size_t>(c)].total_cycles(), 0u) << component_name(c);
    }
}

TEST(Encoder, TotalsAreSumsOfComponents) {
    const auto r = run_model(toy(LayoutKind::BlockWise, 2));
    std::uint64_t total = 0;
    CacheStats cache;
    cache.l1.assign(2, {});
    for (const auto& t : r.components) {
        total += t.total_cycles();
        cache += t.cache;
    }
    EXPECT_EQ(total, r.total_cycles);
    EXPECT_EQ(cache, r.cache);
}

TEST(Encoder, MoreCoresAreFaster) {
    const auto one = run_model(toy(LayoutKind::BlockWise, 1));
    const auto two = run_model(toy(LayoutKind::BlockWise, 2));
    const auto four = run_model(toy(LayoutKind::BlockWise, 4));
    EXPECT_LT(two.total_cycles, one.total_cycles);
    EXPECT_LT(four.total_cycles, two.total_cycles);
}

TEST(Encoder, MultipleLayersUseEachLayersWeights) {
    RunConfig cfg = toy(LayoutKind::BlockWise);
    cfg.model.layers = 2;
    const Matrix input = make_input(cfg.model, cfg.seed);
    const auto got = run_model(input, seeded_weights(cfg.model, cfg.seed), cfg).output;

    MemoryHierarchy h(cfg.hierarchy);
    const LayoutSpec rw = LayoutSpec::row_wise();
    const auto l0 = encoder_layer(input, convert_weights(make_layer_weights(cfg.model, cfg.seed, 0), rw), cfg.accel, h);
    const auto l1 = encoder_layer(l0.out, convert_weights(make_layer_weights(cfg.model, cfg.seed, 1), rw), cfg.accel, h);
    EXPECT_TRUE(logically_equal(got, l1.out));
}

TEST(Encoder, NonDivisibleDimensionsRejected) {
    RunConfig cfg = toy(LayoutKind::BlockWise);
    cfg.model.seq_len = 60;
    EXPECT_THROW(run_model(cfg), ConfigError);
    cfg = toy(LayoutKind::RowWise);
    cfg.accel = AcceleratorModel::systolic(16);
    EXPECT_THROW(run_model(cfg), ConfigError);  // head_dim 24
}

TEST(Encoder, AccessTapSeesEveryAccess) {
    RunConfig cfg = toy(LayoutKind::BlockWise, 2);
    std::uint64_t seen = 0;
    cfg.access_tap = [&seen](std::uint32_t, const AccessRun& r) { seen += r.count; };
    const auto res = run_model(cfg);
    EXPECT_EQ(seen, res.cache.l1_total().accesses);
}
