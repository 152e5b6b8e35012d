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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "bwma/accel.hpp"
#include "bwma/cache.hpp"
#include "bwma/kernels.hpp"
#include "bwma/matrix.hpp"

namespace bwma {

struct ModelConfig {
    std::size_t seq_len = 512;
    std::size_t model_dim = 768;
    std::size_t heads = 12;
    std::size_t head_dim = 64;
    std::size_t ff_dim = 3072;
    std::size_t layers = 12;

    /// BERT-base.
    static ModelConfig bert_base() { return {}; }
    /// Small preset for CI-speed runs (use with kernel size 8).
    static ModelConfig toy() { return {64, 96, 4, 24, 384, 1}; }

    /// Throws ConfigError unless all positive and model_dim == heads * head_dim.
    void validate() const;
    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

enum class Component : std::uint8_t {
    QkvGemm,
    QktGemm,
    Softmax,
    AvGemm,
    Projection,
    AddNorm1,
    FF1,
    FF2,
    AddNorm2,
    Transpose,
    LayoutConversion,
};
inline constexpr std::size_t kComponentCount = 11;

enum class ComponentClass : std::uint8_t { Gemm, NonGemm, Conversion };

std::string_view component_name(Component c);
ComponentClass component_class(Component c);
std::array<Component, kComponentCount> all_components();

/// Cycles and cache activity accumulated over every measurement window of
/// one component. Windows snapshot the hierarchy counters; caches are never
/// flushed between components.
struct ComponentTiming {
    std::uint64_t compute_cycles = 0;
    std::uint64_t memory_cycles = 0;
    std::uint64_t element_accesses = 0;
    CacheStats cache;

    std::uint64_t total_cycles() const { return compute_cycles + memory_cycles; }
    ComponentTiming& operator+=(const ComponentTiming& o);
};

using TimingTable = std::array<ComponentTiming, kComponentCount>;

struct HeadWeights {
    Matrix wq, wk, wv;  // model_dim x head_dim each
};

struct LayerWeights {
    std::vector<HeadWeights> heads;
    Matrix wo;  // model_dim x model_dim
    Matrix w1;  // model_dim x ff_dim
    Matrix w2;  // ff_dim x model_dim
    std::vector<float> ln1_gamma, ln1_beta, ln2_gamma, ln2_beta;  // empty: identity
};

/// Row-wise weights drawn uniformly from [-0.1, 0.1], deterministic in
/// (seed, layer). Addresses are left at 0.
LayerWeights make_layer_weights(const ModelConfig& cfg, std::uint64_t seed, std::size_t layer);

/// Row-wise seq_len x model_dim input drawn uniformly from [-1, 1].
Matrix make_input(const ModelConfig& cfg, std::uint64_t seed);

/// Converts every weight matrix to `layout` (untimed, as at model load).
LayerWeights convert_weights(const LayerWeights& w, const LayoutSpec& layout);
/// Assigns consecutive addresses to every weight matrix.
void place_weights(LayerWeights& w, AddressAllocator& alloc);

/// Round-robin assignment of `items` work units (tile rows, heads, row
/// bands) to `cores`. Per-core counts differ by at most one.
std::vector<std::vector<std::size_t>> partition_multicore(std::size_t items, std::uint32_t cores);

/// H = softmax(Q K^T / sqrt(head_dim)) V with Q = x Wq, K = x Wk, V = x Wv.
/// K^T is materialized by the transpose kernel; every product is a tiled
/// GEMM. Intermediates are placed after the highest input address.
Matrix attention_head(const Matrix& x, const HeadWeights& w, const AcceleratorModel& accel, TraceSink& sink);

struct LayerResult {
    Matrix out;
    TimingTable timing{};
};

/// One encoder layer: h heads, concatenation, projection, Add/Norm, FF1 with
/// fused activation, FF2, Add/Norm. Output layout equals the input layout.
/// `w` must already be in x's layout. Uses hierarchy.cores() simulated cores.
LayerResult encoder_layer(const Matrix& x, const LayerWeights& w, const AcceleratorModel& accel,
                          MemoryHierarchy& hierarchy, Activation activation = Activation::Gelu);

struct RunConfig {
    ModelConfig model;
    LayoutKind layout = LayoutKind::BlockWise;
    AcceleratorModel accel = AcceleratorModel::systolic(16);
    HierarchyConfig hierarchy;
    std::uint64_t seed = 1;
    Activation activation = Activation::Gelu;
    ScalarCosts costs;
    std::uint32_t interleave_chunk = kDefaultInterleaveChunk;
    /// Optional observer of every consumed access (e.g. a trace file writer).
    AccessTap access_tap;

    LayoutSpec layout_spec() const;
    /// Model, hierarchy and divisibility checks (every dimension must be a
    /// multiple of the kernel size).
    void validate() const;
};

struct RunResult {
    Matrix output;  // row-wise
    TimingTable components{};
    CacheStats cache;
    std::uint64_t total_cycles = 0;
};

/// Provides the row-wise weights of layer l.
using WeightProvider = std::function<LayerWeights(std::size_t layer)>;

WeightProvider seeded_weights(const ModelConfig& cfg, std::uint64_t seed);

/// End-to-end inference. For block-wise runs the input is converted once
/// before the first layer and the output once after the last, both timed
/// under LayoutConversion; intermediate matrices stay block-wise.
RunResult run_model(const Matrix& input, const WeightProvider& weights, const RunConfig& cfg);
/// Input and weights generated from cfg.seed.
RunResult run_model(const RunConfig& cfg);

}  // namespace bwma
