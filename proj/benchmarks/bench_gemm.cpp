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
#include <benchmark/benchmark.h>

#include <random>

#include "bwma/accel.hpp"
#include "bwma/cache.hpp"

namespace {

using namespace bwma;

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> d(-1, 1);
    Matrix m(r, c);
    for (float& v : m.data()) v = d(rng);
    return m;
}

// Numeric tiled GEMM only (trace discarded). Args: n, K, block-wise.
void BM_TiledGemm(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto k = static_cast<std::uint32_t>(state.range(1));
    const bool block = state.range(2) != 0;
    Matrix a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
    if (block) {
        a = to_blockwise(a, k);
        b = to_blockwise(b, k);
    }
    NullSink sink;
    for (auto _ : state) {
        auto r = tiled_gemm(a, b, AcceleratorModel::systolic(k), sink);
        benchmark::DoNotOptimize(r.c.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_TiledGemm)->Args({256, 16, 0})->Args({256, 16, 1})->Args({256, 8, 1});

// GEMM with its trace fed through the default cache hierarchy.
void BM_TiledGemmSimulated(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const bool block = state.range(1) != 0;
    Matrix a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
    if (block) {
        a = to_blockwise(a, 16);
        b = to_blockwise(b, 16);
    }
    AddressAllocator alloc;
    alloc.place(a);
    alloc.place(b);
    HierarchyConfig cfg;
    cfg.prefetch = PrefetchPolicy::TaggedNextLine;
    for (auto _ : state) {
        MemoryHierarchy h(cfg);
        HierarchySink sink(h, 0);
        auto r = tiled_gemm(a, b, AcceleratorModel::systolic(16), sink);
        benchmark::DoNotOptimize(r.c.data().data());
        state.counters["l1_misses"] = static_cast<double>(h.stats().l1_total().misses);
    }
}
BENCHMARK(BM_TiledGemmSimulated)->Args({256, 0})->Args({256, 1});

void BM_ToBlockwise(benchmark::State& state) {
    const Matrix m = random_matrix(512, 768, 3);
    for (auto _ : state) {
        auto bw = to_blockwise(m, 16);
        benchmark::DoNotOptimize(bw.data().data());
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(m.size_bytes()));
}
BENCHMARK(BM_ToBlockwise);

}  // namespace
