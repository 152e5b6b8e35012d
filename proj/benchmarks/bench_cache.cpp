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

#include "bwma/cache.hpp"

namespace {

using namespace bwma;

// Element accesses per second for sequential runs (fast path) and random
// single accesses (one lookup each).
void BM_SequentialRuns(benchmark::State& state) {
    MemoryHierarchy h(HierarchyConfig{});
    std::uint64_t addr = 0;
    for (auto _ : state) {
        h.access_run(0, {addr, 1024, 4, AccessKind::Read});
        addr = (addr + 4096) % (64ull << 20);
    }
    state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_SequentialRuns);

void BM_RandomAccesses(benchmark::State& state) {
    MemoryHierarchy h(HierarchyConfig{});
    std::mt19937_64 rng(1);
    std::vector<std::uint64_t> addrs(1 << 16);
    for (auto& a : addrs) a = (rng() % (8ull << 20)) & ~std::uint64_t{3};
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(h.access(0, addrs[i], AccessKind::Read));
        i = (i + 1) & (addrs.size() - 1);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RandomAccesses);

void BM_Interleave(benchmark::State& state) {
    const auto cores = static_cast<std::uint32_t>(state.range(0));
    HierarchyConfig cfg;
    cfg.cores = cores;
    std::vector<std::vector<AccessRun>> runs(cores);
    for (std::uint32_t c = 0; c < cores; ++c) {
        for (std::uint64_t r = 0; r < 4096; ++r) runs[c].push_back({(c * 4096 + r) * 256, 16, 4, AccessKind::Read});
    }
    for (auto _ : state) {
        MemoryHierarchy h(cfg);
        benchmark::DoNotOptimize(run_trace(h, runs).mem_cycles);
    }
    state.SetItemsProcessed(state.iterations() * cores * 4096 * 16);
}
BENCHMARK(BM_Interleave)->Arg(1)->Arg(2)->Arg(4);

}  // namespace
