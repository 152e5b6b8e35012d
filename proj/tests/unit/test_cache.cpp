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

#include "bwma/cache.hpp"
#include "bwma/errors.hpp"
#include "bwma/reference/reference.hpp"

using namespace bwma;

namespace {

HierarchyConfig tiny(std::uint32_t sets, std::uint32_t ways, std::uint32_t cores = 1) {
    HierarchyConfig cfg;
    cfg.l1 = {std::uint64_t{sets} * ways * 64, 64, ways, 2};
    cfg.l2 = {64 * 64, 64, 8, 20};
    cfg.cores = cores;
    return cfg;
}

std::vector<std::vector<AccessRun>> random_runs(std::mt19937_64& rng, std::uint32_t cores, int n) {
    std::uniform_int_distribution<std::uint64_t> addr(0, 8191);
    const std::uint32_t strides[] = {0, 4, 12, 64, 100};
    std::vector<std::vector<AccessRun>> out(cores);
    for (auto& per : out) {
        for (int i = 0; i < n; ++i) {
            per.push_back({addr(rng) & ~std::uint64_t{3}, 1 + static_cast<std::uint32_t>(rng() % 40),
                           strides[rng() % 5], rng() % 3 == 0 ? AccessKind::Write : AccessKind::Read});
        }
    }
    return out;
}

}  // namespace

TEST(Cache, DefaultsMatchEvaluationSetup) {
    const HierarchyConfig cfg;
    EXPECT_EQ(cfg.l1.capacity_bytes, 32u * 1024);
    EXPECT_EQ(cfg.l1.hit_latency, 2u);
    EXPECT_EQ(cfg.l2.capacity_bytes, 1024u * 1024);
    EXPECT_EQ(cfg.l2.hit_latency, 20u);
    EXPECT_EQ(cfg.mem_latency, 100u);
    EXPECT_EQ(cfg.prefetch, PrefetchPolicy::Off);
}

TEST(Cache, InvalidGeometryRejected) {
    HierarchyConfig cfg;
    cfg.l1.line_bytes = 48;
    EXPECT_THROW(MemoryHierarchy{cfg}, ConfigError);
    cfg = HierarchyConfig{};
    cfg.l2.line_bytes = 128;
    EXPECT_THROW(MemoryHierarchy{cfg}, ConfigError);
    cfg = HierarchyConfig{};
    cfg.cores = 0;
    EXPECT_THROW(MemoryHierarchy{cfg}, ConfigError);
}

TEST(Cache, ColdMissThenHit) {
    MemoryHierarchy h(HierarchyConfig{});
    EXPECT_EQ(h.access(0, 0x1000, AccessKind::Read), 122u);
    EXPECT_EQ(h.access(0, 0x1000, AccessKind::Read), 2u);
    EXPECT_EQ(h.stats().l1[0].misses, 1u);
    EXPECT_EQ(h.stats().l2.misses, 1u);
    EXPECT_EQ(h.stats().mem_reads, 1u);
}

TEST(Cache, LruEvictsOldest) {
    MemoryHierarchy h(tiny(2, 2));
    const std::uint64_t a = 0, b = 128, c = 256;  // same set
    for (auto addr : {a, b, c, a}) h.access(0, addr, AccessKind::Read);
    EXPECT_EQ(h.stats().l1[0].misses, 4u);
    h.access(0, c, AccessKind::Read);
    EXPECT_EQ(h.stats().l1[0].hits, 1u);
}

TEST(Cache, RecentUseProtectsLine) {
    MemoryHierarchy h(tiny(1, 2));
    for (std::uint64_t addr : {0u, 64u, 0u, 128u, 0u}) h.access(0, addr, AccessKind::Read);
    EXPECT_EQ(h.stats().l1[0].hits, 2u);
    EXPECT_EQ(h.stats().l1[0].misses, 3u);
}

TEST(Cache, EmptyTrace) {
    MemoryHierarchy h(HierarchyConfig{});
    const auto res = run_trace(h, std::vector<std::vector<AccessRun>>{});
    EXPECT_EQ(res.mem_cycles, 0u);
    EXPECT_EQ(res.stats.l1_total().accesses, 0u);
}

TEST(Cache, WorkingSetFits) {
    MemoryHierarchy h(HierarchyConfig{});
    const std::uint32_t n = 100;
    std::vector<std::vector<TraceEvent>> t(1);
    for (int pass = 0; pass < 2; ++pass) {
        for (std::uint32_t i = 0; i < n; ++i) t[0].push_back({i * 64ull, AccessKind::Read});
    }
    run_trace(h, t);
    EXPECT_EQ(h.stats().l1[0].misses, n);
    EXPECT_EQ(h.stats().l1[0].hits, n);
}

TEST(Cache, SequentialLine) {
    MemoryHierarchy h(HierarchyConfig{});
    h.access_run(0, {0x4000, 16, 4, AccessKind::Read});
    EXPECT_EQ(h.stats().l1[0].misses, 1u);
    EXPECT_EQ(h.stats().l1[0].hits, 15u);
    EXPECT_EQ(h.core_cycles()[0], 122u + 15u * 2u);
}

TEST(Cache, DirtyEvictionWritesBack) {
    MemoryHierarchy h(tiny(1, 1));
    h.access(0, 0, AccessKind::Write);
    h.access(0, 64, AccessKind::Read);
    EXPECT_EQ(h.stats().l1[0].writebacks, 1u);
    EXPECT_EQ(h.stats().l2.accesses, 3u);  // two fills, one writeback
    EXPECT_EQ(h.stats().l2.hits, 1u);      // line 0 is still in L2
}

TEST(Cache, ResetClearsEverything) {
    MemoryHierarchy h(HierarchyConfig{});
    h.access(0, 0, AccessKind::Read);
    h.reset();
    CacheStats zero;
    zero.l1.assign(1, {});
    EXPECT_EQ(h.stats(), zero);
    EXPECT_EQ(h.access(0, 0, AccessKind::Read), 122u);
}

TEST(Cache, RunsAreDeterministic) {
    std::mt19937_64 rng(9);
    const auto runs = random_runs(rng, 2, 200);
    MemoryHierarchy h(tiny(4, 2, 2));
    const auto r1 = run_trace(h, runs);
    h.reset();
    const auto r2 = run_trace(h, runs);
    EXPECT_EQ(r1.stats, r2.stats);
    EXPECT_EQ(r1.per_core_cycles, r2.per_core_cycles);
}

TEST(Cache, MatchesReferenceSimulator) {
    std::mt19937_64 rng(10);
    for (int t = 0; t < 60; ++t) {
        HierarchyConfig cfg = tiny(1u << (t % 3), 1 + t % 4, 1u << (t % 3));
        cfg.prefetch = static_cast<PrefetchPolicy>(t % 3);
        const auto runs = random_runs(rng, cfg.cores, 150);
        std::vector<std::vector<TraceEvent>> events;
        for (const auto& r : runs) events.push_back(expand(r));
        MemoryHierarchy h(cfg);
        const auto res = run_trace(h, runs, 1 + t % 70);
        reference::RefHierarchy ref(cfg);
        reference::ref_interleave(ref, events, 1 + t % 70);
        ASSERT_EQ(h.stats(), ref.stats()) << "trace " << t;
        for (std::uint32_t c = 0; c < cfg.cores; ++c) ASSERT_EQ(res.per_core_cycles[c], ref.core_cycles()[c]);
    }
}

TEST(Cache, L2TrafficConservation) {
    std::mt19937_64 rng(12);
    for (auto pf : {PrefetchPolicy::Off, PrefetchPolicy::NextLine, PrefetchPolicy::TaggedNextLine}) {
        HierarchyConfig cfg = tiny(4, 2, 2);
        cfg.prefetch = pf;
        MemoryHierarchy h(cfg);
        run_trace(h, random_runs(rng, 2, 300));
        const auto& s = h.stats();
        const LevelStats l1 = s.l1_total();
        EXPECT_EQ(s.l2.accesses, l1.misses + l1.writebacks + l1.prefetches);
        EXPECT_EQ(l1.accesses, l1.hits + l1.misses);
        if (pf == PrefetchPolicy::Off) {
            EXPECT_EQ(l1.prefetches, 0u);
        }
    }
}

TEST(Cache, NextLinePrefetchTurnsSequentialMissesIntoHits) {
    HierarchyConfig cfg;
    cfg.prefetch = PrefetchPolicy::TaggedNextLine;
    MemoryHierarchy h(cfg);
    h.access_run(0, {0, 16 * 64, 4, AccessKind::Read});  // 64 lines
    EXPECT_EQ(h.stats().l1[0].misses, 1u);
    EXPECT_EQ(h.stats().l1[0].useful_prefetches, 63u);

    cfg.prefetch = PrefetchPolicy::NextLine;
    MemoryHierarchy h2(cfg);
    h2.access_run(0, {0, 16 * 64, 4, AccessKind::Read});
    EXPECT_EQ(h2.stats().l1[0].misses, 32u);
}

TEST(Cache, ConcurrentGeneratorsMatchRecordedTraces) {
    std::mt19937_64 rng(13);
    const auto runs = random_runs(rng, 4, 3000);
    HierarchyConfig cfg = tiny(8, 4, 4);
    MemoryHierarchy a(cfg), b(cfg);
    const auto want = run_trace(a, runs);
    std::vector<std::function<void(TraceSink&)>> gens;
    for (const auto& per : runs) {
        gens.push_back([&per](TraceSink& s) {
            for (const auto& r : per) s.on_run(r);
        });
    }
    const auto got = run_concurrent(b, gens);
    EXPECT_EQ(a.stats(), b.stats());
    EXPECT_EQ(got, want.per_core_cycles);
}

TEST(Cache, ConcurrentGeneratorErrorPropagates) {
    MemoryHierarchy h(tiny(4, 2, 2));
    std::vector<std::function<void(TraceSink&)>> gens = {
        [](TraceSink& s) { s.emit(0, 100000, 4, AccessKind::Read); },
        [](TraceSink&) { throw ShapeError("boom"); },
    };
    EXPECT_THROW(run_concurrent(h, gens), ShapeError);
}

TEST(Cache, TooManyTracesRejected) {
    MemoryHierarchy h(tiny(4, 2, 1));
    EXPECT_THROW(run_trace(h, std::vector<std::vector<AccessRun>>(2)), ConfigError);
}
