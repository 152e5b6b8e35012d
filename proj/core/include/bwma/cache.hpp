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
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "bwma/trace.hpp"

namespace bwma {

struct CacheLevelConfig {
    std::uint64_t capacity_bytes = 0;
    std::uint32_t line_bytes = 64;
    std::uint32_t associativity = 1;
    std::uint32_t hit_latency = 1;

    /// Throws ConfigError on non-positive fields, a non power-of-two line
    /// size, or a capacity not divisible by line_bytes * associativity.
    void validate(std::string_view level) const;
    std::uint32_t num_sets() const {
        return static_cast<std::uint32_t>(capacity_bytes / (static_cast<std::uint64_t>(line_bytes) * associativity));
    }

    friend bool operator==(const CacheLevelConfig&, const CacheLevelConfig&) = default;
};

enum class PrefetchPolicy : std::uint8_t {
    Off,
    /// On a demand miss to line L, fetch L+1 into L1 tagged as non-demand.
    NextLine,
    /// NextLine, plus the first demand hit to a tagged line clears the tag and
    /// fetches the following line (classic tagged sequential prefetch).
    TaggedNextLine,
};

std::string_view to_string(PrefetchPolicy p);

struct HierarchyConfig {
    CacheLevelConfig l1{32 * 1024, 64, 4, 2};
    CacheLevelConfig l2{1024 * 1024, 64, 8, 20};
    std::uint32_t cores = 1;
    std::uint32_t mem_latency = 100;
    PrefetchPolicy prefetch = PrefetchPolicy::Off;

    void validate() const;
    friend bool operator==(const HierarchyConfig&, const HierarchyConfig&) = default;
};

struct LevelStats {
    std::uint64_t accesses = 0;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t writebacks = 0;
    /// L1 only: prefetch fills issued / later hit by a demand access.
    std::uint64_t prefetches = 0;
    std::uint64_t useful_prefetches = 0;

    double miss_rate() const { return accesses == 0 ? 0.0 : static_cast<double>(misses) / accesses; }

    LevelStats& operator+=(const LevelStats& o);
    friend LevelStats operator-(LevelStats a, const LevelStats& b);
    friend bool operator==(const LevelStats&, const LevelStats&) = default;
};

struct CacheStats {
    std::vector<LevelStats> l1;  // one per core
    LevelStats l2;
    std::uint64_t mem_reads = 0;   // line fills from main memory
    std::uint64_t mem_writes = 0;  // dirty L2 evictions

    LevelStats l1_total() const;
    CacheStats& operator+=(const CacheStats& o);
    friend CacheStats operator-(CacheStats a, const CacheStats& b);
    friend bool operator==(const CacheStats&, const CacheStats&) = default;
};

/// Per-core private L1-D caches in front of one shared L2 and an unbounded
/// main memory. Set-associative, true LRU, write-back, write-allocate.
///
/// Latency of a demand access is the sum of hit latencies down to the level
/// that serves it. Writebacks and prefetch fills are not charged to the core.
/// Observer of every run a hierarchy consumes, in consumption order.
using AccessTap = std::function<void(std::uint32_t core, const AccessRun& run)>;

class MemoryHierarchy {
public:
    explicit MemoryHierarchy(HierarchyConfig config);
    ~MemoryHierarchy();
    MemoryHierarchy(MemoryHierarchy&&) noexcept;
    MemoryHierarchy& operator=(MemoryHierarchy&&) noexcept;

    const HierarchyConfig& config() const { return config_; }
    std::uint32_t cores() const { return config_.cores; }

    std::uint64_t access(std::uint32_t core, std::uint64_t addr, AccessKind kind);
    /// Equivalent to calling access() on every element of the run, in order.
    std::uint64_t access_run(std::uint32_t core, const AccessRun& run);

    /// Invalidates all lines and zeroes every counter.
    void reset();

    const CacheStats& stats() const { return stats_; }
    /// Latency accumulated by each core since construction / reset().
    std::span<const std::uint64_t> core_cycles() const { return core_cycles_; }
    void set_tap(AccessTap tap) { tap_ = std::move(tap); }

private:
    class Cache;

    std::uint64_t access_line(std::uint32_t core, std::uint64_t line, AccessKind kind, std::uint64_t n);
    std::uint64_t fill_from_l2(std::uint64_t line);
    void writeback_to_l2(std::uint64_t line);
    void install_l1(std::uint32_t core, std::uint64_t line, bool dirty, bool prefetched);
    void prefetch(std::uint32_t core, std::uint64_t line);

    HierarchyConfig config_;
    std::uint32_t line_shift_ = 6;
    std::vector<std::unique_ptr<Cache>> l1_;
    std::unique_ptr<Cache> l2_;
    CacheStats stats_;
    std::vector<std::uint64_t> core_cycles_;
    AccessTap tap_;
};

/// Feeds one core's trace straight into a hierarchy.
class HierarchySink final : public TraceSink {
public:
    HierarchySink(MemoryHierarchy& h, std::uint32_t core) : h_(h), core_(core) {}
    void on_run(const AccessRun& run) override { h_.access_run(core_, run); }

private:
    MemoryHierarchy& h_;
    std::uint32_t core_;
};

inline constexpr std::uint32_t kDefaultInterleaveChunk = 64;

/// Pull interface for one core's trace.
class RunSource {
public:
    virtual ~RunSource() = default;
    virtual bool next(AccessRun& out) = 0;
};

class VectorRunSource final : public RunSource {
public:
    explicit VectorRunSource(std::span<const AccessRun> runs) : runs_(runs) {}
    bool next(AccessRun& out) override {
        if (pos_ == runs_.size()) return false;
        out = runs_[pos_++];
        return true;
    }

private:
    std::span<const AccessRun> runs_;
    std::size_t pos_ = 0;
};

/// Consumes per-core traces in round-robin order, `chunk` element accesses
/// per core per round (exhausted cores are skipped). sources[i] is core i.
void interleave(MemoryHierarchy& h, std::span<RunSource* const> sources,
                std::uint32_t chunk = kDefaultInterleaveChunk);

struct TraceRunResult {
    CacheStats stats;            // delta produced by this trace
    std::uint64_t mem_cycles = 0;  // max over cores of accumulated latency
    std::vector<std::uint64_t> per_core_cycles;
};

TraceRunResult run_trace(MemoryHierarchy& h, std::span<const std::vector<AccessRun>> per_core,
                         std::uint32_t chunk = kDefaultInterleaveChunk);
TraceRunResult run_trace(MemoryHierarchy& h, std::span<const std::vector<TraceEvent>> per_core,
                         std::uint32_t chunk = kDefaultInterleaveChunk);

/// Runs each core's trace generator on its own thread and consumes the
/// traces with interleave(). Consumption order depends only on the traces,
/// never on thread scheduling. Generators must not share mutable state.
/// Returns per-core accumulated latency deltas.
std::vector<std::uint64_t> run_concurrent(MemoryHierarchy& h,
                                          std::span<const std::function<void(TraceSink&)>> generators,
                                          std::uint32_t chunk = kDefaultInterleaveChunk);

}  // namespace bwma
