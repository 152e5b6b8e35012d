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
#include "bwma/cache.hpp"

#include <algorithm>
#include <bit>
#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "bwma/errors.hpp"

namespace bwma {

std::string_view to_string(PrefetchPolicy p) {
    switch (p) {
        case PrefetchPolicy::Off: return "off";
        case PrefetchPolicy::NextLine: return "next-line";
        case PrefetchPolicy::TaggedNextLine: return "tagged";
    }
    return "off";
}

void CacheLevelConfig::validate(std::string_view level) const {
    const std::string name(level);
    if (capacity_bytes == 0 || line_bytes == 0 || associativity == 0 || hit_latency == 0) {
        throw ConfigError(name + ": capacity, line size, associativity and latency must be positive");
    }
    if (!std::has_single_bit(line_bytes)) throw ConfigError(name + ": line size must be a power of two");
    if (capacity_bytes % (static_cast<std::uint64_t>(line_bytes) * associativity) != 0) {
        throw ConfigError(name + ": capacity must be divisible by line size x associativity");
    }
}

void HierarchyConfig::validate() const {
    l1.validate("L1");
    l2.validate("L2");
    if (l1.line_bytes != l2.line_bytes) throw ConfigError("L1 and L2 must use the same line size");
    if (cores == 0) throw ConfigError("core count must be >= 1");
}

LevelStats& LevelStats::operator+=(const LevelStats& o) {
    accesses += o.accesses;
    hits += o.hits;
    misses += o.misses;
    writebacks += o.writebacks;
    prefetches += o.prefetches;
    useful_prefetches += o.useful_prefetches;
    return *this;
}

LevelStats operator-(LevelStats a, const LevelStats& b) {
    a.accesses -= b.accesses;
    a.hits -= b.hits;
    a.misses -= b.misses;
    a.writebacks -= b.writebacks;
    a.prefetches -= b.prefetches;
    a.useful_prefetches -= b.useful_prefetches;
    return a;
}

LevelStats CacheStats::l1_total() const {
    LevelStats t;
    for (const auto& s : l1) t += s;
    return t;
}

CacheStats& CacheStats::operator+=(const CacheStats& o) {
    if (l1.size() < o.l1.size()) l1.resize(o.l1.size());
    for (std::size_t i = 0; i < o.l1.size(); ++i) l1[i] += o.l1[i];
    l2 += o.l2;
    mem_reads += o.mem_reads;
    mem_writes += o.mem_writes;
    return *this;
}

CacheStats operator-(CacheStats a, const CacheStats& b) {
    for (std::size_t i = 0; i < a.l1.size() && i < b.l1.size(); ++i) a.l1[i] = a.l1[i] - b.l1[i];
    a.l2 = a.l2 - b.l2;
    a.mem_reads -= b.mem_reads;
    a.mem_writes -= b.mem_writes;
    return a;
}

// One set-associative array with LRU stamps.
class MemoryHierarchy::Cache {
public:
    struct Line {
        std::uint64_t tag = 0;
        std::uint64_t stamp = 0;
        bool valid = false;
        bool dirty = false;
        bool prefetched = false;
    };
    struct Evicted {
        bool valid = false;
        bool dirty = false;
        std::uint64_t line = 0;
    };

    explicit Cache(const CacheLevelConfig& cfg)
        : sets_(cfg.num_sets()), assoc_(cfg.associativity), lines_(static_cast<std::size_t>(sets_) * assoc_) {}

    Line* find(std::uint64_t line) {
        Line* set = &lines_[(line % sets_) * assoc_];
        for (std::uint32_t w = 0; w < assoc_; ++w) {
            if (set[w].valid && set[w].tag == line) return &set[w];
        }
        return nullptr;
    }

    void touch(Line* l) { l->stamp = ++clock_; }

    Evicted install(std::uint64_t line, bool dirty, bool prefetched) {
        Line* set = &lines_[(line % sets_) * assoc_];
        Line* victim = &set[0];
        for (std::uint32_t w = 0; w < assoc_; ++w) {
            if (!set[w].valid) {
                victim = &set[w];
                break;
            }
            if (set[w].stamp < victim->stamp) victim = &set[w];
        }
        Evicted ev{victim->valid, victim->valid && victim->dirty, victim->tag};
        *victim = Line{line, ++clock_, true, dirty, prefetched};
        return ev;
    }

    void clear() {
        std::fill(lines_.begin(), lines_.end(), Line{});
        clock_ = 0;
    }

private:
    std::uint32_t sets_;
    std::uint32_t assoc_;
    std::vector<Line> lines_;
    std::uint64_t clock_ = 0;
};

MemoryHierarchy::MemoryHierarchy(HierarchyConfig config) : config_(config) {
    config_.validate();
    line_shift_ = static_cast<std::uint32_t>(std::countr_zero(config_.l1.line_bytes));
    for (std::uint32_t c = 0; c < config_.cores; ++c) l1_.push_back(std::make_unique<Cache>(config_.l1));
    l2_ = std::make_unique<Cache>(config_.l2);
    stats_.l1.assign(config_.cores, {});
    core_cycles_.assign(config_.cores, 0);
}

MemoryHierarchy::~MemoryHierarchy() = default;
MemoryHierarchy::MemoryHierarchy(MemoryHierarchy&&) noexcept = default;
MemoryHierarchy& MemoryHierarchy::operator=(MemoryHierarchy&&) noexcept = default;

void MemoryHierarchy::reset() {
    for (auto& c : l1_) c->clear();
    l2_->clear();
    stats_ = CacheStats{};
    stats_.l1.assign(config_.cores, {});
    std::fill(core_cycles_.begin(), core_cycles_.end(), 0);
}

std::uint64_t MemoryHierarchy::fill_from_l2(std::uint64_t line) {
    LevelStats& st = stats_.l2;
    ++st.accesses;
    if (Cache::Line* w = l2_->find(line)) {
        ++st.hits;
        l2_->touch(w);
        return config_.l2.hit_latency;
    }
    ++st.misses;
    ++stats_.mem_reads;
    const auto ev = l2_->install(line, false, false);
    if (ev.dirty) {
        ++st.writebacks;
        ++stats_.mem_writes;
    }
    return static_cast<std::uint64_t>(config_.l2.hit_latency) + config_.mem_latency;
}

void MemoryHierarchy::writeback_to_l2(std::uint64_t line) {
    LevelStats& st = stats_.l2;
    ++st.accesses;
    if (Cache::Line* w = l2_->find(line)) {
        ++st.hits;
        w->dirty = true;
        l2_->touch(w);
        return;
    }
    // Full-line write: allocate without fetching from memory.
    ++st.misses;
    const auto ev = l2_->install(line, true, false);
    if (ev.dirty) {
        ++st.writebacks;
        ++stats_.mem_writes;
    }
}

void MemoryHierarchy::install_l1(std::uint32_t core, std::uint64_t line, bool dirty, bool prefetched) {
    const auto ev = l1_[core]->install(line, dirty, prefetched);
    if (ev.dirty) {
        ++stats_.l1[core].writebacks;
        writeback_to_l2(ev.line);
    }
}

void MemoryHierarchy::prefetch(std::uint32_t core, std::uint64_t line) {
    if (l1_[core]->find(line) != nullptr) return;
    ++stats_.l1[core].prefetches;
    fill_from_l2(line);
    install_l1(core, line, false, true);
}

std::uint64_t MemoryHierarchy::access_line(std::uint32_t core, std::uint64_t line, AccessKind kind,
                                           std::uint64_t n) {
    Cache& l1 = *l1_[core];
    LevelStats& st = stats_.l1[core];
    const bool write = kind == AccessKind::Write;
    const std::uint64_t l1_lat = config_.l1.hit_latency;
    std::uint64_t lat = l1_lat;

    ++st.accesses;
    if (Cache::Line* w = l1.find(line)) {
        ++st.hits;
        l1.touch(w);
        if (write) w->dirty = true;
        if (w->prefetched) {
            w->prefetched = false;
            ++st.useful_prefetches;
            if (config_.prefetch == PrefetchPolicy::TaggedNextLine) prefetch(core, line + 1);
        }
    } else {
        ++st.misses;
        lat += fill_from_l2(line);
        install_l1(core, line, write, false);
        if (config_.prefetch != PrefetchPolicy::Off) prefetch(core, line + 1);
    }

    if (n > 1) {
        // The rest of the run stays in this line with no other access of this
        // core in between, so they all hit unless the prefetch above evicted
        // the line (only possible with a single set).
        if (Cache::Line* w = l1.find(line); w != nullptr && !w->prefetched) {
            st.accesses += n - 1;
            st.hits += n - 1;
            l1.touch(w);
            if (write) w->dirty = true;
            lat += (n - 1) * l1_lat;
        } else {
            for (std::uint64_t i = 1; i < n; ++i) lat += access_line(core, line, kind, 1);
        }
    }
    return lat;
}

std::uint64_t MemoryHierarchy::access(std::uint32_t core, std::uint64_t addr, AccessKind kind) {
    if (tap_) tap_(core, AccessRun{addr, 1, 0, kind});
    const std::uint64_t lat = access_line(core, addr >> line_shift_, kind, 1);
    core_cycles_[core] += lat;
    return lat;
}

std::uint64_t MemoryHierarchy::access_run(std::uint32_t core, const AccessRun& run) {
    if (tap_) tap_(core, run);
    std::uint64_t lat = 0;
    std::uint64_t addr = run.addr;
    std::uint64_t remaining = run.count;
    const std::uint64_t line_bytes = config_.l1.line_bytes;
    while (remaining > 0) {
        const std::uint64_t line = addr >> line_shift_;
        std::uint64_t n = 1;
        if (run.stride == 0) {
            n = remaining;
        } else if (run.stride < line_bytes) {
            const std::uint64_t line_end = (line + 1) << line_shift_;
            n = std::min(remaining, (line_end - addr + run.stride - 1) / run.stride);
        }
        lat += access_line(core, line, run.kind, n);
        addr += n * run.stride;
        remaining -= n;
    }
    core_cycles_[core] += lat;
    return lat;
}

void interleave(MemoryHierarchy& h, std::span<RunSource* const> sources, std::uint32_t chunk) {
    if (chunk == 0) throw ConfigError("interleave chunk must be >= 1");
    if (sources.size() > h.cores()) throw ConfigError("more traces than cores");
    struct Pending {
        AccessRun run{};
        bool live = true;
    };
    std::vector<Pending> pending(sources.size());
    std::size_t live = sources.size();
    while (live > 0) {
        for (std::size_t core = 0; core < sources.size(); ++core) {
            Pending& p = pending[core];
            if (!p.live) continue;
            std::uint32_t budget = chunk;
            while (budget > 0) {
                if (p.run.count == 0 && !sources[core]->next(p.run)) {
                    p.live = false;
                    --live;
                    break;
                }
                if (p.run.count == 0) continue;
                const std::uint32_t n = std::min(budget, p.run.count);
                AccessRun part = p.run;
                part.count = n;
                h.access_run(static_cast<std::uint32_t>(core), part);
                p.run.addr += static_cast<std::uint64_t>(n) * p.run.stride;
                p.run.count -= n;
                budget -= n;
            }
        }
    }
}

namespace {

TraceRunResult finish(const MemoryHierarchy& h, const CacheStats& before,
                      const std::vector<std::uint64_t>& cycles_before) {
    TraceRunResult out;
    out.stats = h.stats() - before;
    for (std::size_t c = 0; c < h.core_cycles().size(); ++c) {
        out.per_core_cycles.push_back(h.core_cycles()[c] - cycles_before[c]);
        out.mem_cycles = std::max(out.mem_cycles, out.per_core_cycles.back());
    }
    return out;
}

}  // namespace

TraceRunResult run_trace(MemoryHierarchy& h, std::span<const std::vector<AccessRun>> per_core,
                         std::uint32_t chunk) {
    const CacheStats before = h.stats();
    const std::vector<std::uint64_t> cycles_before(h.core_cycles().begin(), h.core_cycles().end());
    std::vector<VectorRunSource> sources;
    sources.reserve(per_core.size());
    for (const auto& t : per_core) sources.emplace_back(t);
    std::vector<RunSource*> ptrs;
    for (auto& s : sources) ptrs.push_back(&s);
    interleave(h, ptrs, chunk);
    return finish(h, before, cycles_before);
}

TraceRunResult run_trace(MemoryHierarchy& h, std::span<const std::vector<TraceEvent>> per_core,
                         std::uint32_t chunk) {
    std::vector<std::vector<AccessRun>> runs(per_core.size());
    for (std::size_t c = 0; c < per_core.size(); ++c) {
        runs[c].reserve(per_core[c].size());
        for (const auto& e : per_core[c]) runs[c].push_back({e.addr, 1, 0, e.kind});
    }
    return run_trace(h, runs, chunk);
}

namespace {

class Cancelled : public std::exception {};

// Bounded single-producer single-consumer queue of run batches.
class BatchQueue {
public:
    void push(std::vector<AccessRun>&& batch) {
        std::unique_lock lock(mu_);
        not_full_.wait(lock, [&] { return q_.size() < kCapacity || cancelled_; });
        if (cancelled_) throw Cancelled();
        q_.push_back(std::move(batch));
        not_empty_.notify_one();
    }

    bool pop(std::vector<AccessRun>& out) {
        std::unique_lock lock(mu_);
        not_empty_.wait(lock, [&] { return !q_.empty() || closed_; });
        if (q_.empty()) return false;
        out = std::move(q_.front());
        q_.pop_front();
        not_full_.notify_one();
        return true;
    }

    void close(std::exception_ptr err) {
        std::lock_guard lock(mu_);
        closed_ = true;
        error_ = err;
        not_empty_.notify_all();
    }

    void cancel() {
        std::lock_guard lock(mu_);
        cancelled_ = true;
        not_full_.notify_all();
    }

    std::exception_ptr error() {
        std::lock_guard lock(mu_);
        return error_;
    }

private:
    static constexpr std::size_t kCapacity = 4;
    std::mutex mu_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
    std::deque<std::vector<AccessRun>> q_;
    bool closed_ = false;
    bool cancelled_ = false;
    std::exception_ptr error_;
};

class QueueSink final : public TraceSink {
public:
    explicit QueueSink(BatchQueue& q) : q_(q) { batch_.reserve(kBatch); }
    void on_run(const AccessRun& run) override {
        batch_.push_back(run);
        if (batch_.size() == kBatch) flush();
    }
    void flush() {
        if (batch_.empty()) return;
        q_.push(std::move(batch_));
        batch_ = {};
        batch_.reserve(kBatch);
    }

private:
    static constexpr std::size_t kBatch = 8192;
    BatchQueue& q_;
    std::vector<AccessRun> batch_;
};

class QueueSource final : public RunSource {
public:
    explicit QueueSource(BatchQueue& q) : q_(q) {}
    bool next(AccessRun& out) override {
        while (pos_ == batch_.size()) {
            if (!q_.pop(batch_)) return false;
            pos_ = 0;
        }
        out = batch_[pos_++];
        return true;
    }

private:
    BatchQueue& q_;
    std::vector<AccessRun> batch_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint64_t> run_concurrent(MemoryHierarchy& h,
                                          std::span<const std::function<void(TraceSink&)>> generators,
                                          std::uint32_t chunk) {
    if (generators.size() > h.cores()) throw ConfigError("more trace generators than cores");
    const std::vector<std::uint64_t> before(h.core_cycles().begin(), h.core_cycles().end());

    if (generators.size() == 1) {
        HierarchySink sink(h, 0);
        generators[0](sink);
    } else {
        std::vector<std::unique_ptr<BatchQueue>> queues;
        std::vector<std::unique_ptr<QueueSource>> sources;
        std::vector<RunSource*> ptrs;
        for (std::size_t i = 0; i < generators.size(); ++i) {
            queues.push_back(std::make_unique<BatchQueue>());
            sources.push_back(std::make_unique<QueueSource>(*queues.back()));
            ptrs.push_back(sources.back().get());
        }
        std::vector<std::thread> threads;
        for (std::size_t i = 0; i < generators.size(); ++i) {
            threads.emplace_back([&, i] {
                BatchQueue& q = *queues[i];
                try {
                    QueueSink sink(q);
                    generators[i](sink);
                    sink.flush();
                    q.close(nullptr);
                } catch (const Cancelled&) {
                    q.close(nullptr);
                } catch (...) {
                    q.close(std::current_exception());
                }
            });
        }
        std::exception_ptr consumer_error;
        try {
            interleave(h, ptrs, chunk);
        } catch (...) {
            consumer_error = std::current_exception();
            for (auto& q : queues) q->cancel();
        }
        for (auto& t : threads) t.join();
        if (consumer_error) std::rethrow_exception(consumer_error);
        for (auto& q : queues) {
            if (auto err = q->error()) std::rethrow_exception(err);
        }
    }

    std::vector<std::uint64_t> out(h.cores());
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = h.core_cycles()[c] - before[c];
    return out;
}

}  // namespace bwma
