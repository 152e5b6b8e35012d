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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bwma {

enum class AccessKind : std::uint8_t { Read = 0, Write = 1 };

/// A run of `count` element accesses at `addr`, `addr + stride`, ...
///
/// Runs are only a compact encoding: every consumer treats a run exactly as
/// the per-element byte-address sequence it expands to.
struct AccessRun {
    std::uint64_t addr = 0;
    std::uint32_t count = 0;
    std::uint32_t stride = 0;
    AccessKind kind = AccessKind::Read;

    friend bool operator==(const AccessRun&, const AccessRun&) = default;
};

struct TraceEvent {
    std::uint64_t addr = 0;
    AccessKind kind = AccessKind::Read;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void on_run(const AccessRun& run) = 0;

    void emit(std::uint64_t addr, std::uint32_t count, std::uint32_t stride, AccessKind kind) {
        if (count != 0) on_run(AccessRun{addr, count, stride, kind});
    }
};

class NullSink final : public TraceSink {
public:
    void on_run(const AccessRun&) override {}
};

/// Counts element reads and writes without storing anything.
class CountingSink final : public TraceSink {
public:
    void on_run(const AccessRun& run) override {
        (run.kind == AccessKind::Read ? reads_ : writes_) += run.count;
    }
    std::uint64_t reads() const { return reads_; }
    std::uint64_t writes() const { return writes_; }
    std::uint64_t total() const { return reads_ + writes_; }

private:
    std::uint64_t reads_ = 0;
    std::uint64_t writes_ = 0;
};

/// Keeps every run; intended for tests and small traces.
class RecordingSink final : public TraceSink {
public:
    void on_run(const AccessRun& run) override { runs_.push_back(run); }

    const std::vector<AccessRun>& runs() const { return runs_; }
    std::vector<TraceEvent> events() const;
    std::vector<std::uint64_t> addresses() const;
    std::vector<std::uint64_t> addresses(AccessKind kind) const;
    std::uint64_t size() const;
    void clear() { runs_.clear(); }

private:
    std::vector<AccessRun> runs_;
};

/// Fans one trace out to several sinks.
class TeeSink final : public TraceSink {
public:
    TeeSink(TraceSink& a, TraceSink& b) : a_(a), b_(b) {}
    void on_run(const AccessRun& run) override {
        a_.on_run(run);
        b_.on_run(run);
    }

private:
    TraceSink& a_;
    TraceSink& b_;
};

std::vector<TraceEvent> expand(std::span<const AccessRun> runs);

/// Number of maximal strictly sequential sub-sequences in an address list,
/// where "sequential" means the next address is exactly `elem_width` bytes on.
std::size_t count_contiguous_runs(std::span<const std::uint64_t> addrs, std::uint32_t elem_width);

}  // namespace bwma
