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
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include "bwma/cache.hpp"
#include "bwma/trace.hpp"

namespace bwma {

/// Offline trace format:
///
///   magic   8 bytes  "BWMATRC1"
///   records 10 bytes each, until end of file:
///             u8  core id
///             u8  kind (0 = read, 1 = write)
///             u64 byte address, little-endian
///
/// Runs are expanded to one record per element access.
inline constexpr char kTraceMagic[8] = {'B', 'W', 'M', 'A', 'T', 'R', 'C', '1'};
inline constexpr std::size_t kTraceRecordBytes = 10;

struct TraceRecord {
    std::uint8_t core = 0;
    AccessKind kind = AccessKind::Read;
    std::uint64_t addr = 0;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

class TraceWriter {
public:
    explicit TraceWriter(std::ostream& out);
    void write(const TraceRecord& rec);
    void write_run(std::uint8_t core, const AccessRun& run);
    std::uint64_t records() const { return records_; }

private:
    std::ostream& out_;
    std::uint64_t records_ = 0;
};

/// Sink that records one core's accesses to a TraceWriter.
class TraceFileSink final : public TraceSink {
public:
    TraceFileSink(TraceWriter& w, std::uint8_t core) : w_(w), core_(core) {}
    void on_run(const AccessRun& run) override { w_.write_run(core_, run); }

private:
    TraceWriter& w_;
    std::uint8_t core_;
};

class TraceReader {
public:
    /// Throws FormatError if the magic header is missing.
    explicit TraceReader(std::istream& in);
    /// False at clean end of file; FormatError on a truncated record.
    bool next(TraceRecord& rec);

private:
    std::istream& in_;
};

std::vector<TraceRecord> read_trace(std::istream& in);

/// Replays records in file order (the file already fixes the interleaving).
/// Core ids must be below h.cores().
TraceRunResult replay_trace(MemoryHierarchy& h, std::istream& in);

}  // namespace bwma
