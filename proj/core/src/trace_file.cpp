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
#include "bwma/trace_file.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <istream>
#include <ostream>

#include "bwma/errors.hpp"

namespace bwma {

TraceWriter::TraceWriter(std::ostream& out) : out_(out) { out_.write(kTraceMagic, sizeof(kTraceMagic)); }

void TraceWriter::write(const TraceRecord& rec) {
    std::array<char, kTraceRecordBytes> buf{};
    buf[0] = static_cast<char>(rec.core);
    buf[1] = static_cast<char>(rec.kind);
    for (int i = 0; i < 8; ++i) buf[2 + i] = static_cast<char>((rec.addr >> (8 * i)) & 0xff);
    out_.write(buf.data(), buf.size());
    ++records_;
}

void TraceWriter::write_run(std::uint8_t core, const AccessRun& run) {
    for (std::uint32_t i = 0; i < run.count; ++i) {
        write({core, run.kind, run.addr + static_cast<std::uint64_t>(i) * run.stride});
    }
}

TraceReader::TraceReader(std::istream& in) : in_(in) {
    char magic[sizeof(kTraceMagic)] = {};
    in_.read(magic, sizeof(magic));
    if (in_.gcount() != static_cast<std::streamsize>(sizeof(magic)) ||
        std::memcmp(magic, kTraceMagic, sizeof(magic)) != 0) {
        throw FormatError("not a BWMATRC1 trace (bad magic header)");
    }
}

bool TraceReader::next(TraceRecord& rec) {
    std::array<unsigned char, kTraceRecordBytes> buf{};
    in_.read(reinterpret_cast<char*>(buf.data()), buf.size());
    const auto got = in_.gcount();
    if (got == 0) return false;
    if (got != static_cast<std::streamsize>(buf.size())) throw FormatError("truncated trace record");
    if (buf[1] > 1) throw FormatError("invalid access kind in trace record");
    rec.core = buf[0];
    rec.kind = static_cast<AccessKind>(buf[1]);
    rec.addr = 0;
    for (int i = 0; i < 8; ++i) rec.addr |= static_cast<std::uint64_t>(buf[2 + i]) << (8 * i);
    return true;
}

std::vector<TraceRecord> read_trace(std::istream& in) {
    TraceReader reader(in);
    std::vector<TraceRecord> out;
    TraceRecord rec;
    while (reader.next(rec)) out.push_back(rec);
    return out;
}

TraceRunResult replay_trace(MemoryHierarchy& h, std::istream& in) {
    const CacheStats before = h.stats();
    const std::vector<std::uint64_t> cycles_before(h.core_cycles().begin(), h.core_cycles().end());
    TraceReader reader(in);
    TraceRecord rec;
    while (reader.next(rec)) {
        if (rec.core >= h.cores()) {
            throw FormatError("trace record for core " + std::to_string(rec.core) + " but hierarchy has " +
                              std::to_string(h.cores()) + " cores");
        }
        h.access(rec.core, rec.addr, rec.kind);
    }
    TraceRunResult out;
    out.stats = h.stats() - before;
    for (std::size_t c = 0; c < h.core_cycles().size(); ++c) {
        out.per_core_cycles.push_back(h.core_cycles()[c] - cycles_before[c]);
        out.mem_cycles = std::max(out.mem_cycles, out.per_core_cycles.back());
    }
    return out;
}

}  // namespace bwma
