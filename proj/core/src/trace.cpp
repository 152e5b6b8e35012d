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
#include "bwma/trace.hpp"

namespace bwma {

std::vector<TraceEvent> expand(std::span<const AccessRun> runs) {
    std::vector<TraceEvent> out;
    std::size_t total = 0;
    for (const auto& r : runs) total += r.count;
    out.reserve(total);
    for (const auto& r : runs) {
        for (std::uint32_t i = 0; i < r.count; ++i) {
            out.push_back({r.addr + static_cast<std::uint64_t>(i) * r.stride, r.kind});
        }
    }
    return out;
}

std::vector<TraceEvent> RecordingSink::events() const { return expand(runs_); }

std::vector<std::uint64_t> RecordingSink::addresses() const {
    std::vector<std::uint64_t> out;
    for (const auto& e : expand(runs_)) out.push_back(e.addr);
    return out;
}

std::vector<std::uint64_t> RecordingSink::addresses(AccessKind kind) const {
    std::vector<std::uint64_t> out;
    for (const auto& e : expand(runs_)) {
        if (e.kind == kind) out.push_back(e.addr);
    }
    return out;
}

std::uint64_t RecordingSink::size() const {
    std::uint64_t n = 0;
    for (const auto& r : runs_) n += r.count;
    return n;
}

std::size_t count_contiguous_runs(std::span<const std::uint64_t> addrs, std::uint32_t elem_width) {
    if (addrs.empty()) return 0;
    std::size_t runs = 1;
    for (std::size_t i = 1; i < addrs.size(); ++i) {
        if (addrs[i] != addrs[i - 1] + elem_width) ++runs;
    }
    return runs;
}

}  // namespace bwma
