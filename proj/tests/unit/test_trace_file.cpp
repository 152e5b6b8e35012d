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

#include <sstream>

#include "bwma/errors.hpp"
#include "bwma/trace_file.hpp"

using namespace bwma;

TEST(TraceFile, RoundTrip) {
    std::stringstream buf;
    TraceWriter w(buf);
    w.write({1, AccessKind::Write, 0x123456789abcull});
    w.write_run(0, {64, 3, 4, AccessKind::Read});
    EXPECT_EQ(w.records(), 4u);
    EXPECT_EQ(buf.str().size(), 8 + 4 * kTraceRecordBytes);
    EXPECT_EQ(buf.str().substr(0, 8), "BWMATRC1");

    const auto recs = read_trace(buf);
    ASSERT_EQ(recs.size(), 4u);
    EXPECT_EQ(recs[0], (TraceRecord{1, AccessKind::Write, 0x123456789abcull}));
    EXPECT_EQ(recs[3], (TraceRecord{0, AccessKind::Read, 72}));
}

TEST(TraceFile, LittleEndianAddress) {
    std::stringstream buf;
    TraceWriter w(buf);
    w.write({2, AccessKind::Read, 0x0102030405060708ull});
    const std::string s = buf.str();
    EXPECT_EQ(static_cast<unsigned char>(s[8]), 2);
    EXPECT_EQ(static_cast<unsigned char>(s[9]), 0);
    EXPECT_EQ(static_cast<unsigned char>(s[10]), 0x08);
    EXPECT_EQ(static_cast<unsigned char>(s[17]), 0x01);
}

TEST(TraceFile, BadMagic) {
    std::stringstream buf("NOTATRACE");
    EXPECT_THROW(TraceReader{buf}, FormatError);
}

TEST(TraceFile, TruncatedRecord) {
    std::stringstream buf;
    TraceWriter w(buf);
    w.write({0, AccessKind::Read, 64});
    std::string s = buf.str();
    s.pop_back();
    std::stringstream cut(s);
    EXPECT_THROW(read_trace(cut), FormatError);
}

TEST(TraceFile, BadKind) {
    std::string s = "BWMATRC1";
    s += std::string("\x00\x07", 2) + std::string(8, '\0');
    std::stringstream buf(s);
    EXPECT_THROW(read_trace(buf), FormatError);
}

TEST(TraceFile, ReplayMatchesDirectSimulation) {
    HierarchyConfig cfg;
    cfg.cores = 2;
    std::stringstream buf;
    TraceWriter w(buf);
    MemoryHierarchy direct(cfg);
    for (std::uint32_t i = 0; i < 500; ++i) {
        const AccessRun run{i * 40ull, 5, 8, i % 3 == 0 ? AccessKind::Write : AccessKind::Read};
        const auto core = static_cast<std::uint8_t>(i % 2);
        w.write_run(core, run);
        direct.access_run(core, run);
    }
    MemoryHierarchy replayed(cfg);
    const auto res = replay_trace(replayed, buf);
    EXPECT_EQ(replayed.stats(), direct.stats());
    EXPECT_EQ(res.per_core_cycles[0], direct.core_cycles()[0]);
    EXPECT_EQ(res.per_core_cycles[1], direct.core_cycles()[1]);
}

TEST(TraceFile, ReplayRejectsUnknownCore) {
    std::stringstream buf;
    TraceWriter w(buf);
    w.write({3, AccessKind::Read, 0});
    MemoryHierarchy h(HierarchyConfig{});
    EXPECT_THROW(replay_trace(h, buf), FormatError);
}
