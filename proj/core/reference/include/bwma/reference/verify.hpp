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
#include <string>
#include <vector>

namespace bwma::reference {

enum class Fault : std::uint8_t {
    None,
    /// Block-wise storage is written through an offset map with two entries
    /// swapped, as a broken layout implementation would.
    OffsetMap,
};

struct VerifyOptions {
    std::uint64_t seed = 7;
    Fault fault = Fault::None;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0;
};

/// Toy-scale oracle and property checks: GEMM vs naive loops, layout
/// round-trips and offsets, cache simulator vs list-based LRU, layout and
/// core-count invariance of the encoder, encoder vs dense reference.
std::vector<CheckResult> run_verify(const VerifyOptions& opts = {});

}  // namespace bwma::reference
