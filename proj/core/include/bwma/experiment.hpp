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

#include <vector>

#include "bwma/config.hpp"
#include "bwma/report.hpp"

namespace bwma {

/// Executes one inference with cfg.run.
RunReport cmd_run(const ExperimentConfig& cfg);

/// Runs cfg.run under both layouts with identical seed and weights.
CompareReport cmd_compare(const ExperimentConfig& cfg);

struct SweepAxes {
    std::vector<std::uint32_t> kernel_sizes{8, 16};
    std::vector<AcceleratorKind> accels{AcceleratorKind::SystolicArray, AcceleratorKind::Simd};
    std::vector<std::uint32_t> cores{1, 2, 4};
};

/// One CompareReport per axis combination, sorted by (accel, K, cores).
/// Combinations are validated before anything runs.
std::vector<SweepRow> cmd_sweep(const ExperimentConfig& cfg, const SweepAxes& axes);

}  // namespace bwma
