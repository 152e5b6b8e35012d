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
#include <string_view>
#include <vector>

#include "bwma/activation.hpp"
#include "bwma/matrix.hpp"
#include "bwma/trace.hpp"

namespace bwma {

enum class AcceleratorKind : std::uint8_t { SystolicArray, Simd };

std::string_view to_string(AcceleratorKind kind);

struct CostParams {
    std::uint64_t weight_preload_cycles_per_tile = 0;
    std::uint64_t compute_cycles_per_tile_pair = 0;

    /// Systolic array: K cycles to preload a weight tile, 3K - 2 cycles of
    /// pipeline fill and drain per tile pair. SIMD: no preload, K^2 cycles
    /// (K lanes, K MACs per lane per cycle, K^3 MACs).
    static CostParams defaults_for(AcceleratorKind kind, std::uint32_t kernel_size);
};

class AcceleratorModel {
public:
    AcceleratorModel(AcceleratorKind kind, std::uint32_t kernel_size);
    AcceleratorModel(AcceleratorKind kind, std::uint32_t kernel_size, CostParams cost);

    static AcceleratorModel systolic(std::uint32_t k) { return {AcceleratorKind::SystolicArray, k}; }
    static AcceleratorModel simd(std::uint32_t k) { return {AcceleratorKind::Simd, k}; }

    AcceleratorKind kind() const { return kind_; }
    std::uint32_t kernel_size() const { return kernel_size_; }
    const CostParams& cost() const { return cost_; }

    /// Short name, e.g. "SA16x16" or "SIMD16".
    std::string name() const;

private:
    AcceleratorKind kind_;
    std::uint32_t kernel_size_;
    CostParams cost_;
};

std::uint64_t compute_cycles(const AcceleratorModel& accel, std::uint64_t tile_pair_ops,
                             std::uint64_t weight_tile_changes);

struct GemmStats {
    std::uint64_t tile_pair_ops = 0;
    std::uint64_t weight_tile_changes = 0;
    std::uint64_t element_reads_a = 0;
    std::uint64_t element_reads_b = 0;
    std::uint64_t element_reads_c = 0;
    std::uint64_t element_writes_c = 0;
    std::uint64_t compute_cycles = 0;

    GemmStats& operator+=(const GemmStats& o);
};

struct GemmOptions {
    /// Applied to each finished C tile before it is stored.
    Activation activation = Activation::None;
    /// Output tile rows to compute; empty means all of them.
    std::span<const std::size_t> tile_rows = {};
    /// First output column in `c` (tiled_gemm_into only). Must be a multiple
    /// of the block edge for block-wise outputs.
    std::size_t c_col_offset = 0;
};

struct GemmResult {
    Matrix c;
    GemmStats stats;
};

/// Address trace of loading one K x K tile (tile coordinates in units of K).
/// Edge tiles of row-wise matrices are clipped to the logical domain.
std::vector<std::uint64_t> tile_load_trace(const Matrix& m, std::size_t tile_row, std::size_t tile_col,
                                           std::uint32_t k);
/// Same, as runs into a sink.
void emit_tile_load(const Matrix& m, std::size_t tile_row, std::size_t tile_col, std::uint32_t k,
                    TraceSink& sink);

/// Output-stationary tiled GEMM c = a * b.
///
/// For each output tile (i, j), k-tiles are reduced innermost into a local
/// accumulator tile, which is stored once. Every A/B tile load and C tile
/// store is emitted to `sink`. The reduction order per element is
/// k = 0, 1, ..., n - 1 regardless of layout, so results are bit-identical
/// across layouts and equal to a sequential naive triple loop.
GemmResult tiled_gemm(const Matrix& a, const Matrix& b, const AcceleratorModel& accel, TraceSink& sink,
                      const GemmOptions& options = {});

/// As tiled_gemm, writing into an existing `c` (with options.c_col_offset).
/// c must have a's row count and layout.
GemmStats tiled_gemm_into(const Matrix& a, const Matrix& b, Matrix& c, const AcceleratorModel& accel,
                          TraceSink& sink, const GemmOptions& options = {});

/// Exactly ceil(m/k) * ceil(n/k) * ceil(p/k).
std::uint64_t expected_tile_pair_ops(std::size_t m, std::size_t n, std::size_t p, std::uint32_t k);

}  // namespace bwma
