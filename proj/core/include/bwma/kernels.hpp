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

#include "bwma/activation.hpp"
#include "bwma/matrix.hpp"
#include "bwma/trace.hpp"

namespace bwma {

/// Scalar-op cycle costs per element for the non-GEMM kernels, which run on
/// the host core rather than the accelerator.
struct ScalarCosts {
    std::uint64_t softmax = 4;     // scale/max, exp, sum, divide
    std::uint64_t layernorm = 5;   // sum, subtract, square-accumulate, scale, affine
    std::uint64_t transpose = 1;
    std::uint64_t residual = 1;
    std::uint64_t conversion = 1;
};

struct KernelStats {
    std::uint64_t element_reads = 0;
    std::uint64_t element_writes = 0;
    std::uint64_t compute_cycles = 0;

    KernelStats& operator+=(const KernelStats& o) {
        element_reads += o.element_reads;
        element_writes += o.element_writes;
        compute_cycles += o.compute_cycles;
        return *this;
    }
};

struct KernelResult {
    Matrix out;
    KernelStats stats;
};

/// Subset of rows given as bands of `band_rows` consecutive rows. An empty
/// band list selects every row. Multi-core runs hand each core its own bands.
struct RowBands {
    std::size_t band_rows = 1;
    std::span<const std::size_t> bands = {};
};

/// Row-wise numerically stable softmax of (m * scale), in place.
///
/// Each row is read twice (max pass, then exp/sum pass into a row-local
/// buffer) and written once, always in logical column order. Under a
/// block-wise layout the row therefore hops from block to block.
KernelStats softmax_rows_inplace(Matrix& m, float scale, TraceSink& sink, RowBands rows = {},
                                 const ScalarCosts& costs = {});
KernelResult softmax_rows(const Matrix& m, float scale, TraceSink& sink);

/// Row-wise layer normalization with population variance, in place. Same
/// access pattern as softmax: a mean pass, a variance pass, one write pass.
/// Empty gamma/beta mean identity scale/shift.
KernelStats layernorm_rows_inplace(Matrix& m, std::span<const float> gamma, std::span<const float> beta,
                                   float eps, TraceSink& sink, RowBands rows = {}, const ScalarCosts& costs = {});
KernelResult layernorm_rows(const Matrix& m, std::span<const float> gamma, std::span<const float> beta,
                            float eps, TraceSink& sink);

inline constexpr float kLayerNormEps = 1e-12f;

/// out = m^T in the same layout family. Writes are sequential in the
/// destination's storage order; for each destination row segment the
/// matching source column segment is read first.
KernelStats transpose_into(const Matrix& m, Matrix& out, TraceSink& sink, const ScalarCosts& costs = {});
/// Result is placed directly after m in the address space.
KernelResult transpose(const Matrix& m, TraceSink& sink);

/// out = a + b, traversed in storage order (row by row, or block by block).
/// For each segment: read a, read b, write out.
KernelStats residual_add_into(const Matrix& a, const Matrix& b, Matrix& out, TraceSink& sink, RowBands rows = {},
                              const ScalarCosts& costs = {});
KernelResult residual_add(const Matrix& a, const Matrix& b, TraceSink& sink);

}  // namespace bwma
