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
#include "bwma/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bwma/errors.hpp"

namespace bwma {

namespace {

std::uint64_t next_aligned(const Matrix& m) {
    return (m.base_address() + m.size_bytes() + 63) & ~std::uint64_t{63};
}

// Calls fn(row) for every row selected by `rows`, in band order.
template <typename Fn>
void for_each_row(const Matrix& m, RowBands rows, Fn&& fn) {
    if (rows.bands.empty()) {
        for (std::size_t r = 0; r < m.rows(); ++r) fn(r);
        return;
    }
    for (std::size_t band : rows.bands) {
        const std::size_t r0 = band * rows.band_rows;
        const std::size_t r1 = std::min(m.rows(), r0 + rows.band_rows);
        for (std::size_t r = r0; r < r1; ++r) fn(r);
    }
}

// Emits one logical row as runs (one per block segment under BWMA).
std::uint64_t emit_row(const Matrix& m, std::size_t r, AccessKind kind, TraceSink& sink) {
    const std::uint32_t ew = m.elem_width();
    if (!m.layout().is_block_wise()) {
        sink.emit(m.address_of_offset(r * m.cols()), static_cast<std::uint32_t>(m.cols()), ew, kind);
        return m.cols();
    }
    const std::size_t b = m.layout().block_edge();
    for (std::size_t c0 = 0; c0 < m.cols(); c0 += b) {
        const std::size_t n = std::min(b, m.cols() - c0);
        sink.emit(m.address_of_offset(m.offset_unchecked(r, c0)), static_cast<std::uint32_t>(n), ew, kind);
    }
    return m.cols();
}

}  // namespace

KernelStats softmax_rows_inplace(Matrix& m, float scale, TraceSink& sink, RowBands rows, const ScalarCosts& costs) {
    if (!(scale > 0.0f)) throw ConfigError("softmax scale must be positive");
    KernelStats st;
    std::vector<float> buf(m.cols());
    auto data = m.data();
    for_each_row(m, rows, [&](std::size_t r) {
        st.element_reads += emit_row(m, r, AccessKind::Read, sink);
        float mx = -INFINITY;
        for (std::size_t c = 0; c < m.cols(); ++c) mx = std::max(mx, data[m.offset_unchecked(r, c)] * scale);

        st.element_reads += emit_row(m, r, AccessKind::Read, sink);
        float sum = 0.0f;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            buf[c] = std::exp(data[m.offset_unchecked(r, c)] * scale - mx);
            sum += buf[c];
        }

        st.element_writes += emit_row(m, r, AccessKind::Write, sink);
        for (std::size_t c = 0; c < m.cols(); ++c) data[m.offset_unchecked(r, c)] = buf[c] / sum;
        st.compute_cycles += costs.softmax * m.cols();
    });
    return st;
}

KernelResult softmax_rows(const Matrix& m, float scale, TraceSink& sink) {
    KernelResult res{m, {}};
    res.stats = softmax_rows_inplace(res.out, scale, sink);
    return res;
}

KernelStats layernorm_rows_inplace(Matrix& m, std::span<const float> gamma, std::span<const float> beta, float eps,
                                   TraceSink& sink, RowBands rows, const ScalarCosts& costs) {
    if (!(eps > 0.0f)) throw ConfigError("layernorm eps must be positive");
    if ((!gamma.empty() && gamma.size() != m.cols()) || (!beta.empty() && beta.size() != m.cols())) {
        throw ShapeError("layernorm: gamma/beta length must equal the column count");
    }
    KernelStats st;
    std::vector<double> centered(m.cols());
    auto data = m.data();
    const double n = static_cast<double>(m.cols());
    for_each_row(m, rows, [&](std::size_t r) {
        st.element_reads += emit_row(m, r, AccessKind::Read, sink);
        double sum = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) sum += data[m.offset_unchecked(r, c)];
        const double mean = sum / n;

        st.element_reads += emit_row(m, r, AccessKind::Read, sink);
        double var = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            centered[c] = data[m.offset_unchecked(r, c)] - mean;
            var += centered[c] * centered[c];
        }
        var /= n;
        const double inv_std = 1.0 / std::sqrt(var + static_cast<double>(eps));

        st.element_writes += emit_row(m, r, AccessKind::Write, sink);
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double g = gamma.empty() ? 1.0 : gamma[c];
            const double b = beta.empty() ? 0.0 : beta[c];
            data[m.offset_unchecked(r, c)] = static_cast<float>(g * centered[c] * inv_std + b);
        }
        st.compute_cycles += costs.layernorm * m.cols();
    });
    return st;
}

KernelResult layernorm_rows(const Matrix& m, std::span<const float> gamma, std::span<const float> beta, float eps,
                            TraceSink& sink) {
    KernelResult res{m, {}};
    res.stats = layernorm_rows_inplace(res.out, gamma, beta, eps, sink);
    return res;
}

KernelStats transpose_into(const Matrix& m, Matrix& out, TraceSink& sink, const ScalarCosts& costs) {
    if (out.rows() != m.cols() || out.cols() != m.rows()) throw ShapeError("transpose: output shape mismatch");
    if (out.layout() != m.layout()) throw LayoutError("transpose: output layout must match the source");
    KernelStats st;
    const std::uint32_t ew = m.elem_width();
    auto src = m.data();
    auto dst = out.data();
    if (!m.layout().is_block_wise()) {
        // Destination row c is source column c.
        for (std::size_t c = 0; c < m.cols(); ++c) {
            sink.emit(m.address_of_offset(c), static_cast<std::uint32_t>(m.rows()),
                      static_cast<std::uint32_t>(m.cols()) * ew, AccessKind::Read);
            for (std::size_t r = 0; r < m.rows(); ++r) dst[c * m.rows() + r] = src[r * m.cols() + c];
            sink.emit(out.address_of_offset(c * m.rows()), static_cast<std::uint32_t>(m.rows()), ew,
                      AccessKind::Write);
        }
        st.element_reads = st.element_writes = static_cast<std::uint64_t>(m.rows()) * m.cols();
    } else {
        // Destination block (I, J), row rr is column rr of source block (J, I).
        const std::size_t b = m.layout().block_edge();
        const std::size_t out_block_rows = out.padded_rows() / b;
        for (std::size_t bi = 0; bi < out_block_rows; ++bi) {
            for (std::size_t bj = 0; bj < out.blocks_per_row(); ++bj) {
                const std::size_t src_block = m.block_offset(bj, bi);
                const std::size_t dst_block = out.block_offset(bi, bj);
                for (std::size_t rr = 0; rr < b; ++rr) {
                    sink.emit(m.address_of_offset(src_block + rr), static_cast<std::uint32_t>(b),
                              static_cast<std::uint32_t>(b) * ew, AccessKind::Read);
                    for (std::size_t cc = 0; cc < b; ++cc) dst[dst_block + rr * b + cc] = src[src_block + cc * b + rr];
                    sink.emit(out.address_of_offset(dst_block + rr * b), static_cast<std::uint32_t>(b), ew,
                              AccessKind::Write);
                }
            }
        }
        st.element_reads = st.element_writes = static_cast<std::uint64_t>(out.padded_rows()) * out.padded_cols();
    }
    st.compute_cycles = costs.transpose * st.element_writes;
    return st;
}

KernelResult transpose(const Matrix& m, TraceSink& sink) {
    KernelResult res{Matrix(m.cols(), m.rows(), m.layout(), next_aligned(m), m.elem_width()), {}};
    res.stats = transpose_into(m, res.out, sink);
    return res;
}

KernelStats residual_add_into(const Matrix& a, const Matrix& b, Matrix& out, TraceSink& sink, RowBands rows,
                              const ScalarCosts& costs) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || out.rows() != a.rows() || out.cols() != a.cols()) {
        throw ShapeError("residual_add: operands must have the same shape");
    }
    if (a.layout() != b.layout() || out.layout() != a.layout()) {
        throw LayoutError("residual_add: operands must share one layout");
    }
    KernelStats st;
    const std::uint32_t ew = a.elem_width();
    auto da = a.data();
    auto db = b.data();
    auto dout = out.data();
    auto segment = [&](std::size_t off, std::size_t n) {
        sink.emit(a.address_of_offset(off), static_cast<std::uint32_t>(n), ew, AccessKind::Read);
        sink.emit(b.address_of_offset(off), static_cast<std::uint32_t>(n), ew, AccessKind::Read);
        for (std::size_t i = off; i < off + n; ++i) dout[i] = da[i] + db[i];
        sink.emit(out.address_of_offset(off), static_cast<std::uint32_t>(n), ew, AccessKind::Write);
        st.element_reads += 2 * n;
        st.element_writes += n;
    };
    if (!a.layout().is_block_wise()) {
        for_each_row(a, rows, [&](std::size_t r) { segment(r * a.cols(), a.cols()); });
    } else {
        const std::size_t blk = a.layout().block_edge();
        const std::size_t block_rows = a.padded_rows() / blk;
        auto band_blocks = [&](std::size_t br) {
            for (std::size_t bc = 0; bc < a.blocks_per_row(); ++bc) segment(a.block_offset(br, bc), blk * blk);
        };
        if (rows.bands.empty()) {
            for (std::size_t br = 0; br < block_rows; ++br) band_blocks(br);
        } else {
            if (rows.band_rows != blk) throw AlignmentError("residual_add: bands must be one block row high");
            for (std::size_t br : rows.bands) band_blocks(br);
        }
    }
    st.compute_cycles = costs.residual * st.element_writes;
    return st;
}

KernelResult residual_add(const Matrix& a, const Matrix& b, TraceSink& sink) {
    const std::uint64_t base = std::max(next_aligned(a), next_aligned(b));
    KernelResult res{Matrix(a.rows(), a.cols(), a.layout(), base, a.elem_width()), {}};
    res.stats = residual_add_into(a, b, res.out, sink);
    return res;
}

}  // namespace bwma
