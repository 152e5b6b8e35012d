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
#include "bwma/accel.hpp"

#include <algorithm>
#include <cstring>
#include <initializer_list>
#include <string>

#include "bwma/errors.hpp"

namespace bwma {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::None: return "none";
        case Activation::Gelu: return "gelu";
        case Activation::Relu: return "relu";
    }
    return "none";
}

std::string_view to_string(AcceleratorKind kind) {
    return kind == AcceleratorKind::SystolicArray ? "sa" : "simd";
}

CostParams CostParams::defaults_for(AcceleratorKind kind, std::uint32_t k) {
    if (kind == AcceleratorKind::SystolicArray) {
        return {k, 3ull * k - 2};
    }
    return {0, static_cast<std::uint64_t>(k) * k};
}

AcceleratorModel::AcceleratorModel(AcceleratorKind kind, std::uint32_t kernel_size)
    : AcceleratorModel(kind, kernel_size, CostParams::defaults_for(kind, kernel_size == 0 ? 1 : kernel_size)) {}

AcceleratorModel::AcceleratorModel(AcceleratorKind kind, std::uint32_t kernel_size, CostParams cost)
    : kind_(kind), kernel_size_(kernel_size), cost_(cost) {
    if (kernel_size_ == 0) throw ConfigError("accelerator kernel size must be >= 1");
}

std::string AcceleratorModel::name() const {
    const auto k = std::to_string(kernel_size_);
    return kind_ == AcceleratorKind::SystolicArray ? "SA" + k + "x" + k : "SIMD" + k;
}

std::uint64_t compute_cycles(const AcceleratorModel& accel, std::uint64_t tile_pair_ops,
                             std::uint64_t weight_tile_changes) {
    return weight_tile_changes * accel.cost().weight_preload_cycles_per_tile +
           tile_pair_ops * accel.cost().compute_cycles_per_tile_pair;
}

GemmStats& GemmStats::operator+=(const GemmStats& o) {
    tile_pair_ops += o.tile_pair_ops;
    weight_tile_changes += o.weight_tile_changes;
    element_reads_a += o.element_reads_a;
    element_reads_b += o.element_reads_b;
    element_reads_c += o.element_reads_c;
    element_writes_c += o.element_writes_c;
    compute_cycles += o.compute_cycles;
    return *this;
}

std::uint64_t expected_tile_pair_ops(std::size_t m, std::size_t n, std::size_t p, std::uint32_t k) {
    auto ceil_div = [k](std::size_t v) { return static_cast<std::uint64_t>((v + k - 1) / k); };
    return ceil_div(m) * ceil_div(n) * ceil_div(p);
}

namespace {

std::size_t tile_rows_of(const Matrix& m, std::uint32_t k) { return (m.rows() + k - 1) / k; }
std::size_t tile_cols_of(const Matrix& m, std::uint32_t k) { return (m.cols() + k - 1) / k; }

void check_tile(const Matrix& m, std::size_t tile_row, std::size_t tile_col, std::uint32_t k) {
    if (k == 0) throw ConfigError("tile edge must be >= 1");
    if (m.layout().is_block_wise() && m.layout().block_edge() != k) {
        throw AlignmentError("tile edge " + std::to_string(k) + " does not match block edge " +
                             std::to_string(m.layout().block_edge()));
    }
    if (tile_row >= tile_rows_of(m, k) || tile_col >= tile_cols_of(m, k)) {
        throw AlignmentError("tile (" + std::to_string(tile_row) + ", " + std::to_string(tile_col) +
                             ") outside the tile grid");
    }
}

// Emits the load trace of tile (tr, tc) and, if `out` is non-null, copies the
// tile into a zero-padded k*k row-major buffer. Returns elements traced.
std::uint64_t load_tile(const Matrix& m, std::size_t tr, std::size_t tc, std::uint32_t k, TraceSink& sink,
                        float* out) {
    const std::uint32_t ew = m.elem_width();
    auto data = m.data();
    if (m.layout().is_block_wise()) {
        const std::size_t off = m.block_offset(tr, tc);
        if (out) std::memcpy(out, &data[off], sizeof(float) * k * k);
        sink.emit(m.address_of_offset(off), k * k, ew, AccessKind::Read);
        return static_cast<std::uint64_t>(k) * k;
    }
    const std::size_t r0 = tr * k;
    const std::size_t c0 = tc * k;
    const std::size_t nr = std::min<std::size_t>(k, m.rows() - r0);
    const std::size_t nc = std::min<std::size_t>(k, m.cols() - c0);
    if (out && (nr < k || nc < k)) std::fill(out, out + k * k, 0.0f);
    for (std::size_t rr = 0; rr < nr; ++rr) {
        const std::size_t off = (r0 + rr) * m.cols() + c0;
        if (out) std::memcpy(out + rr * k, &data[off], sizeof(float) * nc);
        sink.emit(m.address_of_offset(off), static_cast<std::uint32_t>(nc), ew, AccessKind::Read);
    }
    return static_cast<std::uint64_t>(nr) * nc;
}

// Stores an accumulated k*k tile into output tile (tr, tc) of c, where tc is
// already shifted by the column offset. Returns elements traced.
std::uint64_t store_tile(Matrix& c, std::size_t tr, std::size_t tc, std::size_t logical_cols_end,
                         std::uint32_t k, const float* tile, TraceSink& sink) {
    const std::uint32_t ew = c.elem_width();
    auto data = c.data();
    if (c.layout().is_block_wise()) {
        const std::size_t off = c.block_offset(tr, tc);
        std::memcpy(&data[off], tile, sizeof(float) * k * k);
        sink.emit(c.address_of_offset(off), k * k, ew, AccessKind::Write);
        return static_cast<std::uint64_t>(k) * k;
    }
    const std::size_t r0 = tr * k;
    const std::size_t c0 = tc * k;
    const std::size_t nr = std::min<std::size_t>(k, c.rows() - r0);
    const std::size_t nc = std::min<std::size_t>(k, logical_cols_end - c0);
    for (std::size_t rr = 0; rr < nr; ++rr) {
        const std::size_t off = (r0 + rr) * c.cols() + c0;
        std::memcpy(&data[off], tile + rr * k, sizeof(float) * nc);
        sink.emit(c.address_of_offset(off), static_cast<std::uint32_t>(nc), ew, AccessKind::Write);
    }
    return static_cast<std::uint64_t>(nr) * nc;
}

// acc += at * bt for k*k row-major tiles; per element the reduction runs in
// kk order, so the float result matches a sequential dot product.
template <std::uint32_t K>
void tile_mac_fixed(float* __restrict acc, const float* __restrict at, const float* __restrict bt) {
    for (std::uint32_t r = 0; r < K; ++r) {
        float* row = acc + r * K;
        for (std::uint32_t kk = 0; kk < K; ++kk) {
            const float av = at[r * K + kk];
            const float* brow = bt + kk * K;
            for (std::uint32_t c = 0; c < K; ++c) row[c] += av * brow[c];
        }
    }
}

void tile_mac(float* __restrict acc, const float* __restrict at, const float* __restrict bt, std::uint32_t k) {
    switch (k) {
        case 4: tile_mac_fixed<4>(acc, at, bt); return;
        case 8: tile_mac_fixed<8>(acc, at, bt); return;
        case 16: tile_mac_fixed<16>(acc, at, bt); return;
        case 32: tile_mac_fixed<32>(acc, at, bt); return;
        default: break;
    }
    for (std::uint32_t r = 0; r < k; ++r) {
        float* row = acc + r * k;
        for (std::uint32_t kk = 0; kk < k; ++kk) {
            const float av = at[r * k + kk];
            const float* brow = bt + kk * k;
            for (std::uint32_t c = 0; c < k; ++c) row[c] += av * brow[c];
        }
    }
}

}  // namespace

void emit_tile_load(const Matrix& m, std::size_t tile_row, std::size_t tile_col, std::uint32_t k,
                    TraceSink& sink) {
    check_tile(m, tile_row, tile_col, k);
    load_tile(m, tile_row, tile_col, k, sink, nullptr);
}

std::vector<std::uint64_t> tile_load_trace(const Matrix& m, std::size_t tile_row, std::size_t tile_col,
                                           std::uint32_t k) {
    RecordingSink sink;
    emit_tile_load(m, tile_row, tile_col, k, sink);
    return sink.addresses();
}

GemmStats tiled_gemm_into(const Matrix& a, const Matrix& b, Matrix& c, const AcceleratorModel& accel,
                          TraceSink& sink, const GemmOptions& options) {
    const std::uint32_t k = accel.kernel_size();
    if (a.cols() != b.rows()) {
        throw ShapeError("gemm: a is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " but b is " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    if (c.rows() != a.rows() || c.cols() < options.c_col_offset + b.cols()) {
        throw ShapeError("gemm: output matrix too small");
    }
    const LayoutKind kind = a.layout().kind();
    if (b.layout().kind() != kind || c.layout().kind() != kind) {
        throw LayoutError("gemm: operands must share one layout");
    }
    if (kind == LayoutKind::BlockWise) {
        for (const Matrix* m : std::initializer_list<const Matrix*>{&a, &b, &c}) {
            if (m->layout().block_edge() != k) {
                throw LayoutError("gemm: block edge " + std::to_string(m->layout().block_edge()) +
                                  " differs from kernel size " + std::to_string(k));
            }
        }
        if (options.c_col_offset % k != 0) throw AlignmentError("gemm: output column offset not block aligned");
        if (b.cols() % k != 0 && options.c_col_offset + b.cols() != c.cols()) {
            throw AlignmentError("gemm: padded output tile would overlap neighbouring columns");
        }
    }

    const std::size_t mt = tile_rows_of(a, k);
    const std::size_t nt = tile_cols_of(a, k);
    const std::size_t pt = tile_cols_of(b, k);
    const std::size_t col_tile_offset = options.c_col_offset / k;
    const std::size_t logical_cols_end = options.c_col_offset + b.cols();

    std::vector<std::size_t> all_rows;
    std::span<const std::size_t> rows = options.tile_rows;
    if (rows.empty()) {
        all_rows.resize(mt);
        for (std::size_t i = 0; i < mt; ++i) all_rows[i] = i;
        rows = all_rows;
    }

    const std::size_t kk = static_cast<std::size_t>(k) * k;
    std::vector<float> at(kk), bt(kk), acc(kk);
    GemmStats stats;
    std::size_t last_b_tile = static_cast<std::size_t>(-1);
    for (std::size_t i : rows) {
        if (i >= mt) throw AlignmentError("gemm: tile row out of range");
        const bool rwma_offset_store = kind == LayoutKind::RowWise && options.c_col_offset % k != 0;
        for (std::size_t j = 0; j < pt; ++j) {
            std::fill(acc.begin(), acc.end(), 0.0f);
            for (std::size_t t = 0; t < nt; ++t) {
                stats.element_reads_a += load_tile(a, i, t, k, sink, at.data());
                stats.element_reads_b += load_tile(b, t, j, k, sink, bt.data());
                const std::size_t b_tile = t * pt + j;
                if (b_tile != last_b_tile) {
                    ++stats.weight_tile_changes;
                    last_b_tile = b_tile;
                }
                tile_mac(acc.data(), at.data(), bt.data(), k);
                ++stats.tile_pair_ops;
            }
            activation_fused(acc, options.activation);
            if (rwma_offset_store) {
                // Column offset not on the tile grid: store element rows directly.
                const std::size_t r0 = i * k;
                const std::size_t c0 = options.c_col_offset + j * k;
                const std::size_t nr = std::min<std::size_t>(k, c.rows() - r0);
                const std::size_t nc = std::min<std::size_t>(k, logical_cols_end - c0);
                auto data = c.data();
                for (std::size_t rr = 0; rr < nr; ++rr) {
                    const std::size_t off = (r0 + rr) * c.cols() + c0;
                    std::memcpy(&data[off], acc.data() + rr * k, sizeof(float) * nc);
                    sink.emit(c.address_of_offset(off), static_cast<std::uint32_t>(nc), c.elem_width(),
                              AccessKind::Write);
                }
                stats.element_writes_c += nr * nc;
            } else {
                stats.element_writes_c +=
                    store_tile(c, i, j + col_tile_offset, logical_cols_end, k, acc.data(), sink);
            }
        }
    }
    stats.compute_cycles = compute_cycles(accel, stats.tile_pair_ops, stats.weight_tile_changes);
    return stats;
}

GemmResult tiled_gemm(const Matrix& a, const Matrix& b, const AcceleratorModel& accel, TraceSink& sink,
                      const GemmOptions& options) {
    if (a.cols() != b.rows()) {
        throw ShapeError("gemm: a is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " but b is " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    if (a.layout().kind() != b.layout().kind()) throw LayoutError("gemm: operands must share one layout");
    // The product is placed right after the higher of the two operands.
    const std::uint64_t end = std::max(a.base_address() + a.size_bytes(), b.base_address() + b.size_bytes());
    const std::uint64_t base = (end + 63) & ~std::uint64_t{63};
    GemmResult result{Matrix(a.rows(), b.cols(), a.layout(), base, a.elem_width()), {}};
    GemmOptions opts = options;
    opts.c_col_offset = 0;
    result.stats = tiled_gemm_into(a, b, result.c, accel, sink, opts);
    return result;
}

}  // namespace bwma
