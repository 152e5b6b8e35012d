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
#include "bwma/matrix.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "bwma/errors.hpp"

namespace bwma {

namespace {

std::size_t round_up(std::size_t v, std::size_t m) { return (v + m - 1) / m * m; }

}  // namespace

std::string_view to_string(LayoutKind kind) {
    return kind == LayoutKind::RowWise ? "rwma" : "bwma";
}

LayoutSpec LayoutSpec::block_wise(std::size_t block_edge) {
    if (block_edge == 0) throw ConfigError("block edge must be >= 1");
    return LayoutSpec(LayoutKind::BlockWise, block_edge);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, LayoutSpec layout, std::uint64_t base_address,
               std::uint32_t elem_width)
    : rows_(rows), cols_(cols), layout_(layout), base_address_(base_address), elem_width_(elem_width) {
    if (elem_width_ == 0) throw ConfigError("element width must be >= 1");
    const std::size_t b = layout_.block_edge();
    padded_rows_ = layout_.is_block_wise() ? round_up(rows, b) : rows;
    padded_cols_ = layout_.is_block_wise() ? round_up(cols, b) : cols;
    blocks_per_row_ = padded_cols_ / b;
    data_.assign(padded_rows_ * padded_cols_, 0.0f);
}

Matrix Matrix::from_row_major(std::size_t rows, std::size_t cols, std::span<const float> values,
                              std::uint64_t base_address) {
    if (values.size() != rows * cols) {
        throw ShapeError("from_row_major: expected " + std::to_string(rows * cols) + " values, got " +
                         std::to_string(values.size()));
    }
    Matrix m(rows, cols, LayoutSpec::row_wise(), base_address);
    std::memcpy(m.data_.data(), values.data(), values.size_bytes());
    return m;
}

std::size_t Matrix::offset_of(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_) {
        throw IndexError("element (" + std::to_string(r) + ", " + std::to_string(c) +
                         ") outside " + std::to_string(rows_) + "x" + std::to_string(cols_) + " matrix");
    }
    return offset_unchecked(r, c);
}

std::vector<float> Matrix::to_row_major() const {
    std::vector<float> out(rows_ * cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) out[r * cols_ + c] = data_[offset_unchecked(r, c)];
    }
    return out;
}

std::size_t offset_of(const Matrix& m, std::size_t r, std::size_t c) { return m.offset_of(r, c); }

Matrix to_blockwise(const Matrix& m, std::size_t block_edge) {
    NullSink sink;
    return to_blockwise(m, block_edge, m.base_address(), sink);
}

Matrix to_blockwise(const Matrix& m, std::size_t block_edge, std::uint64_t dest_address, TraceSink& sink) {
    if (block_edge == 0) throw ConfigError("to_blockwise: block edge must be >= 1");
    if (m.layout().is_block_wise()) throw LayoutError("to_blockwise: source is already block-wise");
    Matrix out(m.rows(), m.cols(), LayoutSpec::block_wise(block_edge), dest_address, m.elem_width());
    const std::size_t b = block_edge;
    const std::uint32_t ew = m.elem_width();
    auto src = m.data();
    auto dst = out.data();
    // Destination storage order: block by block, each block row by row. Each
    // block row segment is one read run from the source row followed by one
    // contiguous write run.
    for (std::size_t br = 0; br < out.padded_rows() / b; ++br) {
        for (std::size_t bc = 0; bc < out.blocks_per_row(); ++bc) {
            const std::size_t block = out.block_offset(br, bc);
            for (std::size_t rr = 0; rr < b; ++rr) {
                const std::size_t r = br * b + rr;
                const std::size_t c0 = bc * b;
                const std::size_t dst_off = block + rr * b;
                std::size_t valid = 0;
                if (r < m.rows() && c0 < m.cols()) valid = std::min(b, m.cols() - c0);
                if (valid > 0) {
                    std::memcpy(&dst[dst_off], &src[r * m.cols() + c0], valid * sizeof(float));
                    sink.emit(m.address_of_offset(r * m.cols() + c0), static_cast<std::uint32_t>(valid), ew,
                              AccessKind::Read);
                }
                sink.emit(out.address_of_offset(dst_off), static_cast<std::uint32_t>(b), ew, AccessKind::Write);
            }
        }
    }
    return out;
}

Matrix from_blockwise(const Matrix& m) {
    NullSink sink;
    return from_blockwise(m, m.base_address(), sink);
}

Matrix from_blockwise(const Matrix& m, std::uint64_t dest_address, TraceSink& sink) {
    if (!m.layout().is_block_wise()) throw LayoutError("from_blockwise: source is not block-wise");
    Matrix out(m.rows(), m.cols(), LayoutSpec::row_wise(), dest_address, m.elem_width());
    const std::size_t b = m.layout().block_edge();
    const std::uint32_t ew = m.elem_width();
    auto src = m.data();
    auto dst = out.data();
    // Destination storage order: row by row; each row hops across blocks on
    // the read side and is written contiguously.
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c0 = 0; c0 < m.cols(); c0 += b) {
            const std::size_t valid = std::min(b, m.cols() - c0);
            const std::size_t src_off = m.offset_unchecked(r, c0);
            std::memcpy(&dst[r * m.cols() + c0], &src[src_off], valid * sizeof(float));
            sink.emit(m.address_of_offset(src_off), static_cast<std::uint32_t>(valid), ew, AccessKind::Read);
        }
        sink.emit(out.address_of_offset(r * m.cols()), static_cast<std::uint32_t>(m.cols()), ew,
                  AccessKind::Write);
    }
    return out;
}

std::vector<TraceEvent> conversion_access_trace(const Matrix& m, ConversionDirection direction,
                                                std::size_t block_edge, std::uint64_t dest_address) {
    RecordingSink sink;
    if (direction == ConversionDirection::ToBlockWise) {
        (void)to_blockwise(m, block_edge, dest_address, sink);
    } else {
        (void)from_blockwise(m, dest_address, sink);
    }
    return sink.events();
}

bool logically_equal(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            const float x = a.data()[a.offset_unchecked(r, c)];
            const float y = b.data()[b.offset_unchecked(r, c)];
            if (std::memcmp(&x, &y, sizeof(float)) != 0) return false;
        }
    }
    return true;
}

AddressAllocator::AddressAllocator(std::uint64_t base, std::uint64_t alignment)
    : next_(base), alignment_(alignment) {
    if (alignment_ == 0 || (alignment_ & (alignment_ - 1)) != 0) {
        throw ConfigError("allocator alignment must be a power of two");
    }
    next_ = (next_ + alignment_ - 1) & ~(alignment_ - 1);
}

std::uint64_t AddressAllocator::allocate(std::uint64_t bytes) {
    const std::uint64_t addr = next_;
    next_ = (next_ + bytes + alignment_ - 1) & ~(alignment_ - 1);
    return addr;
}

std::uint64_t AddressAllocator::place(Matrix& m) {
    const std::uint64_t addr = allocate(m.size_bytes());
    m.set_base_address(addr);
    return addr;
}

}  // namespace bwma
