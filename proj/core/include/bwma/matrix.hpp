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

#include "bwma/trace.hpp"

namespace bwma {

enum class LayoutKind : std::uint8_t { RowWise, BlockWise };

std::string_view to_string(LayoutKind kind);

/// Physical storage order of a matrix. Block-wise matrices are stored as a
/// sequence of block_edge x block_edge blocks, block-row-major, each block
/// internally row-major.
class LayoutSpec {
public:
    static LayoutSpec row_wise() { return LayoutSpec(LayoutKind::RowWise, 1); }
    static LayoutSpec block_wise(std::size_t block_edge);

    LayoutKind kind() const { return kind_; }
    bool is_block_wise() const { return kind_ == LayoutKind::BlockWise; }
    /// 1 for row-wise layouts.
    std::size_t block_edge() const { return block_edge_; }

    friend bool operator==(const LayoutSpec&, const LayoutSpec&) = default;

private:
    LayoutSpec(LayoutKind kind, std::size_t edge) : kind_(kind), block_edge_(edge) {}

    LayoutKind kind_;
    std::size_t block_edge_;
};

inline constexpr std::uint32_t kDefaultElemWidth = 4;

/// 2-D float32 matrix with an explicit layout and a synthetic base address.
///
/// The buffer holds padded_rows() x padded_cols() elements. Padding only
/// exists for block-wise layouts whose logical shape is not a multiple of
/// the block edge; padding elements are zero.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, LayoutSpec layout = LayoutSpec::row_wise(),
           std::uint64_t base_address = 0, std::uint32_t elem_width = kDefaultElemWidth);

    /// Row-wise matrix from row-major values (size must be rows * cols).
    static Matrix from_row_major(std::size_t rows, std::size_t cols, std::span<const float> values,
                                 std::uint64_t base_address = 0);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t padded_rows() const { return padded_rows_; }
    std::size_t padded_cols() const { return padded_cols_; }
    const LayoutSpec& layout() const { return layout_; }
    std::uint32_t elem_width() const { return elem_width_; }
    std::uint64_t base_address() const { return base_address_; }
    void set_base_address(std::uint64_t addr) { base_address_ = addr; }
    std::size_t size_bytes() const { return data_.size() * elem_width_; }

    std::span<float> data() { return data_; }
    std::span<const float> data() const { return data_; }

    /// Checked; throws IndexError outside the logical domain.
    std::size_t offset_of(std::size_t r, std::size_t c) const;

    std::size_t offset_unchecked(std::size_t r, std::size_t c) const {
        if (layout_.kind() == LayoutKind::RowWise) return r * padded_cols_ + c;
        const std::size_t b = layout_.block_edge();
        return ((r / b) * blocks_per_row_ + (c / b)) * b * b + (r % b) * b + (c % b);
    }

    /// Offset of the first element of block (block_row, block_col).
    std::size_t block_offset(std::size_t block_row, std::size_t block_col) const {
        const std::size_t b = layout_.block_edge();
        return (block_row * blocks_per_row_ + block_col) * b * b;
    }
    std::size_t blocks_per_row() const { return blocks_per_row_; }

    float at(std::size_t r, std::size_t c) const { return data_[offset_of(r, c)]; }
    float& at(std::size_t r, std::size_t c) { return data_[offset_of(r, c)]; }

    std::uint64_t address_of_offset(std::size_t offset) const {
        return base_address_ + static_cast<std::uint64_t>(offset) * elem_width_;
    }
    std::uint64_t address_of(std::size_t r, std::size_t c) const {
        return address_of_offset(offset_of(r, c));
    }

    /// Logical elements in row-major order, padding dropped.
    std::vector<float> to_row_major() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t padded_rows_ = 0;
    std::size_t padded_cols_ = 0;
    std::size_t blocks_per_row_ = 0;
    LayoutSpec layout_ = LayoutSpec::row_wise();
    std::uint64_t base_address_ = 0;
    std::uint32_t elem_width_ = kDefaultElemWidth;
    std::vector<float> data_;
};

std::size_t offset_of(const Matrix& m, std::size_t r, std::size_t c);

/// Row-wise -> block-wise. Pads with zeros up to the next multiple of
/// block_edge. The result keeps m's base address unless `dest_address` is given.
Matrix to_blockwise(const Matrix& m, std::size_t block_edge);
Matrix to_blockwise(const Matrix& m, std::size_t block_edge, std::uint64_t dest_address, TraceSink& sink);

/// Block-wise -> row-wise, padding stripped.
Matrix from_blockwise(const Matrix& m);
Matrix from_blockwise(const Matrix& m, std::uint64_t dest_address, TraceSink& sink);

enum class ConversionDirection : std::uint8_t { ToBlockWise, FromBlockWise };

/// The read/write address sequence a layout conversion performs.
/// `m` is the source; `dest_address` is where the converted copy lives.
std::vector<TraceEvent> conversion_access_trace(const Matrix& m, ConversionDirection direction,
                                                std::size_t block_edge, std::uint64_t dest_address);

/// Bit-exact comparison of logical elements (shape must match, layouts may differ).
bool logically_equal(const Matrix& a, const Matrix& b);

/// Deterministic 64-byte aligned bump allocator for synthetic addresses.
class AddressAllocator {
public:
    explicit AddressAllocator(std::uint64_t base = 0x10000000, std::uint64_t alignment = 64);

    std::uint64_t allocate(std::uint64_t bytes);
    /// Assigns a fresh address range to `m` and returns its base.
    std::uint64_t place(Matrix& m);
    std::uint64_t next() const { return next_; }

private:
    std::uint64_t next_;
    std::uint64_t alignment_;
};

}  // namespace bwma
