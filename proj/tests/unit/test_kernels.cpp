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

#include <cmath>
#include <random>

#include "bwma/errors.hpp"
#include "bwma/kernels.hpp"

using namespace bwma;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, float scale = 1.0f) {
    std::uniform_real_distribution<float> d(-scale, scale);
    Matrix m(r, c);
    for (float& v : m.data()) v = d(rng);
    return m;
}

std::vector<std::size_t> offsets(const RecordingSink& s, const Matrix& m, AccessKind kind, std::size_t n) {
    std::vector<std::size_t> out;
    for (auto a : s.addresses(kind)) {
        if (out.size() == n) break;
        out.push_back((a - m.base_address()) / m.elem_width());
    }
    return out;
}

}  // namespace

TEST(Softmax, UniformRow) {
    Matrix m(1, 5);
    for (float& v : m.data()) v = 3.0f;
    NullSink sink;
    const auto r = softmax_rows(m, 1.0f, sink);
    for (std::size_t c = 0; c < 5; ++c) EXPECT_FLOAT_EQ(r.out.at(0, c), 0.2f);
}

TEST(Softmax, TwoElementRow) {
    Matrix m(1, 2);
    m.at(0, 1) = std::log(2.0f);
    NullSink sink;
    const auto r = softmax_rows(m, 1.0f, sink);
    EXPECT_NEAR(r.out.at(0, 0), 1.0f / 3.0f, 1e-6f);
    EXPECT_NEAR(r.out.at(0, 1), 2.0f / 3.0f, 1e-6f);
}

TEST(Softmax, BlockWiseReadOrder) {
    const Matrix m = to_blockwise(Matrix(8, 8), 4);
    RecordingSink sink;
    softmax_rows(m, 1.0f, sink);
    EXPECT_EQ(offsets(sink, m, AccessKind::Read, 8), (std::vector<std::size_t>{0, 1, 2, 3, 16, 17, 18, 19}));
}

TEST(Softmax, RejectsNonPositiveScale) {
    NullSink sink;
    EXPECT_THROW(softmax_rows(Matrix(2, 2), 0.0f, sink), ConfigError);
}

TEST(Softmax, Properties) {
    std::mt19937_64 rng(20);
    NullSink sink;
    for (int t = 0; t < 300; ++t) {
        Matrix m = random_matrix(1 + rng() % 9, 1 + rng() % 40, rng, 10.0f);
        const auto r = softmax_rows(m, 0.125f, sink);
        Matrix shifted = m;
        for (float& v : shifted.data()) v += 3.0f;
        const auto s = softmax_rows(shifted, 0.125f, sink);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            double sum = 0;
            for (std::size_t j = 0; j < m.cols(); ++j) {
                sum += r.out.at(i, j);
                EXPECT_NEAR(r.out.at(i, j), s.out.at(i, j), 1e-6f);
            }
            EXPECT_NEAR(sum, 1.0, 1e-6);
        }
    }
}

TEST(Softmax, LayoutInvariant) {
    std::mt19937_64 rng(21);
    const Matrix m = random_matrix(13, 21, rng);
    NullSink sink;
    const auto rw = softmax_rows(m, 0.5f, sink);
    const auto bw = softmax_rows(to_blockwise(m, 4), 0.5f, sink);
    EXPECT_TRUE(logically_equal(rw.out, bw.out));
}

TEST(LayerNorm, TwoElementRow) {
    Matrix m(1, 2);
    m.at(0, 0) = 1.0f;
    m.at(0, 1) = 3.0f;
    NullSink sink;
    const auto r = layernorm_rows(m, {}, {}, 1e-12f, sink);
    EXPECT_NEAR(r.out.at(0, 0), -1.0f, 1e-5f);
    EXPECT_NEAR(r.out.at(0, 1), 1.0f, 1e-5f);
}

TEST(LayerNorm, ConstantRowIsZero) {
    Matrix m(2, 6);
    for (float& v : m.data()) v = 4.5f;
    NullSink sink;
    const auto r = layernorm_rows(m, {}, {}, kLayerNormEps, sink);
    for (float v : r.out.data()) EXPECT_EQ(v, 0.0f);
}

TEST(LayerNorm, GammaBeta) {
    Matrix m(1, 2);
    m.at(0, 0) = 1.0f;
    m.at(0, 1) = 3.0f;
    const std::vector<float> gamma = {2.0f, 3.0f}, beta = {0.5f, -0.5f};
    NullSink sink;
    const auto r = layernorm_rows(m, gamma, beta, 1e-12f, sink);
    EXPECT_NEAR(r.out.at(0, 0), -1.5f, 1e-5f);
    EXPECT_NEAR(r.out.at(0, 1), 2.5f, 1e-5f);
    EXPECT_THROW(layernorm_rows(m, std::vector<float>{1.0f}, {}, 1e-12f, sink), ShapeError);
    EXPECT_THROW(layernorm_rows(m, {}, {}, 0.0f, sink), ConfigError);
}

TEST(LayerNorm, Properties) {
    std::mt19937_64 rng(22);
    NullSink sink;
    for (int t = 0; t < 300; ++t) {
        const Matrix m = random_matrix(1 + rng() % 8, 16 + rng() % 48, rng, 5.0f);
        const auto r = layernorm_rows(m, {}, {}, kLayerNormEps, sink);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            double mean = 0, var = 0;
            for (std::size_t j = 0; j < m.cols(); ++j) mean += r.out.at(i, j);
            mean /= static_cast<double>(m.cols());
            for (std::size_t j = 0; j < m.cols(); ++j) var += (r.out.at(i, j) - mean) * (r.out.at(i, j) - mean);
            var /= static_cast<double>(m.cols());
            EXPECT_LE(std::abs(mean), 1e-6);
            EXPECT_NEAR(var, 1.0, 1e-4);
        }
    }
}

TEST(Transpose, Involution) {
    std::mt19937_64 rng(23);
    NullSink sink;
    for (int t = 0; t < 100; ++t) {
        const Matrix m = random_matrix(1 + rng() % 20, 1 + rng() % 20, rng);
        const Matrix bw = to_blockwise(m, 1 + rng() % 6);
        EXPECT_TRUE(logically_equal(transpose(transpose(m, sink).out, sink).out, m));
        EXPECT_TRUE(logically_equal(transpose(transpose(bw, sink).out, sink).out, m));
        const Matrix t1 = transpose(bw, sink).out;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (std::size_t c = 0; c < m.cols(); ++c) ASSERT_EQ(t1.at(c, r), m.at(r, c));
        }
    }
}

TEST(Transpose, RowWiseReadOrder) {
    const Matrix m(8, 8);
    RecordingSink sink;
    transpose(m, sink);
    EXPECT_EQ(offsets(sink, m, AccessKind::Read, 8), (std::vector<std::size_t>{0, 8, 16, 24, 32, 40, 48, 56}));
}

TEST(Transpose, BlockWiseReadOrderStaysInBlock) {
    // Destination row 0 of block (0,0) is source column 0 of block (0,0),
    // then destination row 1 is source column 1.
    const Matrix m = to_blockwise(Matrix(8, 8), 4);
    RecordingSink sink;
    const auto r = transpose(m, sink);
    EXPECT_EQ(offsets(sink, m, AccessKind::Read, 8), (std::vector<std::size_t>{0, 4, 8, 12, 1, 5, 9, 13}));
    EXPECT_EQ(count_contiguous_runs(sink.addresses(AccessKind::Write), 4), 1u);
    EXPECT_GT(sink.addresses(AccessKind::Write).front(), m.base_address());
    EXPECT_EQ(r.stats.element_reads, 64u);
}

TEST(Residual, AddZero) {
    std::mt19937_64 rng(24);
    const Matrix a = random_matrix(5, 7, rng);
    NullSink sink;
    EXPECT_TRUE(logically_equal(residual_add(a, Matrix(5, 7), sink).out, a));
}

TEST(Residual, TraceLengthAndLayouts) {
    std::mt19937_64 rng(25);
    const Matrix a = random_matrix(8, 8, rng);
    const Matrix b = random_matrix(8, 8, rng);
    RecordingSink s1, s2;
    const auto rw = residual_add(a, b, s1);
    const auto bw = residual_add(to_blockwise(a, 4), to_blockwise(b, 4), s2);
    EXPECT_EQ(s1.size(), 3u * 64u);
    EXPECT_EQ(s2.size(), 3u * 64u);
    EXPECT_TRUE(logically_equal(rw.out, bw.out));
    EXPECT_THROW(residual_add(a, Matrix(8, 7), s1), ShapeError);
}

TEST(Kernels, RowBandsRestrictWork) {
    std::mt19937_64 rng(26);
    Matrix m = to_blockwise(random_matrix(16, 8, rng), 4);
    const Matrix orig = m;
    const std::vector<std::size_t> bands = {2};
    CountingSink count;
    const auto st = softmax_rows_inplace(m, 1.0f, count, RowBands{4, bands});
    EXPECT_EQ(count.reads(), 2u * 4u * 8u);
    EXPECT_EQ(count.writes(), 4u * 8u);
    EXPECT_EQ(st.compute_cycles, ScalarCosts{}.softmax * 32u);
    for (std::size_t r = 0; r < 16; ++r) {
        for (std::size_t c = 0; c < 8; ++c) {
            if (r < 8 || r >= 12) {
                EXPECT_EQ(m.at(r, c), orig.at(r, c));
            }
        }
    }
}
