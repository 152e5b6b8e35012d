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
#include <list>
#include <span>
#include <vector>

#include "bwma/cache.hpp"
#include "bwma/encoder.hpp"
#include "bwma/trace.hpp"

namespace bwma::reference {

/// Plain row-major matrix used by the oracles.
struct Dense {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> v;

    Dense() = default;
    Dense(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

Dense to_dense(const Matrix& m);

/// Triple loop, accumulating in float in k order.
std::vector<float> naive_gemm_f32(std::span<const float> a, std::span<const float> b, std::size_t m, std::size_t n,
                                  std::size_t p);
Dense naive_gemm(const Dense& a, const Dense& b);

/// Storage index of (r, c) in a blocked layout, computed by walking blocks.
std::size_t blocked_index(std::size_t r, std::size_t c, std::size_t cols, std::size_t b);

/// Independent cache hierarchy: per-set std::list ordered most recent first,
/// one access per element.
class RefHierarchy {
public:
    explicit RefHierarchy(const HierarchyConfig& cfg);

    std::uint64_t access(std::uint32_t core, std::uint64_t addr, AccessKind kind);
    const CacheStats& stats() const { return stats_; }
    const std::vector<std::uint64_t>& core_cycles() const { return cycles_; }

private:
    struct Entry {
        std::uint64_t line;
        bool dirty;
        bool prefetched;
    };
    struct Level {
        std::uint64_t sets;
        std::uint32_t ways;
        std::vector<std::list<Entry>> data;

        Level(std::uint64_t s, std::uint32_t w) : sets(s), ways(w), data(s) {}
        std::list<Entry>& set_of(std::uint64_t line) { return data[line % sets]; }
        Entry* lookup(std::uint64_t line);  // moves to front on hit
        Entry* peek(std::uint64_t line);
        // Returns the evicted entry when a valid line is displaced.
        bool insert(Entry e, Entry& victim);
    };

    std::uint64_t l2_read(std::uint64_t line);
    void l2_write(std::uint64_t line);
    void l1_insert(std::uint32_t core, Entry e);
    void do_prefetch(std::uint32_t core, std::uint64_t line);

    HierarchyConfig cfg_;
    std::vector<Level> l1_;
    Level l2_;
    CacheStats stats_;
    std::vector<std::uint64_t> cycles_;
};

/// Round-robin over per-core event lists, chunk events per core per round.
void ref_interleave(RefHierarchy& h, std::span<const std::vector<TraceEvent>> per_core, std::uint32_t chunk);

/// Dense double-precision encoder layer over row-major inputs (no tiling,
/// no layouts). Weights are read logically from the given matrices.
Dense ref_attention_head(const Dense& x, const HeadWeights& w);
Dense ref_encoder_layer(const Dense& x, const LayerWeights& w, Activation act);

double ref_gelu(double x);
void ref_softmax_rows(Dense& m, double scale);
void ref_layernorm_rows(Dense& m, double eps);

}  // namespace bwma::reference
