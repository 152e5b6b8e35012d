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
#include "bwma/reference/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace bwma::reference {

Dense to_dense(const Matrix& m) {
    Dense d(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) d(r, c) = m.at(r, c);
    }
    return d;
}

std::vector<float> naive_gemm_f32(std::span<const float> a, std::span<const float> b, std::size_t m, std::size_t n,
                                  std::size_t p) {
    std::vector<float> c(m * p, 0.0f);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            float acc = 0.0f;
            for (std::size_t k = 0; k < n; ++k) acc += a[i * n + k] * b[k * p + j];
            c[i * p + j] = acc;
        }
    }
    return c;
}

Dense naive_gemm(const Dense& a, const Dense& b) {
    if (a.cols != b.rows) throw std::invalid_argument("naive_gemm: shape mismatch");
    Dense c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.cols; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    }
    return c;
}

std::size_t blocked_index(std::size_t r, std::size_t c, std::size_t cols, std::size_t b) {
    const std::size_t blocks_per_row = (cols + b - 1) / b;
    std::size_t index = 0;
    // Whole block rows above, then whole blocks to the left, then the
    // position inside the block.
    for (std::size_t br = 0; br < r / b; ++br) index += blocks_per_row * b * b;
    for (std::size_t bc = 0; bc < c / b; ++bc) index += b * b;
    return index + (r % b) * b + (c % b);
}

RefHierarchy::Entry* RefHierarchy::Level::lookup(std::uint64_t line) {
    auto& set = set_of(line);
    for (auto it = set.begin(); it != set.end(); ++it) {
        if (it->line == line) {
            set.splice(set.begin(), set, it);
            return &set.front();
        }
    }
    return nullptr;
}

RefHierarchy::Entry* RefHierarchy::Level::peek(std::uint64_t line) {
    for (auto& e : set_of(line)) {
        if (e.line == line) return &e;
    }
    return nullptr;
}

bool RefHierarchy::Level::insert(Entry e, Entry& victim) {
    auto& set = set_of(e.line);
    bool evicted = false;
    if (set.size() == ways) {
        victim = set.back();
        set.pop_back();
        evicted = true;
    }
    set.push_front(e);
    return evicted;
}

RefHierarchy::RefHierarchy(const HierarchyConfig& cfg)
    : cfg_(cfg), l2_(cfg.l2.capacity_bytes / (std::uint64_t{cfg.l2.line_bytes} * cfg.l2.associativity),
                     cfg.l2.associativity) {
    cfg.validate();
    for (std::uint32_t c = 0; c < cfg.cores; ++c) {
        l1_.emplace_back(cfg.l1.capacity_bytes / (std::uint64_t{cfg.l1.line_bytes} * cfg.l1.associativity),
                         cfg.l1.associativity);
    }
    stats_.l1.assign(cfg.cores, {});
    cycles_.assign(cfg.cores, 0);
}

std::uint64_t RefHierarchy::l2_read(std::uint64_t line) {
    ++stats_.l2.accesses;
    if (l2_.lookup(line) != nullptr) {
        ++stats_.l2.hits;
        return cfg_.l2.hit_latency;
    }
    ++stats_.l2.misses;
    ++stats_.mem_reads;
    Entry victim{};
    if (l2_.insert({line, false, false}, victim) && victim.dirty) {
        ++stats_.l2.writebacks;
        ++stats_.mem_writes;
    }
    return std::uint64_t{cfg_.l2.hit_latency} + cfg_.mem_latency;
}

void RefHierarchy::l2_write(std::uint64_t line) {
    ++stats_.l2.accesses;
    if (Entry* e = l2_.lookup(line)) {
        ++stats_.l2.hits;
        e->dirty = true;
        return;
    }
    ++stats_.l2.misses;
    Entry victim{};
    if (l2_.insert({line, true, false}, victim) && victim.dirty) {
        ++stats_.l2.writebacks;
        ++stats_.mem_writes;
    }
}

void RefHierarchy::l1_insert(std::uint32_t core, Entry e) {
    Entry victim{};
    if (l1_[core].insert(e, victim) && victim.dirty) {
        ++stats_.l1[core].writebacks;
        l2_write(victim.line);
    }
}

void RefHierarchy::do_prefetch(std::uint32_t core, std::uint64_t line) {
    if (l1_[core].peek(line) != nullptr) return;
    ++stats_.l1[core].prefetches;
    l2_read(line);
    l1_insert(core, {line, false, true});
}

std::uint64_t RefHierarchy::access(std::uint32_t core, std::uint64_t addr, AccessKind kind) {
    const std::uint64_t line = addr / cfg_.l1.line_bytes;
    LevelStats& st = stats_.l1[core];
    std::uint64_t lat = cfg_.l1.hit_latency;
    ++st.accesses;
    if (Entry* e = l1_[core].lookup(line)) {
        ++st.hits;
        if (kind == AccessKind::Write) e->dirty = true;
        if (e->prefetched) {
            e->prefetched = false;
            ++st.useful_prefetches;
            if (cfg_.prefetch == PrefetchPolicy::TaggedNextLine) do_prefetch(core, line + 1);
        }
    } else {
        ++st.misses;
        lat += l2_read(line);
        l1_insert(core, {line, kind == AccessKind::Write, false});
        if (cfg_.prefetch != PrefetchPolicy::Off) do_prefetch(core, line + 1);
    }
    cycles_[core] += lat;
    return lat;
}

void ref_interleave(RefHierarchy& h, std::span<const std::vector<TraceEvent>> per_core, std::uint32_t chunk) {
    std::vector<std::size_t> pos(per_core.size(), 0);
    bool any = true;
    while (any) {
        any = false;
        for (std::size_t c = 0; c < per_core.size(); ++c) {
            for (std::uint32_t i = 0; i < chunk && pos[c] < per_core[c].size(); ++i, ++pos[c]) {
                const TraceEvent& e = per_core[c][pos[c]];
                h.access(static_cast<std::uint32_t>(c), e.addr, e.kind);
            }
            if (pos[c] < per_core[c].size()) any = true;
        }
    }
}

double ref_gelu(double x) {
    constexpr double kPi = 3.14159265358979323846;
    return 0.5 * x * (1.0 + std::tanh(std::sqrt(2.0 / kPi) * (x + 0.044715 * x * x * x)));
}

void ref_softmax_rows(Dense& m, double scale) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        double mx = -INFINITY;
        for (std::size_t c = 0; c < m.cols; ++c) mx = std::max(mx, m(r, c) * scale);
        double sum = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) sum += std::exp(m(r, c) * scale - mx);
        for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = std::exp(m(r, c) * scale - mx) / sum;
    }
}

void ref_layernorm_rows(Dense& m, double eps) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        double mean = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) mean += m(r, c);
        mean /= static_cast<double>(m.cols);
        double var = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) var += (m(r, c) - mean) * (m(r, c) - mean);
        var /= static_cast<double>(m.cols);
        const double inv = 1.0 / std::sqrt(var + eps);
        for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = (m(r, c) - mean) * inv;
    }
}

Dense ref_attention_head(const Dense& x, const HeadWeights& w) {
    const Dense q = naive_gemm(x, to_dense(w.wq));
    const Dense k = naive_gemm(x, to_dense(w.wk));
    const Dense v = naive_gemm(x, to_dense(w.wv));
    Dense kt(k.cols, k.rows);
    for (std::size_t r = 0; r < k.rows; ++r) {
        for (std::size_t c = 0; c < k.cols; ++c) kt(c, r) = k(r, c);
    }
    Dense s = naive_gemm(q, kt);
    ref_softmax_rows(s, 1.0 / std::sqrt(static_cast<double>(q.cols)));
    return naive_gemm(s, v);
}

Dense ref_encoder_layer(const Dense& x, const LayerWeights& w, Activation act) {
    if (!w.ln1_gamma.empty() || !w.ln2_gamma.empty() || !w.ln1_beta.empty() || !w.ln2_beta.empty()) {
        throw std::invalid_argument("ref_encoder_layer: only identity layernorm parameters are supported");
    }
    Dense concat(x.rows, x.cols);
    std::size_t col = 0;
    for (const auto& h : w.heads) {
        const Dense head = ref_attention_head(x, h);
        for (std::size_t r = 0; r < head.rows; ++r) {
            for (std::size_t c = 0; c < head.cols; ++c) concat(r, col + c) = head(r, c);
        }
        col += head.cols;
    }
    Dense n1 = naive_gemm(concat, to_dense(w.wo));
    for (std::size_t i = 0; i < n1.v.size(); ++i) n1.v[i] += x.v[i];
    ref_layernorm_rows(n1, kLayerNormEps);
    Dense f1 = naive_gemm(n1, to_dense(w.w1));
    for (double& v : f1.v) {
        if (act == Activation::Gelu) v = ref_gelu(v);
        else if (act == Activation::Relu) v = std::max(v, 0.0);
    }
    Dense out = naive_gemm(f1, to_dense(w.w2));
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += n1.v[i];
    ref_layernorm_rows(out, kLayerNormEps);
    return out;
}

}  // namespace bwma::reference
