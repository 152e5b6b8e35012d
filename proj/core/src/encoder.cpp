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
#include "bwma/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "bwma/errors.hpp"

namespace bwma {

void ModelConfig::validate() const {
    if (seq_len == 0 || model_dim == 0 || heads == 0 || head_dim == 0 || ff_dim == 0 || layers == 0) {
        throw ConfigError("model dimensions must all be positive");
    }
    if (model_dim != heads * head_dim) {
        throw ConfigError("model_dim (" + std::to_string(model_dim) + ") must equal heads x head_dim (" +
                          std::to_string(heads) + " x " + std::to_string(head_dim) + ")");
    }
}

std::string_view component_name(Component c) {
    switch (c) {
        case Component::QkvGemm: return "QKV-GEMM";
        case Component::QktGemm: return "QKT-GEMM";
        case Component::Softmax: return "Softmax";
        case Component::AvGemm: return "AV-GEMM";
        case Component::Projection: return "Projection";
        case Component::AddNorm1: return "AddNorm1";
        case Component::FF1: return "FF1";
        case Component::FF2: return "FF2";
        case Component::AddNorm2: return "AddNorm2";
        case Component::Transpose: return "Transpose";
        case Component::LayoutConversion: return "LayoutConversion";
    }
    return "?";
}

ComponentClass component_class(Component c) {
    switch (c) {
        case Component::Softmax:
        case Component::AddNorm1:
        case Component::AddNorm2:
        case Component::Transpose:
            return ComponentClass::NonGemm;
        case Component::LayoutConversion:
            return ComponentClass::Conversion;
        default:
            return ComponentClass::Gemm;
    }
}

std::array<Component, kComponentCount> all_components() {
    std::array<Component, kComponentCount> out{};
    for (std::size_t i = 0; i < kComponentCount; ++i) out[i] = static_cast<Component>(i);
    return out;
}

ComponentTiming& ComponentTiming::operator+=(const ComponentTiming& o) {
    compute_cycles += o.compute_cycles;
    memory_cycles += o.memory_cycles;
    element_accesses += o.element_accesses;
    cache += o.cache;
    return *this;
}

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, float bound, std::mt19937_64& rng) {
    std::uniform_real_distribution<float> dist(-bound, bound);
    Matrix m(rows, cols);
    for (float& v : m.data()) v = dist(rng);
    return m;
}

std::uint64_t align64(std::uint64_t v) { return (v + 63) & ~std::uint64_t{63}; }

std::uint64_t end_of(const Matrix& m) { return m.base_address() + m.size_bytes(); }

}  // namespace

LayerWeights make_layer_weights(const ModelConfig& cfg, std::uint64_t seed, std::size_t layer) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(layer), 0x5eedu};
    std::mt19937_64 rng(seq);
    constexpr float kBound = 0.1f;
    LayerWeights w;
    w.heads.reserve(cfg.heads);
    for (std::size_t h = 0; h < cfg.heads; ++h) {
        HeadWeights hw;
        hw.wq = random_matrix(cfg.model_dim, cfg.head_dim, kBound, rng);
        hw.wk = random_matrix(cfg.model_dim, cfg.head_dim, kBound, rng);
        hw.wv = random_matrix(cfg.model_dim, cfg.head_dim, kBound, rng);
        w.heads.push_back(std::move(hw));
    }
    w.wo = random_matrix(cfg.model_dim, cfg.model_dim, kBound, rng);
    w.w1 = random_matrix(cfg.model_dim, cfg.ff_dim, kBound, rng);
    w.w2 = random_matrix(cfg.ff_dim, cfg.model_dim, kBound, rng);
    return w;
}

Matrix make_input(const ModelConfig& cfg, std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x1u};
    std::mt19937_64 rng(seq);
    return random_matrix(cfg.seq_len, cfg.model_dim, 1.0f, rng);
}

LayerWeights convert_weights(const LayerWeights& w, const LayoutSpec& layout) {
    if (!layout.is_block_wise()) return w;
    auto conv = [&](const Matrix& m) {
        return m.layout().is_block_wise() ? m : to_blockwise(m, layout.block_edge());
    };
    LayerWeights out;
    for (const auto& h : w.heads) out.heads.push_back({conv(h.wq), conv(h.wk), conv(h.wv)});
    out.wo = conv(w.wo);
    out.w1 = conv(w.w1);
    out.w2 = conv(w.w2);
    out.ln1_gamma = w.ln1_gamma;
    out.ln1_beta = w.ln1_beta;
    out.ln2_gamma = w.ln2_gamma;
    out.ln2_beta = w.ln2_beta;
    return out;
}

void place_weights(LayerWeights& w, AddressAllocator& alloc) {
    for (auto& h : w.heads) {
        alloc.place(h.wq);
        alloc.place(h.wk);
        alloc.place(h.wv);
    }
    alloc.place(w.wo);
    alloc.place(w.w1);
    alloc.place(w.w2);
}

std::vector<std::vector<std::size_t>> partition_multicore(std::size_t items, std::uint32_t cores) {
    if (cores == 0) throw ConfigError("core count must be >= 1");
    std::vector<std::vector<std::size_t>> out(cores);
    for (std::size_t i = 0; i < items; ++i) out[i % cores].push_back(i);
    return out;
}

namespace {

struct HeadWorkspace {
    Matrix q, k, kt, v, scores;

    HeadWorkspace(std::size_t s, std::size_t dq, const LayoutSpec& layout, std::uint32_t ew, AddressAllocator& alloc)
        : q(s, dq, layout, 0, ew), k(s, dq, layout, 0, ew), kt(dq, s, layout, 0, ew), v(s, dq, layout, 0, ew),
          scores(s, s, layout, 0, ew) {
        alloc.place(q);
        alloc.place(k);
        alloc.place(kt);
        alloc.place(v);
        alloc.place(scores);
    }
};

// Per-head steps, shared by attention_head and the engine.
std::uint64_t head_qkv(const Matrix& x, const HeadWeights& w, HeadWorkspace& ws, const AcceleratorModel& accel,
                       TraceSink& sink) {
    std::uint64_t cycles = 0;
    cycles += tiled_gemm_into(x, w.wq, ws.q, accel, sink).compute_cycles;
    cycles += tiled_gemm_into(x, w.wk, ws.k, accel, sink).compute_cycles;
    cycles += tiled_gemm_into(x, w.wv, ws.v, accel, sink).compute_cycles;
    return cycles;
}

std::uint64_t head_transpose(HeadWorkspace& ws, TraceSink& sink, const ScalarCosts& costs) {
    return transpose_into(ws.k, ws.kt, sink, costs).compute_cycles;
}

std::uint64_t head_scores(HeadWorkspace& ws, const AcceleratorModel& accel, TraceSink& sink) {
    return tiled_gemm_into(ws.q, ws.kt, ws.scores, accel, sink).compute_cycles;
}

std::uint64_t head_softmax(HeadWorkspace& ws, std::size_t head_dim, TraceSink& sink, const ScalarCosts& costs) {
    const float scale = 1.0f / std::sqrt(static_cast<float>(head_dim));
    return softmax_rows_inplace(ws.scores, scale, sink, {}, costs).compute_cycles;
}

std::uint64_t head_av(HeadWorkspace& ws, Matrix& out, std::size_t col_offset, const AcceleratorModel& accel,
                      TraceSink& sink) {
    GemmOptions opts;
    opts.c_col_offset = col_offset;
    return tiled_gemm_into(ws.scores, ws.v, out, accel, sink, opts).compute_cycles;
}

void check_weights(const Matrix& x, const LayerWeights& w) {
    auto check = [&](const Matrix& m) {
        if (m.layout() != x.layout()) throw LayoutError("encoder: weights must be in the activation layout");
    };
    for (const auto& h : w.heads) {
        check(h.wq);
        check(h.wk);
        check(h.wv);
    }
    check(w.wo);
    check(w.w1);
    check(w.w2);
}

// Runs one encoder layer at a time over a fixed workspace, timing every
// component in its own measurement window.
class EncoderEngine {
public:
    EncoderEngine(const ModelConfig& cfg, const AcceleratorModel& accel, const LayoutSpec& layout,
                  MemoryHierarchy& h, Activation act, const ScalarCosts& costs, std::uint32_t chunk,
                  std::uint32_t elem_width, AddressAllocator& alloc)
        : cfg_(cfg), accel_(accel), layout_(layout), h_(h), act_(act), costs_(costs), chunk_(chunk),
          cores_(h.cores()) {
        const std::size_t s = cfg.seq_len;
        for (std::uint32_t c = 0; c < cores_; ++c) heads_.emplace_back(s, cfg.head_dim, layout, elem_width, alloc);
        concat_ = Matrix(s, cfg.model_dim, layout, 0, elem_width);
        proj_ = Matrix(s, cfg.model_dim, layout, 0, elem_width);
        norm1_ = Matrix(s, cfg.model_dim, layout, 0, elem_width);
        ff1_ = Matrix(s, cfg.ff_dim, layout, 0, elem_width);
        ff2_ = Matrix(s, cfg.model_dim, layout, 0, elem_width);
        for (Matrix* m : {&concat_, &proj_, &norm1_, &ff1_, &ff2_}) alloc.place(*m);
        const std::size_t k = accel.kernel_size();
        tile_rows_ = partition_multicore((s + k - 1) / k, cores_);
    }

    void run_layer(const Matrix& x, const LayerWeights& w, Matrix& out, TimingTable& timing) {
        check_weights(x, w);
        if (w.heads.size() != cfg_.heads) throw ShapeError("encoder: wrong number of head weight sets");
        const std::size_t k = accel_.kernel_size();

        for (std::size_t first = 0; first < cfg_.heads; first += cores_) {
            const std::size_t group = std::min<std::size_t>(cores_, cfg_.heads - first);
            auto per_head = [&](auto&& step) {
                std::vector<Work> work;
                for (std::size_t c = 0; c < group; ++c) {
                    work.push_back([step, c, first](TraceSink& sink) { return step(c, first + c, sink); });
                }
                return work;
            };
            window(Component::QkvGemm, timing, per_head([&](std::size_t c, std::size_t head, TraceSink& s) {
                       return head_qkv(x, w.heads[head], heads_[c], accel_, s);
                   }));
            window(Component::Transpose, timing, per_head([&](std::size_t c, std::size_t, TraceSink& s) {
                       return head_transpose(heads_[c], s, costs_);
                   }));
            window(Component::QktGemm, timing, per_head([&](std::size_t c, std::size_t, TraceSink& s) {
                       return head_scores(heads_[c], accel_, s);
                   }));
            window(Component::Softmax, timing, per_head([&](std::size_t c, std::size_t, TraceSink& s) {
                       return head_softmax(heads_[c], cfg_.head_dim, s, costs_);
                   }));
            window(Component::AvGemm, timing, per_head([&](std::size_t c, std::size_t head, TraceSink& s) {
                       return head_av(heads_[c], concat_, head * cfg_.head_dim, accel_, s);
                   }));
        }

        window(Component::Projection, timing, gemm_work(concat_, w.wo, proj_, Activation::None));
        window(Component::AddNorm1, timing, add_norm_work(x, proj_, norm1_, w.ln1_gamma, w.ln1_beta, k));
        window(Component::FF1, timing, gemm_work(norm1_, w.w1, ff1_, act_));
        window(Component::FF2, timing, gemm_work(ff1_, w.w2, ff2_, Activation::None));
        window(Component::AddNorm2, timing, add_norm_work(norm1_, ff2_, out, w.ln2_gamma, w.ln2_beta, k));
    }

    using Work = std::function<std::uint64_t(TraceSink&)>;

    // Runs per-core work items (index = core) as one measurement window.
    void window(Component comp, TimingTable& timing, const std::vector<Work>& work) {
        const CacheStats before = h_.stats();
        std::vector<std::uint64_t> compute(work.size(), 0);
        std::vector<std::function<void(TraceSink&)>> gens;
        for (std::size_t i = 0; i < work.size(); ++i) {
            gens.push_back([&, i](TraceSink& sink) {
                CountingSink counter;
                TeeSink tee(sink, counter);
                compute[i] = work[i](tee);
                accesses_[i] = counter.total();
            });
        }
        accesses_.assign(work.size(), 0);
        const auto mem = run_concurrent(h_, gens, chunk_);
        ComponentTiming& t = timing[static_cast<std::size_t>(comp)];
        t.compute_cycles += *std::max_element(compute.begin(), compute.end());
        t.memory_cycles += *std::max_element(mem.begin(), mem.end());
        for (auto a : accesses_) t.element_accesses += a;
        t.cache += h_.stats() - before;
    }

private:
    std::vector<Work> gemm_work(const Matrix& a, const Matrix& b, Matrix& c, Activation act) {
        std::vector<Work> work;
        for (std::uint32_t core = 0; core < cores_; ++core) {
            if (tile_rows_[core].empty()) continue;
            work.push_back([&, core, act](TraceSink& sink) {
                GemmOptions opts;
                opts.activation = act;
                opts.tile_rows = tile_rows_[core];
                return tiled_gemm_into(a, b, c, accel_, sink, opts).compute_cycles;
            });
        }
        return work;
    }

    std::vector<Work> add_norm_work(const Matrix& a, const Matrix& b, Matrix& out, const std::vector<float>& gamma,
                                    const std::vector<float>& beta, std::size_t band_rows) {
        std::vector<Work> work;
        for (std::uint32_t core = 0; core < cores_; ++core) {
            if (tile_rows_[core].empty()) continue;
            work.push_back([&, core, band_rows](TraceSink& sink) {
                const RowBands bands{band_rows, tile_rows_[core]};
                std::uint64_t cycles = residual_add_into(a, b, out, sink, bands, costs_).compute_cycles;
                cycles += layernorm_rows_inplace(out, gamma, beta, kLayerNormEps, sink, bands, costs_).compute_cycles;
                return cycles;
            });
        }
        return work;
    }

    ModelConfig cfg_;
    AcceleratorModel accel_;
    LayoutSpec layout_;
    MemoryHierarchy& h_;
    Activation act_;
    ScalarCosts costs_;
    std::uint32_t chunk_;
    std::uint32_t cores_;
    std::vector<HeadWorkspace> heads_;
    Matrix concat_, proj_, norm1_, ff1_, ff2_;
    std::vector<std::vector<std::size_t>> tile_rows_;
    std::vector<std::uint64_t> accesses_;
};

std::uint64_t highest_end(const Matrix& x, const LayerWeights& w) {
    std::uint64_t end = end_of(x);
    for (const auto& h : w.heads) end = std::max({end, end_of(h.wq), end_of(h.wk), end_of(h.wv)});
    return std::max({end, end_of(w.wo), end_of(w.w1), end_of(w.w2)});
}

}  // namespace

Matrix attention_head(const Matrix& x, const HeadWeights& w, const AcceleratorModel& accel, TraceSink& sink) {
    if (w.wq.rows() != x.cols() || w.wk.rows() != x.cols() || w.wv.rows() != x.cols()) {
        throw ShapeError("attention_head: weight rows must equal the model dimension");
    }
    if (w.wq.cols() != w.wk.cols() || w.wq.cols() != w.wv.cols()) {
        throw ShapeError("attention_head: Q/K/V weights must share one head dimension");
    }
    std::uint64_t end = std::max({end_of(x), end_of(w.wq), end_of(w.wk), end_of(w.wv)});
    AddressAllocator alloc(align64(end));
    const std::size_t dq = w.wq.cols();
    HeadWorkspace ws(x.rows(), dq, x.layout(), x.elem_width(), alloc);
    Matrix out(x.rows(), dq, x.layout(), 0, x.elem_width());
    alloc.place(out);
    const ScalarCosts costs;
    head_qkv(x, w, ws, accel, sink);
    head_transpose(ws, sink, costs);
    head_scores(ws, accel, sink);
    head_softmax(ws, dq, sink, costs);
    head_av(ws, out, 0, accel, sink);
    return out;
}

LayerResult encoder_layer(const Matrix& x, const LayerWeights& w, const AcceleratorModel& accel,
                          MemoryHierarchy& hierarchy, Activation activation) {
    if (w.heads.empty()) throw ShapeError("encoder_layer: no heads");
    ModelConfig cfg;
    cfg.seq_len = x.rows();
    cfg.model_dim = x.cols();
    cfg.heads = w.heads.size();
    cfg.head_dim = w.heads[0].wq.cols();
    cfg.ff_dim = w.w1.cols();
    cfg.layers = 1;
    cfg.validate();
    AddressAllocator alloc(align64(highest_end(x, w)));
    EncoderEngine engine(cfg, accel, x.layout(), hierarchy, activation, ScalarCosts{}, kDefaultInterleaveChunk,
                         x.elem_width(), alloc);
    LayerResult res{Matrix(x.rows(), x.cols(), x.layout(), 0, x.elem_width()), {}};
    alloc.place(res.out);
    engine.run_layer(x, w, res.out, res.timing);
    return res;
}

LayoutSpec RunConfig::layout_spec() const {
    return layout == LayoutKind::BlockWise ? LayoutSpec::block_wise(accel.kernel_size()) : LayoutSpec::row_wise();
}

void RunConfig::validate() const {
    model.validate();
    hierarchy.validate();
    if (interleave_chunk == 0) throw ConfigError("interleave chunk must be >= 1");
    const std::size_t k = accel.kernel_size();
    const std::pair<const char*, std::size_t> dims[] = {{"seq_len", model.seq_len},
                                                        {"model_dim", model.model_dim},
                                                        {"head_dim", model.head_dim},
                                                        {"ff_dim", model.ff_dim}};
    for (const auto& [name, v] : dims) {
        if (v % k != 0) {
            throw ConfigError(std::string(name) + " = " + std::to_string(v) + " is not a multiple of kernel size " +
                              std::to_string(k));
        }
    }
}

WeightProvider seeded_weights(const ModelConfig& cfg, std::uint64_t seed) {
    return [cfg, seed](std::size_t layer) { return make_layer_weights(cfg, seed, layer); };
}

RunResult run_model(const Matrix& input, const WeightProvider& weights, const RunConfig& cfg) {
    cfg.validate();
    if (input.rows() != cfg.model.seq_len || input.cols() != cfg.model.model_dim) {
        throw ShapeError("run_model: input must be seq_len x model_dim");
    }
    if (input.layout().is_block_wise()) throw LayoutError("run_model: input must be row-wise");

    const LayoutSpec layout = cfg.layout_spec();
    const bool blockwise = layout.is_block_wise();
    const std::uint32_t ew = input.elem_width();
    MemoryHierarchy h(cfg.hierarchy);
    h.set_tap(cfg.access_tap);
    AddressAllocator alloc;

    Matrix x_in = input;
    alloc.place(x_in);
    Matrix io[2] = {Matrix(cfg.model.seq_len, cfg.model.model_dim, layout, 0, ew),
                    Matrix(cfg.model.seq_len, cfg.model.model_dim, layout, 0, ew)};
    alloc.place(io[0]);
    alloc.place(io[1]);
    Matrix output(cfg.model.seq_len, cfg.model.model_dim, LayoutSpec::row_wise(), 0, ew);
    alloc.place(output);

    EncoderEngine engine(cfg.model, cfg.accel, layout, h, cfg.activation, cfg.costs, cfg.interleave_chunk, ew, alloc);

    RunResult result;
    TimingTable& timing = result.components;
    const std::uint64_t conversion_cost = cfg.costs.conversion;
    if (blockwise) {
        engine.window(Component::LayoutConversion, timing, {[&](TraceSink& sink) {
                          io[0] = to_blockwise(x_in, layout.block_edge(), io[0].base_address(), sink);
                          return conversion_cost * io[0].padded_rows() * io[0].padded_cols();
                      }});
    } else {
        std::copy(x_in.data().begin(), x_in.data().end(), io[0].data().begin());
    }

    // Every layer's weights get a fixed slot so addresses do not depend on
    // when a layer is materialized.
    const std::uint64_t weights_base = alloc.next();
    std::uint64_t layer_stride = 0;
    for (std::size_t l = 0; l < cfg.model.layers; ++l) {
        LayerWeights w = convert_weights(weights(l), layout);
        if (l == 0) {
            AddressAllocator probe(weights_base);
            LayerWeights tmp = w;
            place_weights(tmp, probe);
            layer_stride = probe.next() - weights_base;
        }
        AddressAllocator slot(weights_base + l * layer_stride);
        place_weights(w, slot);
        engine.run_layer(io[l % 2], w, io[(l + 1) % 2], timing);
    }

    const Matrix& last = io[cfg.model.layers % 2];
    if (blockwise) {
        engine.window(Component::LayoutConversion, timing, {[&](TraceSink& sink) {
                          output = from_blockwise(last, output.base_address(), sink);
                          return conversion_cost * last.rows() * last.cols();
                      }});
    } else {
        std::copy(last.data().begin(), last.data().end(), output.data().begin());
    }

    result.output = std::move(output);
    result.cache = h.stats();
    for (const auto& t : timing) result.total_cycles += t.total_cycles();
    return result;
}

RunResult run_model(const RunConfig& cfg) {
    cfg.validate();
    return run_model(make_input(cfg.model, cfg.seed), seeded_weights(cfg.model, cfg.seed), cfg);
}

}  // namespace bwma
