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
#include "bwma/reference/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <utility>

#include "bwma/accel.hpp"
#include "bwma/cache.hpp"
#include "bwma/encoder.hpp"
#include "bwma/matrix.hpp"
#include "bwma/reference/reference.hpp"

namespace bwma::reference {

namespace {

using Rng = std::mt19937_64;

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    std::uniform_real_distribution<float> d(-1.0f, 1.0f);
    Matrix m(rows, cols);
    for (float& v : m.data()) v = d(rng);
    return m;
}

Matrix blockwise(const Matrix& m, std::size_t b, Fault fault) {
    Matrix out = to_blockwise(m, b);
    if (fault == Fault::OffsetMap && out.rows() * out.cols() > 1) {
        // (0,0) and (0,1) trade storage slots.
        const auto a = out.offset_of(0, 0);
        const auto c = out.cols() > 1 ? out.offset_of(0, 1) : out.offset_of(1, 0);
        std::swap(out.data()[a], out.data()[c]);
    }
    return out;
}

CheckResult gemm_oracle(Rng& rng, Fault fault) {
    std::uniform_int_distribution<std::size_t> dim(1, 48);
    const std::uint32_t ks[] = {4, 8, 16};
    for (int t = 0; t < 60; ++t) {
        const std::size_t m = dim(rng), n = dim(rng), p = dim(rng);
        const std::uint32_t k = ks[t % 3];
        const Matrix a = random_matrix(m, n, rng);
        const Matrix b = random_matrix(n, p, rng);
        const auto ref = naive_gemm_f32(a.data(), b.data(), m, n, p);
        NullSink sink;
        const bool bw = t % 2 == 1;
        const AcceleratorModel accel = AcceleratorModel::systolic(k);
        const Matrix c = bw ? tiled_gemm(blockwise(a, k, fault), blockwise(b, k, fault), accel, sink).c
                            : tiled_gemm(a, b, accel, sink).c;
        const auto got = c.to_row_major();
        for (std::size_t i = 0; i < ref.size(); ++i) {
            if (std::abs(got[i] - ref[i]) > 1e-5f * std::max(1.0f, std::abs(ref[i]))) {
                std::ostringstream os;
                os << m << "x" << n << "x" << p << " K=" << k << (bw ? " bwma" : " rwma") << " element " << i;
                return {"gemm-oracle", false, os.str()};
            }
        }
    }
    return {"gemm-oracle", true, "60 random shapes"};
}

CheckResult layout_roundtrip(Rng& rng, Fault fault) {
    std::uniform_int_distribution<std::size_t> dim(1, 40);
    const std::size_t bs[] = {2, 4, 8, 16};
    for (int t = 0; t < 100; ++t) {
        const std::size_t r = dim(rng), c = dim(rng), b = bs[t % 4];
        const Matrix m = random_matrix(r, c, rng);
        const Matrix bw = blockwise(m, b, fault);
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < c; ++j) {
                if (bw.data()[blocked_index(i, j, c, b)] != m.at(i, j)) {
                    std::ostringstream os;
                    os << r << "x" << c << " B=" << b << " element (" << i << "," << j << ") misplaced";
                    return {"layout-roundtrip", false, os.str()};
                }
            }
        }
        if (!logically_equal(from_blockwise(bw), m)) {
            std::ostringstream os;
            os << r << "x" << c << " B=" << b << " round trip changed values";
            return {"layout-roundtrip", false, os.str()};
        }
    }
    return {"layout-roundtrip", true, "100 random shapes"};
}

CheckResult cache_oracle(Rng& rng) {
    for (int t = 0; t < 40; ++t) {
        HierarchyConfig cfg;
        cfg.l1 = {256, 32, 2, 2};  // 4 sets
        cfg.l2 = {1024, 32, 8, 20};
        cfg.cores = 1u << (t % 3);
        cfg.prefetch = static_cast<PrefetchPolicy>(t % 3);
        std::uniform_int_distribution<std::uint64_t> addr(0, 4095);
        std::uniform_int_distribution<std::uint32_t> count(1, 12);
        const std::uint32_t strides[] = {0, 4, 8, 32, 68};
        std::bernoulli_distribution write(0.3);
        std::vector<std::vector<TraceEvent>> events(cfg.cores);
        std::vector<std::vector<AccessRun>> runs(cfg.cores);
        for (std::uint32_t c = 0; c < cfg.cores; ++c) {
            for (int i = 0; i < 300; ++i) {
                runs[c].push_back({addr(rng) & ~std::uint64_t{3}, count(rng), strides[rng() % 5],
                                   write(rng) ? AccessKind::Write : AccessKind::Read});
            }
            events[c] = expand(runs[c]);
        }
        MemoryHierarchy h(cfg);
        const auto res = run_trace(h, runs);
        RefHierarchy ref(cfg);
        ref_interleave(ref, events, kDefaultInterleaveChunk);
        if (!(h.stats() == ref.stats())) {
            return {"cache-oracle", false, "trace " + std::to_string(t) + ": counters differ"};
        }
        for (std::uint32_t c = 0; c < cfg.cores; ++c) {
            if (res.per_core_cycles[c] != ref.core_cycles()[c]) {
                return {"cache-oracle", false, "trace " + std::to_string(t) + ": latency differs"};
            }
        }
    }
    return {"cache-oracle", true, "40 random traces"};
}

RunConfig toy_config(LayoutKind layout, std::uint32_t cores) {
    RunConfig cfg;
    cfg.model = ModelConfig::toy();
    cfg.accel = AcceleratorModel::systolic(8);
    cfg.layout = layout;
    cfg.hierarchy.cores = cores;
    return cfg;
}

CheckResult layout_invariance(const VerifyOptions& opts) {
    RunConfig base = toy_config(LayoutKind::RowWise, 1);
    base.seed = opts.seed;
    const Matrix input = make_input(base.model, base.seed);
    const auto weights = seeded_weights(base.model, base.seed);
    const Matrix ref = run_model(input, weights, base).output;
    for (LayoutKind layout : {LayoutKind::RowWise, LayoutKind::BlockWise}) {
        for (std::uint32_t cores : {1u, 2u, 4u}) {
            RunConfig cfg = toy_config(layout, cores);
            cfg.seed = opts.seed;
            if (!logically_equal(run_model(input, weights, cfg).output, ref)) {
                return {"layout-invariance", false,
                        std::string(to_string(layout)) + " with " + std::to_string(cores) + " cores differs"};
            }
        }
    }
    return {"layout-invariance", true, "rwma/bwma x cores 1,2,4 bit-identical"};
}

CheckResult encoder_reference(const VerifyOptions& opts) {
    RunConfig cfg = toy_config(LayoutKind::BlockWise, 1);
    cfg.seed = opts.seed;
    const Matrix input = make_input(cfg.model, cfg.seed);
    const LayerWeights w = make_layer_weights(cfg.model, cfg.seed, 0);
    const Matrix got = run_model(input, seeded_weights(cfg.model, cfg.seed), cfg).output;
    const Dense want = ref_encoder_layer(to_dense(input), w, cfg.activation);
    double worst = 0;
    for (std::size_t r = 0; r < want.rows; ++r) {
        for (std::size_t c = 0; c < want.cols; ++c) worst = std::max(worst, std::abs(got.at(r, c) - want(r, c)));
    }
    std::ostringstream os;
    os << "max abs error " << worst;
    return {"encoder-reference", worst < 1e-3, os.str()};
}

}  // namespace

std::vector<CheckResult> run_verify(const VerifyOptions& opts) {
    Rng rng(opts.seed);
    const std::pair<const char*, std::function<CheckResult()>> checks[] = {
        {"gemm-oracle", [&] { return gemm_oracle(rng, opts.fault); }},
        {"layout-roundtrip", [&] { return layout_roundtrip(rng, opts.fault); }},
        {"cache-oracle", [&] { return cache_oracle(rng); }},
        {"layout-invariance", [&] { return layout_invariance(opts); }},
        {"encoder-reference", [&] { return encoder_reference(opts); }},
    };
    std::vector<CheckResult> out;
    for (const auto& [name, fn] : checks) {
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r = {name, false, std::string("exception: ") + e.what()};
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace bwma::reference
