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
#include "bwma/experiment.hpp"

#include <algorithm>

#include "bwma/errors.hpp"

namespace bwma {

namespace {

bool outputs_identical(const Matrix& a, const Matrix& b) { return logically_equal(a, b); }

CompareReport compare(const RunConfig& base) {
    RunConfig rw = base;
    rw.layout = LayoutKind::RowWise;
    RunConfig bw = base;
    bw.layout = LayoutKind::BlockWise;
    rw.validate();
    bw.validate();
    const Matrix input = make_input(base.model, base.seed);
    const WeightProvider weights = seeded_weights(base.model, base.seed);
    const RunResult r = run_model(input, weights, rw);
    const RunResult b = run_model(input, weights, bw);
    return make_compare_report(make_run_report(rw, r), make_run_report(bw, b), outputs_identical(r.output, b.output));
}

}  // namespace

RunReport cmd_run(const ExperimentConfig& cfg) {
    cfg.run.validate();
    return make_run_report(cfg.run, run_model(cfg.run));
}

CompareReport cmd_compare(const ExperimentConfig& cfg) { return compare(cfg.run); }

std::vector<SweepRow> cmd_sweep(const ExperimentConfig& cfg, const SweepAxes& axes) {
    if (axes.kernel_sizes.empty() || axes.accels.empty() || axes.cores.empty()) {
        throw ConfigError("sweep: every axis needs at least one value");
    }
    auto accels = axes.accels;
    auto ks = axes.kernel_sizes;
    auto cores = axes.cores;
    std::sort(accels.begin(), accels.end());
    std::sort(ks.begin(), ks.end());
    std::sort(cores.begin(), cores.end());

    std::vector<RunConfig> cells;
    std::vector<SweepRow> rows;
    for (auto a : accels) {
        for (auto k : ks) {
            for (auto c : cores) {
                RunConfig rc = cfg.run;
                rc.accel = AcceleratorModel(a, k);
                rc.hierarchy.cores = c;
                rc.validate();
                cells.push_back(rc);
                rows.push_back(SweepRow{a, k, c, {}});
            }
        }
    }
    for (std::size_t i = 0; i < cells.size(); ++i) rows[i].compare = compare(cells[i]);
    return rows;
}

}  // namespace bwma
