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
// bwma: run, compare and sweep row-wise vs block-wise memory arrangements
// on a simulated transformer encoder; verify the simulator; replay traces.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bwma/config.hpp"
#include "bwma/errors.hpp"
#include "bwma/experiment.hpp"
#include "bwma/report.hpp"
#include "bwma/trace_file.hpp"
#include "bwma/reference/verify.hpp"

namespace {

using namespace bwma;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

const char* help_for(std::string_view key) {
    static const std::map<std::string_view, const char*> help = {
        {"layout", "memory arrangement: rwma|bwma"},
        {"accel", "accelerator: sa|simd"},
        {"kernel-size", "accelerator kernel size K (also the BWMA block edge)"},
        {"cores", "simulated cores: 1|2|4"},
        {"seq-len", "sequence length S"},
        {"model-dim", "model dimension D"},
        {"heads", "attention heads h"},
        {"head-dim", "per-head dimension (default D/h)"},
        {"ff-dim", "feed-forward dimension F"},
        {"layers", "encoder layers L"},
        {"l1-kb", "L1-D capacity per core in KiB"},
        {"l2-kb", "shared L2 capacity in KiB"},
        {"line-bytes", "cache line size in bytes (both levels)"},
        {"l1-assoc", "L1 associativity"},
        {"l2-assoc", "L2 associativity"},
        {"l1-latency", "L1 hit latency in cycles"},
        {"l2-latency", "L2 hit latency in cycles"},
        {"mem-latency", "main memory latency in cycles"},
        {"prefetch", "L1 next-line prefetcher: on|off (also next-line|tagged)"},
        {"seed", "RNG seed for inputs and weights"},
        {"format", "report format: json|csv|table"},
        {"out", "write the report to this file instead of stdout"},
    };
    const auto it = help.find(key);
    return it == help.end() ? "" : it->second;
}

// Flags mirroring config-file keys, collected in command-line order.
struct SettingFlags {
    std::map<std::string, std::string> values;
    std::string config_path;
    bool toy = false;

    void attach(CLI::App& app) {
        app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
        app.add_flag("--toy", toy, "small preset (S=64 D=96 h=4 F=384 L=1, K=8)");
        for (std::string_view key : config_keys()) {
            if (key == "toy") continue;
            const std::string name(key);
            app.add_option_function<std::string>(
                "--" + name, [this, name](const std::string& v) { values[name] = v; }, help_for(key));
        }
    }

    ExperimentConfig resolve() const {
        KeyValues file;
        if (!config_path.empty()) file = load_config_file(config_path);
        KeyValues flags(values.begin(), values.end());
        if (toy) flags.emplace_back("toy", "true");
        return resolve_config(file, flags);
    }
};

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + out);
    f << text;
}

template <typename T>
std::vector<T> parse_list(const std::string& csv, T (*conv)(const std::string&)) {
    std::vector<T> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(conv(item));
    }
    return out;
}

std::uint32_t to_u32(const std::string& s) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || v == 0 || v > UINT32_MAX) throw ConfigError("invalid list value '" + s + "'");
    return static_cast<std::uint32_t>(v);
}

AcceleratorKind to_accel(const std::string& s) {
    if (s == "sa") return AcceleratorKind::SystolicArray;
    if (s == "simd") return AcceleratorKind::Simd;
    throw ConfigError("invalid accelerator '" + s + "' (expected sa|simd)");
}

int cmd_verify_main(std::uint64_t seed, const std::string& fault) {
    reference::VerifyOptions opts;
    opts.seed = seed;
    if (fault == "offset-map") opts.fault = reference::Fault::OffsetMap;
    else if (fault != "none") throw ConfigError("unknown fault '" + fault + "' (expected none|offset-map)");
    bool ok = true;
    for (const auto& r : reference::run_verify(opts)) {
        std::printf("%-4s %-18s %6.2fs  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                    r.detail.c_str());
        ok = ok && r.passed;
    }
    return ok ? 0 : kExitFailure;
}

int cmd_replay_main(const ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open trace " + path);
    MemoryHierarchy h(cfg.run.hierarchy);
    const TraceRunResult res = replay_trace(h, in);
    const LevelStats l1 = res.stats.l1_total();
    std::ostringstream os;
    os << "l1 accesses " << l1.accesses << " misses " << l1.misses << " writebacks " << l1.writebacks << '\n'
       << "l2 accesses " << res.stats.l2.accesses << " misses " << res.stats.l2.misses << '\n'
       << "mem reads " << res.stats.mem_reads << " writes " << res.stats.mem_writes << '\n'
       << "mem cycles " << res.mem_cycles << '\n';
    emit(os.str(), cfg.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Row-wise vs block-wise memory arrangement simulator for transformer inference"};
    app.require_subcommand(1);

    SettingFlags run_flags, compare_flags, sweep_flags, replay_flags;
    std::string trace_out;
    auto* run = app.add_subcommand("run", "simulate one configuration");
    run_flags.attach(*run);
    run->add_option("--trace-out", trace_out, "also dump every access to a BWMATRC1 trace file");

    auto* compare = app.add_subcommand("compare", "simulate both layouts with identical inputs");
    compare_flags.attach(*compare);

    std::string kernel_list = "8,16", accel_list = "sa,simd", core_list = "1,2,4";
    auto* sweep = app.add_subcommand("sweep", "compare over a grid of kernel sizes, accelerators and cores");
    sweep_flags.attach(*sweep);
    sweep->add_option("--kernel-sizes", kernel_list, "comma-separated kernel sizes")->capture_default_str();
    sweep->add_option("--accels", accel_list, "comma-separated accelerators")->capture_default_str();
    sweep->add_option("--core-counts", core_list, "comma-separated core counts")->capture_default_str();

    std::uint64_t verify_seed = 7;
    std::string fault = "none";
    auto* verify = app.add_subcommand("verify", "run the oracle and property checks at toy scale");
    verify->add_option("--seed", verify_seed, "RNG seed")->capture_default_str();
    verify->add_option("--inject-fault", fault, "none|offset-map (the checks are expected to fail)")
        ->capture_default_str();

    std::string trace_path;
    auto* replay = app.add_subcommand("replay", "run a BWMATRC1 trace file through the cache hierarchy");
    replay_flags.attach(*replay);
    replay->add_option("trace", trace_path, "trace file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            ExperimentConfig cfg = run_flags.resolve();
            std::ofstream trace_file;
            std::optional<TraceWriter> writer;
            if (!trace_out.empty()) {
                trace_file.open(trace_out, std::ios::binary);
                if (!trace_file) throw ConfigError("cannot write " + trace_out);
                writer.emplace(trace_file);
                cfg.run.access_tap = [&writer](std::uint32_t core, const AccessRun& r) {
                    writer->write_run(static_cast<std::uint8_t>(core), r);
                };
            }
            emit(render(cmd_run(cfg), cfg.format), cfg.out);
        } else if (compare->parsed()) {
            const ExperimentConfig cfg = compare_flags.resolve();
            emit(render(cmd_compare(cfg), cfg.format), cfg.out);
        } else if (sweep->parsed()) {
            const ExperimentConfig cfg = sweep_flags.resolve();
            SweepAxes axes;
            axes.kernel_sizes = parse_list<std::uint32_t>(kernel_list, to_u32);
            axes.accels = parse_list<AcceleratorKind>(accel_list, to_accel);
            axes.cores = parse_list<std::uint32_t>(core_list, to_u32);
            for (auto c : axes.cores) {
                if (c != 1 && c != 2 && c != 4) throw ConfigError("core counts must be 1, 2 or 4");
            }
            emit(render(cmd_sweep(cfg, axes), cfg.format), cfg.out);
        } else if (verify->parsed()) {
            return cmd_verify_main(verify_seed, fault);
        } else if (replay->parsed()) {
            return cmd_replay_main(replay_flags.resolve(), trace_path);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "bwma: configuration error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "bwma: %s\n", e.what());
        return kExitFailure;
    }
    return 0;
}
