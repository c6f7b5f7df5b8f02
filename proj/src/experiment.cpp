#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "wellsep/errors.hpp"
#include "wellsep/harness.hpp"

namespace wellsep {

CellInstance make_cell_instance(const ExperimentCell& cell, std::uint64_t seed) {
    CellInstance inst;
    inst.host_spec = cell.host;
    inst.h_spec = cell.h;
    inst.h_spec.n = inst.host_spec.clusters * inst.host_spec.cluster_size;
    inst.host_spec.seed = seed;
    inst.h_spec.seed = seed;
    Rng host_rng(Rng::mix(seed ^ 0x686f7374ULL));
    Rng h_rng(Rng::mix(seed ^ 0x68ULL));
    inst.host = generate_host(inst.host_spec, host_rng);
    inst.h = generate_h(inst.h_spec, h_rng);
    inst.refinement = cell.refine ? cell.refine : auto_refinement(inst.host_spec.clusters, cell.params.core.k);
    Rng split_rng(Rng::mix(seed ^ 0x7370ULL));
    inst.partition = refine_partition({inst.host.exceptional, inst.host.clusters}, inst.refinement, split_rng);
    return inst;
}

ExperimentRecord run_cell_trial(const ExperimentCell& cell, std::uint64_t seed) {
    HostSpec hs = cell.host;
    SubgraphSpec ss = cell.h;
    ss.n = hs.clusters * hs.cluster_size;
    hs.seed = seed;
    ss.seed = seed;
    json specs{{"cell", cell.name}, {"host", to_json(hs)}, {"h", to_json(ss)}};

    const auto t0 = std::chrono::steady_clock::now();
    CellInstance inst;
    try {
        inst = make_cell_instance(cell, seed);
    } catch (const std::exception& e) {
        ExperimentRecord rec;
        rec.seed = seed;
        rec.specs = specs;
        StageOutcome out;
        out.stage = "generate";
        out.error_kind = dynamic_cast<const Error*>(&e) ? "generator" : "internal";
        out.message = e.what();
        out.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        rec.stages.push_back(out);
        rec.failed_stage = "generate";
        return rec;
    }
    std::optional<Separation> witness;
    if (cell.use_witness) witness = inst.h.separation;
    auto rec = run_pipeline(inst.h.graph, inst.host.graph, inst.partition, cell.params,
                            Rng::mix(seed ^ 0x706970ULL), witness);
    specs["refinement"] = inst.refinement;
    specs["params"] = rec.specs["params"];
    specs["pipeline_seed"] = rec.seed;
    specs["host_min_degree"] = inst.host.min_degree;
    specs["host_required_min_degree"] = inst.host.required_min_degree;
    specs["host_pair_density"] = inst.host.pair_density;
    rec.specs = specs;
    rec.seed = seed;
    return rec;
}

std::string summary_csv_header() {
    return "cell,trials,successes,success_rate,p50_ms,p90_ms,max_ms,stage_failures";
}

namespace {

double total_ms(const ExperimentRecord& r) {
    double t = 0.0;
    for (const auto& s : r.stages) t += s.millis;
    return t;
}

// Nearest-rank percentile of a sorted sample.
double percentile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw Error("cannot write " + p.string());
    return f;
}

}  // namespace

ExperimentSummary run_experiment(const std::vector<ExperimentCell>& cells, std::uint64_t seed,
                                 const std::string& out_dir) {
    ExperimentSummary out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto& cell = cells[c];
        CellSummary sum;
        sum.name = cell.name.empty() ? "cell" + std::to_string(c) : cell.name;
        sum.trials = cell.trials;
        std::vector<double> times;
        std::map<std::string, std::size_t> failures;
        for (std::size_t t = 0; t < cell.trials; ++t) {
            const std::uint64_t trial_seed = Rng::mix(seed + 1000003ULL * c + t);
            auto rec = run_cell_trial(cell, trial_seed);
            rec.specs["cell"] = sum.name;
            rec.specs["trial"] = t;
            if (rec.success)
                ++sum.successes;
            else
                ++failures[rec.failed_stage];
            times.push_back(total_ms(rec));
            out.records.push_back(std::move(rec));
        }
        std::sort(times.begin(), times.end());
        sum.success_rate = sum.trials ? static_cast<double>(sum.successes) / static_cast<double>(sum.trials) : 0.0;
        sum.p50_ms = percentile(times, 0.5);
        sum.p90_ms = percentile(times, 0.9);
        sum.max_ms = times.empty() ? 0.0 : times.back();
        for (const auto& [stage, n] : failures) sum.stage_failures[stage] = n;
        out.cells.push_back(std::move(sum));
    }
    if (out_dir.empty()) return out;

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create " + out_dir + ": " + ec.message());
    {
        auto f = open_out(fs::path(out_dir) / "records.jsonl");
        for (const auto& r : out.records) f << to_json(r).dump() << '\n';
    }
    {
        json j{{"seed", seed}, {"cells", json::array()}};
        for (const auto& s : out.cells) j["cells"].push_back(to_json(s));
        open_out(fs::path(out_dir) / "summary.json") << j.dump(2) << '\n';
    }
    {
        auto f = open_out(fs::path(out_dir) / "summary.csv");
        f << summary_csv_header() << '\n';
        for (const auto& s : out.cells) {
            std::ostringstream fails;
            bool first = true;
            for (const auto& [stage, n] : s.stage_failures.items()) {
                fails << (first ? "" : ";") << stage << ':' << n.get<std::size_t>();
                first = false;
            }
            f << s.name << ',' << s.trials << ',' << s.successes << ',' << s.success_rate << ','
              << s.p50_ms << ',' << s.p90_ms << ',' << s.max_ms << ',' << fails.str() << '\n';
        }
    }
    return out;
}

}  // namespace wellsep
