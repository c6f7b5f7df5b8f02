// Command-line front end. Every subcommand takes --seed, --params and --out;
// exit status is 0 on success, 1 on a stage failure and 2 on bad arguments.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wellsep/errors.hpp"
#include "wellsep/harness.hpp"
#include "wellsep/lp.hpp"

using namespace wellsep;
namespace fs = std::filesystem;

namespace {

constexpr const char* kOutDirEnv = "WELLSEP_OUT_DIR";

struct Common {
    std::uint64_t seed = 0;
    std::string params;
    std::string out;
};

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ArgumentError("cannot read " + path);
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ArgumentError(path + ": " + e.what());
    }
}

// --params takes inline JSON or a path to a JSON file.
json params_json(const Common& c) {
    if (c.params.empty()) return json::object();
    const auto first = c.params.find_first_not_of(" \t\n");
    if (first != std::string::npos && (c.params[first] == '{' || c.params[first] == '[')) {
        try {
            return json::parse(c.params);
        } catch (const json::parse_error& e) {
            throw ArgumentError(std::string("--params: ") + e.what());
        }
    }
    return load_json_file(c.params);
}

Graph load_graph(const std::string& path) {
    if (!fs::exists(path)) throw ArgumentError("no such graph file: " + path);
    return read_edge_list_file(path);
}

fs::path default_dir() {
    const char* env = std::getenv(kOutDirEnv);
    return env && *env ? fs::path(env) : fs::path();
}

// Resolved output file, or empty for stdout.
fs::path output_path(const Common& c, const std::string& fallback_name) {
    if (!c.out.empty()) return c.out;
    const auto dir = default_dir();
    return dir.empty() ? fs::path() : dir / fallback_name;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
}

void emit(const Common& c, const std::string& name, const json& j) {
    write_text(output_path(c, name), j.dump(2) + "\n");
}

PartitionInput load_partition(const std::string& path, std::size_t n) {
    if (path.empty()) return singleton_partition(n);
    const auto j = load_json_file(path);
    PartitionInput p;
    try {
        if (j.contains("exceptional")) p.exceptional = VertexSet(j.at("exceptional").get<std::vector<Vertex>>());
        for (const auto& c : j.at("clusters")) p.clusters.emplace_back(c.get<std::vector<Vertex>>());
    } catch (const json::exception& e) {
        throw ArgumentError(path + ": partition needs 'clusters' (and optional 'exceptional'): " + e.what());
    }
    return p;
}

std::optional<Separation> load_separation(const std::string& path, const Graph& h) {
    if (path.empty()) return std::nullopt;
    const auto j = load_json_file(path);
    return separation_from_json(h, j.contains("separation") ? j.at("separation") : j);
}

json result_json(const ExperimentRecord& rec) { return to_json(rec); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Embedding pipeline for well-separable spanning subgraphs"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", common.seed, "random seed");
        sub->add_option("--params", common.params, "JSON object, inline or as a file path");
        sub->add_option("--out", common.out, std::string("output path (default: stdout or $") + kOutDirEnv + ")");
    };

    std::string graph_path, h_path, partition_path, separation_path, phi_path;
    std::size_t k = 2;
    double gamma2 = 0.0;

    auto* decompose = app.add_subcommand("decompose", "degree-form prune and reduced graph");
    decompose->add_option("--graph", graph_path, "host edge list")->required();
    decompose->add_option("--partition", partition_path, "partition JSON (default: singletons)");
    auto* factor = app.add_subcommand("factor", "K_k factor of a reduced graph");
    factor->add_option("--graph", graph_path, "reduced graph edge list")->required();
    factor->add_option("--k", k, "clique size");
    auto* lp = app.add_subcommand("lp", "exceptional-vertex LP and its dual");
    lp->add_option("--k", k, "clique size");
    lp->add_option("--gamma2", gamma2, "slack gamma''");
    auto* assign = app.add_subcommand("assign", "pipeline through load balancing");
    auto* embed = app.add_subcommand("embed", "full pipeline, emits the embedding");
    for (auto* sub : {assign, embed}) {
        sub->add_option("--subgraph", h_path, "H edge list")->required();
        sub->add_option("--graph", graph_path, "host edge list")->required();
        sub->add_option("--partition", partition_path, "partition JSON (default: singletons)");
        sub->add_option("--separation", separation_path, "separation JSON for H");
    }
    auto* verify = app.add_subcommand("verify", "check an embedding from scratch");
    verify->add_option("--subgraph", h_path, "H edge list")->required();
    verify->add_option("--graph", graph_path, "host edge list")->required();
    verify->add_option("--phi", phi_path, "embedding JSON (array or object with 'phi')")->required();
    auto* gen_host = app.add_subcommand("gen-host", "planted host graph");
    auto* gen_h = app.add_subcommand("gen-h", "well-separable H");
    auto* experiment = app.add_subcommand("experiment", "run an experiment matrix");
    for (auto* sub : {decompose, factor, lp, assign, embed, verify, gen_host, gen_h, experiment}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const json pj = params_json(common);
        if (*decompose) {
            const auto g = std::make_shared<const Graph>(load_graph(graph_path));
            const auto params = pipeline_params_from_json(pj);
            const auto pin = load_partition(partition_path, g->order());
            PruneOptions opt;
            opt.refute_eps = params.eps_regularity;
            opt.heuristic_trials = params.heuristic_trials;
            opt.seed = common.seed;
            const auto part = degree_form_prune(g, pin.exceptional, pin.clusters, params.core.d,
                                                params.core.eps, opt);
            const auto red = reduced_graph(part, params.core.d, params.rule);
            json pairs = json::array();
            for (const auto& c : part.pairs) pairs.push_back(to_json(c));
            std::ostringstream edges;
            write_edge_list(edges, red.graph);
            emit(common, "decompose.json",
                 {{"clusters", part.cluster_count()},
                  {"cluster_size", part.cluster_size},
                  {"pairs", pairs},
                  {"reduced_edge_list", edges.str()},
                  {"reduced_min_degree", red.min_degree},
                  {"c", red.c},
                  {"theta", red.theta},
                  {"required_min_degree", red.required_min_degree},
                  {"bound_holds", red.bound_holds},
                  {"warning", red.warning}});
            return 0;
        }
        if (*factor) {
            const auto gr = load_graph(graph_path);
            if (k < 2 || k > gr.order()) throw ArgumentError("need 2 <= k <= number of clusters");
            FactorSearchStats stats;
            const auto f = find_kfactor(gr, k, &stats);
            json j{{"strategy", stats.strategy}, {"nodes", stats.nodes}, {"found", f.has_value()}};
            if (f) j["factor"] = to_json(*f);
            emit(common, "factor.json", j);
            return f ? 0 : 1;
        }
        if (*lp) {
            if (pj.contains("k")) k = pj.at("k").get<std::size_t>();
            if (pj.contains("gamma2")) gamma2 = pj.at("gamma2").get<double>();
            if (k < 2) throw ArgumentError("k must be at least 2");
            const auto r = solve_assignment_lp(k, gamma2);
            json j{{"k", k}, {"gamma2", gamma2}, {"feasible", r.feasible}};
            if (r.feasible) {
                j["primal"] = r.primal;
                j["optimum"] = r.primal_objective;
                j["dual"] = r.dual;
                j["dual_objective"] = r.dual_objective;
                j["duality_gap"] = r.duality_gap;
                j["closed_form"] = r.closed_form;
                j["claimed_bound"] = r.claimed_bound;
                j["stated_dual"] = r.stated_dual.u;
                j["dual_feasibility_residuals"] = r.stated_dual.residuals;
                j["stated_dual_feasible"] = r.stated_dual.feasible;
            } else {
                j["infeasibility"] = r.infeasibility;
            }
            emit(common, "lp.json", j);
            return r.feasible ? 0 : 1;
        }
        if (*assign || *embed) {
            const auto h = load_graph(h_path);
            const auto g = std::make_shared<const Graph>(load_graph(graph_path));
            const auto params = pipeline_params_from_json(pj);
            const auto pin = load_partition(partition_path, g->order());
            const auto sep = load_separation(separation_path, h);
            const auto rec = run_pipeline(h, g, pin, params, common.seed, sep);
            if (*assign) {
                const auto* bal = rec.stage("balance");
                const bool ok = bal && bal->ok;
                json j{{"ok", ok}, {"record", result_json(rec)}};
                if (ok) j["kappa"] = rec.stage("reassign")->detail.at("kappa");
                emit(common, "assign.json", j);
                return ok ? 0 : 1;
            }
            json j{{"ok", rec.success}, {"record", result_json(rec)}};
            if (rec.phi) j["phi"] = *rec.phi;
            emit(common, "embed.json", j);
            return rec.success ? 0 : 1;
        }
        if (*verify) {
            const auto h = load_graph(h_path);
            const auto g = load_graph(graph_path);
            const auto pjf = load_json_file(phi_path);
            std::vector<Vertex> phi;
            try {
                phi = (pjf.is_object() ? pjf.at("phi") : pjf).get<std::vector<Vertex>>();
            } catch (const json::exception& e) {
                throw ArgumentError(phi_path + ": " + e.what());
            }
            const auto chk = verify_embedding(h, g, phi);
            emit(common, "verify.json", {{"ok", chk.ok}, {"violation", chk.violation}});
            return chk.ok ? 0 : 1;
        }
        if (*gen_host) {
            const auto spec = host_spec_from_json(pj);
            Rng rng(common.seed);
            const auto host = generate_host(spec, rng);
            fs::path edges = output_path(common, "host.edges");
            if (edges.empty()) edges = "host.edges";
            write_edge_list_file(edges.string(), *host.graph);
            json clusters = json::array();
            for (const auto& c : host.clusters) clusters.push_back(c.members());
            json side{{"spec", to_json(spec)},
                      {"exceptional", host.exceptional.members()},
                      {"clusters", clusters},
                      {"factor", to_json(host.factor)},
                      {"pair_density", host.pair_density},
                      {"exceptional_density", host.exceptional_density},
                      {"min_degree", host.min_degree},
                      {"required_min_degree", host.required_min_degree}};
            write_text(edges.string() + ".json", side.dump(2) + "\n");
            return 0;
        }
        if (*gen_h) {
            const auto spec = subgraph_spec_from_json(pj);
            Rng rng(common.seed);
            const auto h = generate_h(spec, rng);
            fs::path edges = output_path(common, "h.edges");
            if (edges.empty()) edges = "h.edges";
            write_edge_list_file(edges.string(), h.graph);
            json side{{"spec", to_json(spec)}};
            if (h.separation) side["separation"] = to_json(*h.separation);
            if (h.ordering) side["ordering"] = {{"order", h.ordering->order}, {"width", h.ordering->width}};
            write_text(edges.string() + ".json", side.dump(2) + "\n");
            return 0;
        }
        if (*experiment) {
            std::vector<ExperimentCell> cells;
            const json& arr = pj.is_object() && pj.contains("cells") ? pj.at("cells") : pj;
            if (arr.is_array())
                for (const auto& c : arr) cells.push_back(cell_from_json(c));
            else if (!arr.empty())
                cells.push_back(cell_from_json(arr));
            fs::path dir = common.out.empty() ? default_dir() : fs::path(common.out);
            if (dir.empty()) dir = "wellsep-out";
            const auto sum = run_experiment(cells, common.seed, dir.string());
            for (const auto& c : sum.cells)
                std::cout << c.name << ": " << c.successes << "/" << c.trials << " succeeded\n";
            return 0;
        }
    } catch (const ArgumentError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
