// Acceptance suite: one PASS/FAIL line per criterion, with timings.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "../tests/oracles.hpp"
#include "wellsep/errors.hpp"
#include "wellsep/harness.hpp"
#include "wellsep/lp.hpp"

using namespace wellsep;

namespace {

struct Verdict {
    bool pass = false;
    std::string summary;
    double seconds = 0.0;
    double limit = 0.0;  // 0: no runtime limit
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ------------------------------------------------------------ 1. LP duality

Verdict lp_duality() {
    std::size_t cases = 0, bad = 0;
    double worst_opt = 0, worst_res = 0, worst_gap = 0;
    for (std::size_t k = 2; k <= 10; ++k)
        for (double g2 : {0.0, 0.01, 0.1}) {
            ++cases;
            const auto r = solve_assignment_lp(k, g2);
            const double expect = 0.5 + g2 * static_cast<double>(k - 1) / static_cast<double>(k);
            const double opt_err = std::abs(r.primal_objective - expect);
            const double gap = std::abs(r.primal_objective - r.stated_dual.value);
            worst_opt = std::max(worst_opt, opt_err);
            worst_res = std::max(worst_res, r.stated_dual.max_violation);
            worst_gap = std::max({worst_gap, gap, r.duality_gap});
            if (!r.feasible || opt_err > 1e-9 || r.stated_dual.max_violation > 1e-12 || gap > 1e-9 ||
                r.duality_gap > 1e-9)
                ++bad;
        }
    return {bad == 0,
            fmt("%zu/%zu cases; max |opt - closed form| %.1e, max dual residual %.1e, max gap %.1e",
                cases - bad, cases, worst_opt, worst_res, worst_gap),
            0, 1.0};
}

// ------------------------------------------------------------ 2. bandwidth separation

Verdict bandwidth_separation() {
    Rng rng(2024);
    const double inverses[] = {16, 25, 100};
    std::size_t bad = 0;
    double worst_excess = -1;
    for (std::size_t t = 0; t < 200; ++t) {
        const double inv = inverses[t % 3];
        const double beta = 1.0 / inv;
        SubgraphSpec s;
        s.family = HFamily::path_power;
        // any edge stretches at least 1, so n starts at max(50, 1/beta)
        const std::size_t lo = std::max<std::size_t>(50, static_cast<std::size_t>(inv));
        s.n = lo + rng.below(500 - lo + 1);
        s.power = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(beta * s.n + 1e-9)));
        s.dropout = 0.1 * (t % 4);
        s.max_degree = 0;
        Rng r(rng.next());
        const auto h = generate_h(s, r);
        const auto out = bandwidth_separator(h.graph, *h.ordering, beta);
        const auto& sep = out.separation;
        std::size_t largest = sep.separator.size();
        for (const auto& p : sep.components) largest = std::max(largest, p.size());
        const double exact = static_cast<double>(largest) / static_cast<double>(s.n);
        const double bound = std::sqrt(beta) + 2.0 / std::sqrt(inv);
        const bool ok = verify_separation(h.graph, sep, exact).ok && std::abs(exact - sep.alpha_certificate) < 1e-15 &&
                        exact <= bound + 1e-12;
        worst_excess = std::max(worst_excess, exact - std::sqrt(beta));
        if (!ok) ++bad;
    }
    return {bad == 0, fmt("%zu/200 instances pass; max certified ratio over sqrt(beta) %+.4f", 200 - bad, worst_excess),
            0, 5.0};
}

// ------------------------------------------------------------ 3. regularity soundness

Verdict regularity_soundness() {
    Rng rng(3);
    std::size_t mismatches = 0, bad_witness = 0, fact_fail = 0, certified = 0, fact_checks = 0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t s = 2 + rng.below(9);
        const double p = rng.unit();
        std::vector<Edge> e;
        for (Vertex a = 0; a < s; ++a)
            for (Vertex b = 0; b < s; ++b)
                if (rng.bernoulli(p)) e.emplace_back(a, s + b);
        const Graph g(2 * s, e);
        const VertexSet A = VertexSet::range(0, s), B = VertexSet::range(s, 2 * s);
        const double eps = 0.1 + 0.35 * rng.unit();
        const auto cert = check_regular_exact(g, A, B, eps);
        const auto ref = oracle::regularity(g, A, B, eps);
        if ((cert.status == PairStatus::certified_regular) != ref.regular) ++mismatches;
        if (cert.status == PairStatus::refuted) {
            const bool replay = cert.witness_x.size() > eps * s && cert.witness_y.size() > eps * s &&
                                std::abs(density(g, cert.witness_x, cert.witness_y) - density(g, A, B)) >= eps;
            if (!replay) ++bad_witness;
            continue;
        }
        ++certified;
        const double d = density(g, A, B);
        for (std::uint32_t ym = 1; ym < (1u << s); ++ym) {
            if (!(std::popcount(ym) > eps * s)) continue;
            std::vector<Vertex> y;
            for (std::size_t i = 0; i < s; ++i)
                if (ym >> i & 1u) y.push_back(s + i);
            ++fact_checks;
            if (static_cast<double>(low_degree_count(g, A, B, VertexSet(y), d, eps)) > eps * s) ++fact_fail;
        }
    }
    return {mismatches == 0 && bad_witness == 0 && fact_fail == 0,
            fmt("500 pairs: %zu verdict mismatches, %zu bad witnesses; %zu certified, %zu low-degree checks, %zu failures",
                mismatches, bad_witness, certified, fact_checks, fact_fail),
            0, 60.0};
}

// ------------------------------------------------------------ 4. clique factor

Graph dense_graph(std::size_t l, std::size_t floor_deg, Rng& rng) {
    GraphBuilder b(l);
    const double p = rng.unit();
    for (Vertex u = 0; u < l; ++u)
        for (Vertex v = u + 1; v < l; ++v)
            if (rng.bernoulli(p)) b.add_edge(u, v);
    for (Vertex v = 0; v < l; ++v) {
        std::vector<Vertex> missing;
        for (Vertex u = 0; u < l; ++u)
            if (u != v && !b.has_edge(u, v)) missing.push_back(u);
        rng.shuffle(missing);
        std::size_t deg = l - 1 - missing.size();
        for (std::size_t i = 0; deg < floor_deg; ++i, ++deg) b.add_edge(v, missing[i]);
    }
    return b.build();
}

Verdict clique_factor() {
    Rng rng(4);
    std::size_t ok = 0, oracle_agree = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t k = 2 + t % 2;
        const std::size_t l = std::max<std::size_t>(k, 3) + rng.below(12 - std::max<std::size_t>(k, 3) + 1);
        const auto floor_deg = static_cast<std::size_t>(std::ceil((1.0 - 1.0 / k) * l - 1e-9));
        const auto g = dense_graph(l, floor_deg, rng);
        const auto f = find_kfactor(g, k);
        if (f && verify_factor(g, *f, k) && f->covered() >= l - (k - 1)) ++ok;
        if (oracle::factor_exists(g, k) == f.has_value()) ++oracle_agree;
    }
    return {ok == 1000 && oracle_agree == 1000,
            fmt("%zu/1000 verified factors; exhaustive oracle agrees on %zu/1000", ok, oracle_agree), 0, 30.0};
}

// ------------------------------------------------------------ 5. concentration

Verdict concentration() {
    SubgraphSpec s;
    s.family = HFamily::component_union;
    s.n = 1200;
    s.component_size = 30;
    Rng gen(5);
    const auto h = generate_h(s, gen);
    const auto col = chromatic_upper(h.graph);
    const auto f = CliqueFactor::from_cliques(8, 2, {{0, 1}, {2, 3}, {4, 5}, {6, 7}});
    Rng rng(55);
    const auto rep = concentration_report(h.graph, *h.separation, col.color, f, 10000, rng);
    const double allowed = rep.bound + 0.02;
    double max_dev = 0;
    for (double d : rep.max_deviation) max_dev = std::max(max_dev, d);
    return {rep.exceed_fraction <= allowed,
            fmt("l=8, sample std %.2f, lambda %.2f: P(max dev >= lambda std) = %.4f <= %.4f; largest deviation %.1f",
                rep.load_std, rep.lambda, rep.exceed_fraction, allowed, max_dev),
            0, 30.0};
}

// ------------------------------------------------------------ planted runs (6, 7, 8)

struct PlantedRun {
    ExperimentCell cell;
    std::uint64_t seed;
    json record;  // parsed back from its serialized form
};

// H parameters scaled to the pipeline cluster size after refinement.
ExperimentCell planted_cell(std::size_t l, std::size_t m, std::size_t k, const std::string& family) {
    ExperimentCell c;
    c.host.clusters = l;
    c.host.cluster_size = m;
    c.host.k = k;
    c.params.core.k = k;
    c.params.max_degree = 4;
    const std::size_t n = l * m;
    const std::size_t refine = auto_refinement(l, k);
    const std::size_t mp = (m - static_cast<std::size_t>(std::lround(0.01 * m))) / refine;
    const std::size_t t = std::clamp<std::size_t>(mp / 2, 4, 20);
    c.h.n = n;
    c.h.max_degree = 4;
    if (family == "grid") {
        c.h.family = HFamily::grid;
        c.h.rows = 4;
        c.h.bands = (n / 4) / 6;
    } else if (family == "forest") {
        c.h.family = HFamily::forest;
        c.h.component_size = t;
    } else {
        c.h.family = HFamily::component_union;
        c.h.shape = "path";
        c.h.component_size = t;
    }
    c.name = fmt("l%zu-m%zu-k%zu-%s", l, m, k, family.c_str());
    return c;
}

std::vector<PlantedRun> run_cells(const std::vector<ExperimentCell>& cells, std::uint64_t seed,
                                  const std::filesystem::path& dir) {
    run_experiment(cells, seed, dir.string());
    std::ifstream in(dir / "records.jsonl");
    std::vector<PlantedRun> runs;
    std::string line;
    std::size_t idx = 0;
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (std::size_t t = 0; t < cells[c].trials; ++t, ++idx) {
            if (!std::getline(in, line)) throw Error("records.jsonl is short");
            auto j = json::parse(line);
            runs.push_back({cells[c], j.at("seed").get<std::uint64_t>(), std::move(j)});
        }
    return runs;
}

const json* stage_of(const json& rec, const std::string& name) {
    for (const auto& s : rec.at("stages"))
        if (s.at("stage") == name) return &s;
    return nullptr;
}

Verdict end_to_end(const std::filesystem::path& dir, std::vector<PlantedRun>& runs) {
    std::vector<ExperimentCell> cells;
    for (std::size_t l : {4, 6})
        for (std::size_t m : {50, 100})
            for (std::size_t k : {2, 3})
                for (const char* fam : {"grid", "forest", "paths"}) {
                    auto c = planted_cell(l, m, k, fam);
                    c.trials = 50;
                    cells.push_back(c);
                }
    runs = run_cells(cells, 8, dir / "criterion8");
    std::size_t ok = 0, reverified = 0;
    std::map<std::string, std::size_t> failures;
    for (const auto& r : runs) {
        if (!r.record.at("success").get<bool>()) {
            ++failures[r.record.at("failed_stage").get<std::string>()];
            continue;
        }
        ++ok;
        const auto inst = make_cell_instance(r.cell, r.seed);
        const auto phi = r.record.at("phi").get<std::vector<Vertex>>();
        if (verify_embedding(inst.h.graph, *inst.host.graph, phi).ok) ++reverified;
    }
    std::string fails;
    for (const auto& [stage, n] : failures) fails += fmt(" %s:%zu", stage.c_str(), n);
    const double rate = static_cast<double>(ok) / static_cast<double>(runs.size());
    return {rate >= 0.95 && reverified == ok,
            fmt("%zu/%zu runs embed (%.1f%%), %zu re-verified from records.jsonl; failures:%s", ok, runs.size(),
                100 * rate, reverified, fails.empty() ? " none" : fails.c_str()),
            0, 600.0};
}

Verdict balancing(const std::filesystem::path& dir, std::vector<PlantedRun>& runs) {
    std::vector<ExperimentCell> cells;
    for (auto [l, m, k] : {std::tuple{4, 50, 2}, {6, 50, 3}, {4, 100, 2}, {6, 100, 2}}) {
        auto c = planted_cell(l, m, k, "paths");
        c.trials = 25;
        cells.push_back(c);
    }
    runs = run_cells(cells, 7, dir / "criterion7");
    std::size_t terminated = 0, within = 0;
    double worst = 0;
    std::map<std::string, std::size_t> stops;
    for (const auto& r : runs) {
        const json* bal = stage_of(r.record, "balance");
        const json* re = stage_of(r.record, "reassign");
        const json* sr = stage_of(r.record, "super-regularize");
        if (!bal || !bal->at("ok").get<bool>()) {
            ++stops[r.record.at("failed_stage").get<std::string>()];
            continue;
        }
        const auto kappa = re->at("detail").at("kappa").get<std::vector<std::size_t>>();
        const auto sizes = bal->at("detail").at("sizes").get<std::vector<std::size_t>>();
        std::vector<std::size_t> loads(sizes.size(), 0);
        for (auto c : kappa) ++loads.at(c);
        if (loads == sizes) ++terminated;
        const auto& d = bal->at("detail");
        const double moves = d.at("direct").get<double>() + 2.0 * d.at("two_step").get<double>();
        const double eps = r.cell.params.core.eps;
        const double bound = 5.0 * eps * static_cast<double>(r.cell.params.core.k) * static_cast<double>(sizes.size()) *
                             sr->at("detail").at("cluster_size").get<double>();
        worst = std::max(worst, moves / bound);
        if (moves <= bound) ++within;
    }
    std::string s;
    for (const auto& [stage, n] : stops) s += fmt(" %s:%zu", stage.c_str(), n);
    return {terminated == runs.size() && within == runs.size(),
            fmt("%zu/%zu runs balance to |V_i| = L_i, %zu/%zu within 5 eps k l m moves (worst %.2f of the bound);"
                " stopped before balancing:%s",
                terminated, runs.size(), within, runs.size(), worst, s.empty() ? " none" : s.c_str()),
            0, 0};
}

Verdict reassignment(const std::vector<PlantedRun>& runs) {
    std::size_t checked = 0, far = 0, large = 0, nonedges = 0;
    for (const auto& r : runs) {
        const json* re = stage_of(r.record, "reassign");
        const json* fa = stage_of(r.record, "factor");
        if (!re || !re->at("detail").contains("moved_vertices")) continue;
        ++checked;
        const auto inst = make_cell_instance(r.cell, r.seed);
        const Graph& h = inst.h.graph;
        const auto& sep = inst.h.separation->separator;
        const std::size_t k = r.cell.params.core.k;
        const auto moved = re->at("detail").at("moved_vertices").get<std::vector<Vertex>>();
        if (!moved.empty()) {
            // plain BFS from S
            std::vector<std::size_t> dist(h.order(), SIZE_MAX);
            std::vector<Vertex> queue(sep.begin(), sep.end());
            for (auto v : sep) dist[v] = 0;
            for (std::size_t qi = 0; qi < queue.size(); ++qi)
                for (auto w : h.neighbors(queue[qi]))
                    if (dist[w] == SIZE_MAX) {
                        dist[w] = dist[queue[qi]] + 1;
                        queue.push_back(w);
                    }
            for (auto v : moved)
                if (dist[v] > k) ++far;
        }
        const double bound = std::pow(static_cast<double>(max_degree(h)), static_cast<double>(k)) * sep.size();
        if (static_cast<double>(moved.size()) > bound) ++large;
        const auto kappa = re->at("detail").at("kappa").get<std::vector<std::size_t>>();
        const auto red = fa->at("detail").at("restricted_reduced_edges").get<std::vector<Edge>>();
        std::set<Edge> gr(red.begin(), red.end());
        for (auto [x, y] : h.edges()) {
            const auto a = std::min(kappa[x], kappa[y]), b = std::max(kappa[x], kappa[y]);
            if (!gr.count({a, b})) ++nonedges;
        }
    }
    return {checked > 0 && far == 0 && large == 0 && nonedges == 0,
            fmt("%zu pipeline runs scanned: %zu vertices beyond distance k, %zu runs over Delta^k |S|, "
                "%zu H-edges on reduced non-edges",
                checked, far, large, nonedges),
            0, 0};
}

// ------------------------------------------------------------ 9. tiny instances

Verdict tiny_instances() {
    Rng rng(9);
    std::size_t pipeline_claims = 0, brute_claims = 0, unverified = 0, contradictions = 0;
    std::map<std::string, std::size_t> stopped;
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 4 + rng.below(7);
        GraphBuilder hb(n), gb(n);
        const double ph = 0.15 + 0.3 * rng.unit(), pg = 0.6 + 0.4 * rng.unit();
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v) {
                if (rng.bernoulli(ph)) hb.add_edge(u, v);
                if (rng.bernoulli(pg)) gb.add_edge(u, v);
            }
        const Graph h = hb.build();
        auto g = std::make_shared<const Graph>(gb.build());
        PipelineParams params;
        params.core.k = std::max<std::size_t>(2, chromatic_upper(h).classes);
        const auto rec = run_pipeline(h, g, singleton_partition(n), params, rng.next());
        const auto bf = brute_force_embed(h, *g);
        if (rec.phi) {
            ++pipeline_claims;
            if (!verify_embedding(h, *g, *rec.phi).ok) ++unverified;
            if (!bf) ++contradictions;
        } else {
            ++stopped[rec.failed_stage];
        }
        if (bf) {
            ++brute_claims;
            if (!verify_embedding(h, *g, *bf).ok) ++unverified;
        }
    }
    std::string s;
    for (const auto& [stage, c] : stopped) s += fmt(" %s:%zu", stage.c_str(), c);
    return {unverified == 0 && contradictions == 0,
            fmt("300 pairs: pipeline embeds %zu, brute force embeds %zu, %zu unverified claims, %zu contradictions;"
                " pipeline stops:%s",
                pipeline_claims, brute_claims, unverified, contradictions, s.c_str()),
            0, 60.0};
}

// ------------------------------------------------------------ 10. negative construction

// H embeds into K_{4,4,4} iff V(H) splits into three independent sets of size 4.
bool splits_into_three_fours(const Graph& h) {
    std::vector<int> col(h.order(), -1);
    int size[3] = {0, 0, 0};
    std::function<bool(Vertex)> go = [&](Vertex v) {
        if (v == h.order()) return true;
        for (int c = 0; c < 3; ++c) {
            if (size[c] == 4) continue;
            bool ok = true;
            for (Vertex u : h.neighbors(v))
                if (u < v && col[u] == c) ok = false;
            if (!ok) continue;
            col[v] = c;
            ++size[c];
            if (go(v + 1)) return true;
            --size[c];
            col[v] = -1;
        }
        return false;
    };
    return go(0);
}

Verdict negative_construction() {
    std::vector<Edge> ke;
    for (Vertex u = 0; u < 12; ++u)
        for (Vertex v = u + 1; v < 12; ++v)
            if (u / 4 != v / 4) ke.emplace_back(u, v);
    const Graph k444(12, ke);
    std::size_t none = 0, agree = 0;
    std::string per_seed;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SubgraphSpec s;
        s.family = HFamily::matchings_union;
        s.n = 12;
        s.matchings = 5;
        s.max_degree = 5;
        Rng rng(seed);
        const auto h = generate_h(s, rng);
        const auto bf = brute_force_embed(h.graph, k444);
        if (!bf) ++none;
        const bool ok = bf ? verify_embedding(h.graph, k444, *bf).ok : true;
        if (ok && bf.has_value() == splits_into_three_fours(h.graph)) ++agree;
        per_seed += bf ? 'E' : 'N';
    }
    return {agree == 20,
            fmt("H_5 on 6+6 vs K_{4,4,4}: NONE for %zu/20 seeds [%s], independent partition oracle agrees on %zu/20",
                none, per_seed.c_str(), agree),
            0, 120.0};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wellsep acceptance suite"};
    std::vector<int> only;
    std::string out_dir;
    app.add_option("--only", only, "Run only these criteria");
    app.add_option("--out", out_dir, "Directory for experiment records");
    CLI11_PARSE(app, argc, argv);
    namespace fs = std::filesystem;
    fs::path dir = out_dir.empty() ? fs::temp_directory_path() / "wellsep-acceptance" : fs::path(out_dir);
    fs::create_directories(dir);

    auto wanted = [&](int c) { return only.empty() || std::find(only.begin(), only.end(), c) != only.end(); };
    std::vector<PlantedRun> runs7, runs8;
    std::map<int, Verdict> results;
    auto timed = [&](int c, const std::function<Verdict()>& fn) {
        if (!wanted(c)) return;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v.pass = false;
            v.summary = std::string("threw: ") + e.what();
        }
        v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (v.limit > 0 && v.seconds >= v.limit) {
            v.pass = false;
            v.summary += fmt("; runtime %.1f s over the %.0f s limit", v.seconds, v.limit);
        }
        std::cerr << "criterion " << c << " done in " << v.seconds << " s\n";
        results[c] = v;
    };

    timed(1, lp_duality);
    timed(2, bandwidth_separation);
    timed(3, regularity_soundness);
    timed(4, clique_factor);
    timed(5, concentration);
    const bool need_runs = wanted(6);
    if (wanted(7) || need_runs) {
        timed(7, [&] { return balancing(dir, runs7); });
        if (!wanted(7)) results.erase(7);
    }
    if (wanted(8) || need_runs) {
        timed(8, [&] { return end_to_end(dir, runs8); });
        if (!wanted(8)) results.erase(8);
    }
    timed(6, [&] {
        std::vector<PlantedRun> all = runs7;
        all.insert(all.end(), runs8.begin(), runs8.end());
        return reassignment(all);
    });
    timed(9, tiny_instances);
    timed(10, negative_construction);

    bool all = true;
    for (const auto& [c, v] : results) {
        std::cout << "criterion " << c << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.summary
                  << fmt("  [%.2f s]", v.seconds) << '\n';
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
