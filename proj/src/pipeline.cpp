#include <chrono>
#include <cmath>
#include <functional>

#include "wellsep/errors.hpp"
#include "wellsep/harness.hpp"
#include "wellsep/lp.hpp"

namespace wellsep {

const StageOutcome* ExperimentRecord::stage(const std::string& name) const {
    for (const auto& s : stages)
        if (s.stage == name) return &s;
    return nullptr;
}

json ExperimentRecord::replay_key() const {
    json j;
    j["seed"] = seed;
    j["success"] = success;
    j["failed_stage"] = failed_stage;
    j["stages"] = json::array();
    for (const auto& s : stages)
        j["stages"].push_back({{"stage", s.stage},
                               {"ok", s.ok},
                               {"error_kind", s.error_kind},
                               {"message", s.message},
                               {"detail", s.detail}});
    j["phi"] = phi ? json(*phi) : json(nullptr);
    return j;
}

PartitionInput singleton_partition(std::size_t n) {
    PartitionInput p;
    for (Vertex v = 0; v < n; ++v) p.clusters.push_back(VertexSet{v});
    return p;
}

PartitionInput refine_partition(const PartitionInput& p, std::size_t parts, Rng& rng) {
    if (parts == 0) throw ArgumentError("refinement needs at least one part");
    if (parts == 1) return p;
    std::size_t size = SIZE_MAX;
    for (const auto& c : p.clusters) size = std::min(size, c.size());
    const std::size_t piece = size / parts;
    if (piece == 0) throw ArgumentError("clusters too small to split into " + std::to_string(parts));
    PartitionInput out;
    std::vector<Vertex> rest = p.exceptional.members();
    for (const auto& c : p.clusters) {
        std::vector<Vertex> vs = c.members();
        rng.shuffle(vs);
        for (std::size_t t = 0; t < parts; ++t)
            out.clusters.emplace_back(std::vector<Vertex>(vs.begin() + t * piece, vs.begin() + (t + 1) * piece));
        rest.insert(rest.end(), vs.begin() + parts * piece, vs.end());
    }
    out.exceptional = VertexSet(std::move(rest));
    return out;
}

std::size_t auto_refinement(std::size_t l, std::size_t k) {
    if (k == 0 || l == 0 || l / k >= 2) return 1;
    for (std::size_t r = 2;; ++r)
        if ((l * r) % k == 0 && l * r / k >= 2) return r;
}

namespace {

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const ArgumentError*>(&e)) return "argument";
    if (dynamic_cast<const ParseError*>(&e)) return "parse";
    if (dynamic_cast<const PreconditionError*>(&e)) return "precondition";
    if (dynamic_cast<const StructuralError*>(&e)) return "structural";
    if (dynamic_cast<const RegimeError*>(&e)) return "regime";
    if (dynamic_cast<const HostRegimeError*>(&e)) return "host-regime";
    if (dynamic_cast<const InconsistencyError*>(&e)) return "inconsistency";
    if (dynamic_cast<const BalanceError*>(&e)) return "balance";
    if (dynamic_cast<const Error*>(&e)) return "error";
    return "internal";
}

/// Stage failure that carries structured detail into the record.
class StageFailure : public Error {
  public:
    StageFailure(std::string kind, const std::string& what, json detail)
        : Error(what), kind_(std::move(kind)), detail_(std::move(detail)) {}
    const std::string& kind() const { return kind_; }
    const json& detail() const { return detail_; }

  private:
    std::string kind_;
    json detail_;
};

json pair_summary(const RegularPartition& part) {
    std::size_t certified = 0, refuted = 0, uncertified = 0, emptied = 0;
    for (const auto& c : part.pairs) {
        certified += c.status == PairStatus::certified_regular;
        refuted += c.status == PairStatus::refuted;
        uncertified += c.status == PairStatus::uncertified;
        emptied += c.emptied;
    }
    return {{"certified_regular", certified},
            {"refuted", refuted},
            {"uncertified", uncertified},
            {"emptied", emptied}};
}

// Smallest min-degree ratio over intra-clique pairs, in the given graph.
json super_regularity_summary(const Graph& g, const std::vector<VertexSet>& clusters,
                              const CliqueFactor& factor, double delta) {
    double worst = 1.0;
    bool holds = true;
    for (const auto& q : factor.cliques)
        for (std::size_t a = 0; a < q.size(); ++a)
            for (std::size_t b = a + 1; b < q.size(); ++b) {
                const auto& A = clusters[q[a]];
                const auto& B = clusters[q[b]];
                if (A.empty() || B.empty()) continue;
                const auto s = measure_super_regularity(g, A, B, 0.0, delta);
                holds = holds && s.holds;
                worst = std::min({worst, static_cast<double>(s.min_degree_a) / static_cast<double>(B.size()),
                                  static_cast<double>(s.min_degree_b) / static_cast<double>(A.size())});
            }
    return {{"min_degree_ratio", worst}, {"holds", holds}};
}

std::vector<std::size_t> cluster_sizes(const RegularPartition& p) {
    std::vector<std::size_t> out;
    for (const auto& c : p.clusters) out.push_back(c.size());
    return out;
}

}  // namespace

ExperimentRecord run_pipeline(const Graph& h, std::shared_ptr<const Graph> g,
                              const PartitionInput& partition, const PipelineParams& params,
                              std::uint64_t seed, const std::optional<Separation>& witness) {
    if (!g) throw ArgumentError("host graph is null");
    if (h.order() != g->order())
        throw ArgumentError("H has " + std::to_string(h.order()) + " vertices but G has " +
                            std::to_string(g->order()) + "; the embedding must be spanning");

    ExperimentRecord rec;
    rec.seed = seed;
    rec.specs["params"] = to_json(params);
    Rng root(seed);
    Rng rs_sep = root.split(), rs_dist = root.split(), rs_map = root.split(),
        rs_reassign = root.split(), rs_balance = root.split(), rs_embed = root.split();
    const std::uint64_t prune_seed = root.next();

    const Parameters& P = params.core;
    const std::size_t k = P.k;
    const double delta = P.delta_value();
    bool alive = true;

    auto stage = [&](const std::string& name, const std::function<json()>& body) {
        if (!alive) return;
        StageOutcome out;
        out.stage = name;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            out.detail = body();
            out.ok = true;
        } catch (const StageFailure& e) {
            out.error_kind = e.kind();
            out.message = e.what();
            out.detail = e.detail();
        } catch (const std::exception& e) {
            out.error_kind = error_kind(e);
            out.message = e.what();
        }
        out.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        if (!out.ok) {
            alive = false;
            rec.failed_stage = name;
        }
        rec.stages.push_back(std::move(out));
    };

    Coloring col;
    Separation sep;
    RegularPartition part;
    ReducedGraph red;
    FactorRestriction fr;
    SuperRegularization sr;
    Distribution dist;
    Mapping mapping;
    Assignment kappa;
    Restrictions restr;
    std::vector<Vertex> phi;

    stage("coloring", [&] {
        P.validate();
        rec.warnings = P.regime_warnings();
        if (params.max_degree != 0 && h.order() > 0 && max_degree(h) > params.max_degree)
            throw PreconditionError("Delta(H) = " + std::to_string(max_degree(h)) +
                                    " exceeds the cap " + std::to_string(params.max_degree));
        col = chromatic_upper(h);
        if (col.classes > k)
            throw PreconditionError("coloring of H uses " + std::to_string(col.classes) +
                                    " classes, more than k = " + std::to_string(k) +
                                    (col.exact ? " (exact)" : " (upper bound)"));
        return json{{"classes", col.classes}, {"exact", col.exact}};
    });

    stage("separate", [&] {
        json d;
        if (witness) {
            sep = *witness;
            const auto chk = verify_separation(h, sep, sep.alpha_certificate + 1e-12);
            if (!chk.ok) throw StructuralError("separation witness rejected: " + chk.detail);
            d["strategy"] = "witness";
        } else {
            auto found = find_separator(h, params.alpha, rs_sep.next());
            d["strategy"] = found.strategy;
            if (found.separation) {
                sep = *found.separation;
            } else {
                sep = separation_from_separator(h, VertexSet());
                rec.warnings.push_back("no " + std::to_string(params.alpha) +
                                       "-separation found; using the components of H");
                d["fallback"] = true;
            }
        }
        const std::size_t delta_h = h.order() ? max_degree(h) : 0;
        const auto thr = alpha_threshold(P.eps, partition.clusters.size(), delta_h, k);
        d["separator"] = sep.separator.size();
        d["components"] = sep.components.size();
        d["largest_component"] = sep.largest_component();
        d["alpha_certificate"] = sep.alpha_certificate;
        d["alpha_threshold"] = {{"concentration", thr.concentration},
                                {"reassignment", thr.reassignment},
                                {"combined", thr.combined},
                                {"satisfied", sep.alpha_certificate <= thr.combined}};
        if (sep.alpha_certificate > thr.combined)
            rec.warnings.push_back("separation ratio " + std::to_string(sep.alpha_certificate) +
                                   " is above the alpha threshold " + std::to_string(thr.combined));
        return d;
    });

    stage("decompose", [&] {
        PruneOptions opt;
        opt.refute_eps = params.eps_regularity;
        opt.heuristic_trials = params.heuristic_trials;
        opt.seed = prune_seed;
        part = degree_form_prune(g, partition.exceptional, partition.clusters, P.d, P.eps, opt);
        red = reduced_graph(part, P.d, params.rule);
        if (!red.bound_holds) rec.warnings.push_back(red.warning);
        return json{{"clusters", part.cluster_count()},
                    {"cluster_size", part.cluster_size},
                    {"exceptional", part.exceptional.size()},
                    {"pairs", pair_summary(part)},
                    {"reduced_edges", red.graph.edge_count()},
                    {"reduced_min_degree", red.min_degree},
                    {"min_degree_required", red.required_min_degree},
                    {"min_degree_bound_holds", red.bound_holds}};
    });

    stage("factor", [&] {
        FactorSearchStats stats;
        const std::size_t l = red.graph.order();
        if (k > l) throw HostRegimeError("reduced graph has fewer than k clusters");
        auto f = find_kfactor(red.graph, k, &stats);
        const double hs = (1.0 - 1.0 / static_cast<double>(k)) * static_cast<double>(l);
        json d{{"strategy", stats.strategy},
               {"nodes", stats.nodes},
               {"threshold_met", static_cast<double>(red.min_degree) >= hs - 1e-9}};
        if (!f) throw StageFailure("host-regime", "no K_" + std::to_string(k) + " factor found", d);
        std::string why;
        if (!verify_factor(red.graph, *f, k, &why)) throw InconsistencyError("factor rejected: " + why);
        fr = restrict_to_factor(part, red.graph, *f);
        d["cliques"] = f->cliques;
        d["leftover"] = f->leftover;
        d["restricted_reduced_edges"] = fr.reduced.edges();
        return d;
    });

    stage("super-regularize", [&] {
        sr = super_regularize(fr.partition, fr.factor, delta);
        return json{{"delta", delta},
                    {"discarded_per_cluster", sr.discarded.empty() ? 0 : sr.discarded.front()},
                    {"max_low_degree", sr.max_low_degree},
                    {"rounds", sr.rounds},
                    {"eps_effective", sr.partition.eps_effective},
                    {"cluster_size", sr.partition.cluster_size},
                    {"exceptional", sr.partition.exceptional.size()}};
    });

    stage("distribute", [&] {
        const auto f1 = build_f1(*g, sr.partition, fr.factor, delta);
        const std::size_t l = sr.partition.cluster_count();
        const auto lp = solve_assignment_lp(k, std::max(0.0, P.gamma2()));
        const double f1_bound = (0.5 + P.gamma2()) * static_cast<double>(l);
        json d{{"exceptional", f1.left.size()},
               {"f1_min_degree", f1.min_left_degree},
               {"f1_degree_bound", f1_bound},
               {"lp_optimum", lp.feasible ? json(lp.primal_objective) : json(nullptr)},
               {"f1_degree_bound_met", f1.left.empty() ||
                                        static_cast<double>(f1.min_left_degree) >= f1_bound - 1e-9}};
        try {
            dist = distribute_v0(sr.partition, fr.factor, f1, P.eps, rs_dist, params.distribute_retries);
        } catch (const Error& e) {
            throw StageFailure(error_kind(e), e.what(), d);
        }
        d["attempts"] = dist.attempts;
        d["spread"] = dist.spread;
        d["target"] = dist.target;
        return d;
    });

    stage("map", [&] {
        mapping = map_all(h, sep, col.color, fr.factor, rs_map);
        kappa = mapping.assignment;
        const auto loads = kappa.loads(dist.partition.cluster_count());
        return json{{"loads", loads}};
    });

    stage("reassign", [&] {
        const auto rep = reassign_all(h, sep, col.color, mapping, fr.factor, fr.reduced, rs_reassign, kappa);
        json d{{"moved", rep.moved.size()},
               {"max_distance", rep.max_distance},
               {"locality_bound", rep.locality_bound},
               {"within_distance", rep.within_distance},
               {"within_size", rep.within_size},
               {"nonedges", rep.nonedges},
               {"moved_vertices", rep.moved},
               {"kappa", kappa.kappa}};
        if (rep.nonedges != 0)
            throw StageFailure("inconsistency",
                               std::to_string(rep.nonedges) + " H-edges map to reduced non-edges", d);
        return d;
    });

    stage("balance", [&] {
        const auto f2 = build_f2(fr.reduced, fr.factor);
        const auto loads = kappa.loads(dist.partition.cluster_count());
        const auto rep = balance_loads(dist.partition, loads, f2, fr.factor, delta, P.eps, rs_balance);
        refresh_pruned_host(dist.partition);
        std::size_t min_out = SIZE_MAX;
        for (std::size_t i = 0; i < f2.clusters; ++i) min_out = std::min(min_out, f2.out_degree(i));
        return json{{"transfers", rep.transfers},
                    {"direct", rep.direct},
                    {"two_step", rep.two_step},
                    {"initial_imbalance", rep.initial_imbalance},
                    {"max_gap", rep.max_gap},
                    {"within_bound", rep.within_bound},
                    {"move_bound", rep.move_bound},
                    {"f2_min_out_degree", min_out},
                    {"sizes", cluster_sizes(dist.partition)},
                    {"super_regularity",
                     super_regularity_summary(*dist.partition.pruned_host, dist.partition.clusters,
                                              fr.factor, delta)}};
    });

    stage("restrict", [&] {
        restr = build_restrictions(h, kappa, dist.partition, fr.factor, sr.partition.eps_effective, P.d);
        return json{{"restricted", restr.sets.size()},
                    {"cross_edges", restr.cross_edges},
                    {"max_relevant", restr.max_relevant},
                    {"min_ratio", restr.min_ratio},
                    {"exceeds_2k_minus_2", restr.exceeds_two_k_minus_two}};
    });

    stage("embed", [&] {
        auto res = embed_cliquewise(h, *g, kappa, dist.partition.clusters, fr.factor, restr, rs_embed,
                                    params.embed);
        json d{{"attempts", res.attempts},
               {"greedy_placed", res.greedy_placed},
               {"matched", res.matched},
               {"clique_order", res.clique_order}};
        if (!res.phi) {
            d["stuck_clique"] = res.failure->clique;
            d["hall_set"] = res.failure->hall_set;
            d["hall_neighbourhood"] = res.failure->hall_neighbourhood;
            throw StageFailure("embed-failure", res.failure->reason, d);
        }
        phi = std::move(*res.phi);
        return d;
    });

    stage("verify", [&] {
        const auto chk = verify_embedding(h, *g, phi);
        if (!chk.ok) throw InconsistencyError(chk.violation);
        const auto own = dist.partition.owners();
        for (Vertex x = 0; x < h.order(); ++x) {
            if (own[phi[x]] != kappa.kappa[x])
                throw InconsistencyError("H-vertex " + std::to_string(x) + " left its cluster");
            if (const auto* rs = restr.find(x); rs && !rs->allowed.contains(phi[x]))
                throw InconsistencyError("H-vertex " + std::to_string(x) + " violates its restriction");
        }
        return json{{"verified", true}};
    });

    rec.success = alive;
    if (alive) rec.phi = phi;
    return rec;
}

}  // namespace wellsep
