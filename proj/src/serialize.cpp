#include <set>

#include "wellsep/errors.hpp"
#include "wellsep/harness.hpp"

namespace wellsep {

namespace {

json set_json(const VertexSet& s) { return json(s.members()); }

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* what) {
    if (!j.is_object()) throw ArgumentError(std::string(what) + " must be a JSON object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ArgumentError(std::string("unknown key '") + key + "' in " + what);
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("bad value for '") + key + "': " + e.what());
    }
}

std::string to_string(HostPattern p) { return p == HostPattern::complete ? "complete" : "random"; }

HostPattern parse_pattern(const std::string& s) {
    if (s == "complete") return HostPattern::complete;
    if (s == "random" || s == "random_min_degree") return HostPattern::random_min_degree;
    throw ArgumentError("unknown host pattern '" + s + "'");
}

EdgeRule parse_rule(const std::string& s) {
    if (s == "certified_only" || s == "certified-only") return EdgeRule::certified_only;
    if (s == "not_refuted" || s == "not-refuted") return EdgeRule::not_refuted;
    throw ArgumentError("unknown edge rule '" + s + "'");
}

}  // namespace

json to_json(const Separation& s) {
    json parts = json::array();
    for (const auto& p : s.components) parts.push_back(set_json(p));
    return {{"S", set_json(s.separator)},
            {"components", parts},
            {"alpha", s.alpha_certificate},
            {"rounded", s.rounded}};
}

Separation separation_from_json(const Graph& h, const json& j) {
    if (!j.is_object() || !j.contains("S") || !j.contains("components"))
        throw ArgumentError("separation needs keys 'S' and 'components'");
    try {
        VertexSet sep(j.at("S").get<std::vector<Vertex>>());
        sep.validate(h);
        std::vector<VertexSet> parts;
        for (const auto& p : j.at("components")) {
            parts.emplace_back(p.get<std::vector<Vertex>>());
            parts.back().validate(h);
        }
        return make_separation(h, std::move(sep), std::move(parts));
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("bad separation: ") + e.what());
    }
}

json to_json(const CliqueFactor& f) {
    return {{"k", f.k}, {"cliques", f.cliques}, {"leftover", f.leftover}};
}

json to_json(const PairCertificate& c) {
    json j{{"i", c.i},
           {"j", c.j},
           {"density", c.density},
           {"eps", c.eps},
           {"status", to_string(c.status)},
           {"emptied", c.emptied}};
    if (c.status == PairStatus::refuted) {
        j["witness_x"] = set_json(c.witness_x);
        j["witness_y"] = set_json(c.witness_y);
    }
    if (c.super)
        j["super"] = {{"delta", c.super->delta},
                      {"min_degree_a", c.super->min_degree_a},
                      {"min_degree_b", c.super->min_degree_b},
                      {"holds", c.super->holds}};
    return j;
}

json to_json(const ExperimentRecord& r) {
    json j = r.replay_key();
    j["specs"] = r.specs;
    j["warnings"] = r.warnings;
    double total = 0.0;
    for (std::size_t i = 0; i < r.stages.size(); ++i) {
        j["stages"][i]["millis"] = r.stages[i].millis;
        total += r.stages[i].millis;
    }
    j["total_ms"] = total;
    return j;
}

json to_json(const CellSummary& c) {
    return {{"name", c.name},
            {"trials", c.trials},
            {"successes", c.successes},
            {"success_rate", c.success_rate},
            {"stage_failures", c.stage_failures},
            {"p50_ms", c.p50_ms},
            {"p90_ms", c.p90_ms},
            {"max_ms", c.max_ms}};
}

HostSpec host_spec_from_json(const json& j, HostSpec base) {
    reject_unknown(j,
                   {"clusters", "cluster_size", "k", "eps", "d", "gamma", "pattern", "pair_density",
                    "exceptional_fraction", "seed"},
                   "host spec");
    read(j, "clusters", base.clusters);
    read(j, "cluster_size", base.cluster_size);
    read(j, "k", base.k);
    read(j, "eps", base.eps);
    read(j, "d", base.d);
    read(j, "gamma", base.gamma);
    if (j.contains("pattern")) base.pattern = parse_pattern(j.at("pattern").get<std::string>());
    read(j, "pair_density", base.pair_density);
    read(j, "exceptional_fraction", base.exceptional_fraction);
    read(j, "seed", base.seed);
    return base;
}

json to_json(const HostSpec& s) {
    return {{"clusters", s.clusters},
            {"cluster_size", s.cluster_size},
            {"k", s.k},
            {"eps", s.eps},
            {"d", s.d},
            {"gamma", s.gamma},
            {"pattern", to_string(s.pattern)},
            {"pair_density", s.pair_density},
            {"exceptional_fraction", s.exceptional_fraction},
            {"seed", s.seed}};
}

SubgraphSpec subgraph_spec_from_json(const json& j, SubgraphSpec base) {
    reject_unknown(j,
                   {"family", "n", "max_degree", "rows", "bands", "component_size", "shape", "linked",
                    "power", "dropout", "relabel", "matchings", "seed"},
                   "H spec");
    if (j.contains("family")) base.family = parse_family(j.at("family").get<std::string>());
    read(j, "n", base.n);
    read(j, "max_degree", base.max_degree);
    read(j, "rows", base.rows);
    read(j, "bands", base.bands);
    read(j, "component_size", base.component_size);
    read(j, "shape", base.shape);
    read(j, "linked", base.linked);
    read(j, "power", base.power);
    read(j, "dropout", base.dropout);
    read(j, "relabel", base.relabel);
    read(j, "matchings", base.matchings);
    read(j, "seed", base.seed);
    return base;
}

json to_json(const SubgraphSpec& s) {
    return {{"family", to_string(s.family)},
            {"n", s.n},
            {"max_degree", s.max_degree},
            {"rows", s.rows},
            {"bands", s.bands},
            {"component_size", s.component_size},
            {"shape", s.shape},
            {"linked", s.linked},
            {"power", s.power},
            {"dropout", s.dropout},
            {"relabel", s.relabel},
            {"matchings", s.matchings},
            {"seed", s.seed}};
}

PipelineParams pipeline_params_from_json(const json& j, PipelineParams base) {
    reject_unknown(j,
                   {"gamma", "eps", "d", "delta", "k", "eps_regularity", "heuristic_trials", "alpha",
                    "max_degree", "rule", "distribute_retries", "buffer_fraction", "retries", "lookahead"},
                   "parameters");
    read(j, "gamma", base.core.gamma);
    read(j, "eps", base.core.eps);
    read(j, "d", base.core.d);
    read(j, "delta", base.core.delta);
    read(j, "k", base.core.k);
    read(j, "eps_regularity", base.eps_regularity);
    read(j, "heuristic_trials", base.heuristic_trials);
    read(j, "alpha", base.alpha);
    read(j, "max_degree", base.max_degree);
    if (j.contains("rule")) base.rule = parse_rule(j.at("rule").get<std::string>());
    read(j, "distribute_retries", base.distribute_retries);
    read(j, "buffer_fraction", base.embed.buffer_fraction);
    read(j, "retries", base.embed.retries);
    read(j, "lookahead", base.embed.lookahead);
    return base;
}

json to_json(const PipelineParams& p) {
    return {{"gamma", p.core.gamma},
            {"eps", p.core.eps},
            {"d", p.core.d},
            {"delta", p.core.delta_value()},
            {"k", p.core.k},
            {"eps_regularity", p.eps_regularity},
            {"heuristic_trials", p.heuristic_trials},
            {"alpha", p.alpha},
            {"max_degree", p.max_degree},
            {"rule", to_string(p.rule)},
            {"distribute_retries", p.distribute_retries},
            {"buffer_fraction", p.embed.buffer_fraction},
            {"retries", p.embed.retries},
            {"lookahead", p.embed.lookahead}};
}

ExperimentCell cell_from_json(const json& j) {
    reject_unknown(j, {"name", "trials", "use_witness", "refine", "host", "h", "params"}, "experiment cell");
    ExperimentCell c;
    read(j, "name", c.name);
    read(j, "trials", c.trials);
    read(j, "use_witness", c.use_witness);
    read(j, "refine", c.refine);
    if (j.contains("params")) c.params = pipeline_params_from_json(j.at("params"));
    c.host.k = c.params.core.k;
    c.host.eps = c.params.core.eps;
    c.host.d = c.params.core.d;
    c.host.gamma = c.params.core.gamma;
    if (j.contains("host")) c.host = host_spec_from_json(j.at("host"), c.host);
    c.h.n = c.host.clusters * c.host.cluster_size;
    if (j.contains("h")) c.h = subgraph_spec_from_json(j.at("h"), c.h);
    if (c.params.max_degree == 0) c.params.max_degree = c.h.max_degree;
    return c;
}

}  // namespace wellsep
