#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "wellsep/errors.hpp"
#include "wellsep/harness.hpp"

using namespace wellsep;
using namespace testing;

namespace {

PlantedHost host(std::size_t l, std::size_t m, std::size_t k, std::uint64_t seed) {
    HostSpec s;
    s.clusters = l;
    s.cluster_size = m;
    s.k = k;
    Rng rng(seed);
    return generate_host(s, rng);
}

}  // namespace

TEST_CASE("planted host") {
    const auto h = host(6, 50, 3, 1);
    REQUIRE(h.graph);
    CHECK(h.graph->order() == 300);
    CHECK(static_cast<double>(min_degree(*h.graph)) >= (1 - 0.25 + 0.1) * 300 - 1);
    CHECK(h.min_degree == min_degree(*h.graph));
    CHECK(h.exceptional.size() + 6 * h.clusters.front().size() == 300);
    CHECK(verify_factor(h.pattern, h.factor, 3));

    const auto a = host(4, 20, 2, 9), b = host(4, 20, 2, 9);
    std::ostringstream ea, eb;
    write_edge_list(ea, *a.graph);
    write_edge_list(eb, *b.graph);
    CHECK(ea.str() == eb.str());

    HostSpec one;
    one.clusters = 4;
    one.cluster_size = 1;
    one.exceptional_fraction = 0.0;
    Rng rng(3);
    const auto tiny = generate_host(one, rng);
    CHECK(*tiny.graph == tiny.pattern);

    HostSpec bad;
    bad.gamma = 0.9;
    bad.k = 3;
    CHECK_THROWS_AS(generate_host(bad, rng), PreconditionError);
}

TEST_CASE("H families") {
    Rng rng(5);
    SubgraphSpec g;
    g.family = HFamily::grid;
    g.n = 100;
    const auto grid = generate_h(g, rng);
    CHECK(max_degree(grid.graph) == 4);
    CHECK(chromatic_upper(grid.graph).classes == 2);
    REQUIRE(grid.separation);
    CHECK(grid.separation->separator.size() == 10);
    CHECK(grid.separation->largest_component() <= 50);
    CHECK(verify_separation(grid.graph, *grid.separation, 0.5).ok);

    SubgraphSpec hd;
    hd.family = HFamily::matchings_union;
    hd.n = 12;
    hd.matchings = 5;
    hd.max_degree = 5;
    const auto m = generate_h(hd, rng);
    CHECK(min_degree(m.graph) == 5);
    CHECK(max_degree(m.graph) == 5);
    CHECK(chromatic_upper(m.graph).classes == 2);

    SubgraphSpec tri;
    tri.family = HFamily::component_union;
    tri.shape = "triangle";
    tri.component_size = 3;
    tri.n = 30;
    const auto t = generate_h(tri, rng);
    REQUIRE(t.separation);
    CHECK(t.separation->separator.empty());
    CHECK(t.separation->components.size() == 10);
    for (const auto& c : t.separation->components) CHECK(c.size() == 3);

    SubgraphSpec pp;
    pp.family = HFamily::path_power;
    pp.n = 64;
    pp.power = 2;
    const auto p = generate_h(pp, rng);
    REQUIRE(p.ordering);
    CHECK(p.ordering->width == 2);

    SubgraphSpec fo;
    fo.family = HFamily::forest;
    fo.n = 200;
    fo.component_size = 15;
    const auto f = generate_h(fo, rng);
    CHECK(max_degree(f.graph) <= 4);
    CHECK(f.graph.edge_count() < 200);
    REQUIRE(f.separation);
    CHECK(verify_separation(f.graph, *f.separation, f.separation->alpha_certificate).ok);

    CHECK_THROWS_AS(parse_family("torus"), ArgumentError);
    CHECK(parse_family("hd") == HFamily::matchings_union);
}

TEST_CASE("pipeline runs end to end and replays") {
    const auto g = host(4, 50, 2, 2);
    SubgraphSpec s;
    s.family = HFamily::grid;
    s.n = 200;
    s.rows = 4;
    s.bands = 8;
    Rng rng(4);
    const auto h = generate_h(s, rng);
    PipelineParams params;
    params.max_degree = 4;
    const PartitionInput part{g.exceptional, g.clusters};
    const auto rec = run_pipeline(h.graph, g.graph, part, params, 42, h.separation);
    INFO(to_json(rec).dump());
    CHECK(rec.success);
    REQUIRE(rec.phi);
    CHECK(verify_embedding(h.graph, *g.graph, *rec.phi).ok);
    const auto again = run_pipeline(h.graph, g.graph, part, params, 42, h.separation);
    CHECK(again.replay_key() == rec.replay_key());
    CHECK(again.phi == rec.phi);

    const std::vector<std::string> expected{"coloring", "separate", "decompose", "factor",
                                            "super-regularize", "distribute", "map", "reassign",
                                            "balance", "restrict", "embed", "verify"};
    REQUIRE(rec.stages.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(rec.stages[i].stage == expected[i]);
}

TEST_CASE("pipeline preconditions") {
    const auto g = host(4, 10, 2, 3);
    const PartitionInput part{g.exceptional, g.clusters};
    PipelineParams params;
    // K3 components need three colors but k = 2
    std::vector<Edge> e;
    for (Vertex v = 0; v + 2 < 40; v += 3) {
        e.emplace_back(v, v + 1);
        e.emplace_back(v + 1, v + 2);
        e.emplace_back(v, v + 2);
    }
    const auto rec = run_pipeline(Graph(40, e), g.graph, part, params, 1);
    CHECK_FALSE(rec.success);
    CHECK(rec.failed_stage == "coloring");
    CHECK(rec.stages.back().error_kind == "precondition");

    CHECK_THROWS_AS(run_pipeline(path(39), g.graph, part, params, 1), ArgumentError);
}

TEST_CASE("partition refinement") {
    Rng rng(1);
    const PartitionInput p{VertexSet{20}, {VertexSet::range(0, 10), VertexSet::range(10, 20)}};
    const auto r = refine_partition(p, 3, rng);
    CHECK(r.clusters.size() == 6);
    for (const auto& c : r.clusters) CHECK(c.size() == 3);
    CHECK(r.exceptional.size() == 3);
    CHECK(auto_refinement(4, 2) == 1);
    CHECK(auto_refinement(4, 3) == 3);
    CHECK(auto_refinement(6, 3) == 1);
    CHECK(auto_refinement(5, 3) == 3);
    const auto s = singleton_partition(5);
    CHECK(s.clusters.size() == 5);
    CHECK(s.exceptional.empty());
}

TEST_CASE("experiment output") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "wellsep-harness-test";
    fs::remove_all(dir);
    ExperimentCell cell;
    cell.name = "tiny";
    cell.host.clusters = 4;
    cell.host.cluster_size = 20;
    cell.h.family = HFamily::component_union;
    cell.h.component_size = 5;
    cell.params.max_degree = 4;
    cell.trials = 3;
    const auto sum = run_experiment({cell}, 7, dir.string());
    REQUIRE(sum.cells.size() == 1);
    CHECK(sum.cells[0].trials == 3);
    CHECK(sum.records.size() == 3);
    std::ifstream csv(dir / "summary.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == summary_csv_header());
    std::ifstream jl(dir / "records.jsonl");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(jl, line)) {
        const auto j = json::parse(line);
        CHECK(j.contains("stages"));
        ++lines;
    }
    CHECK(lines == 3);

    // the same seed replays each trial exactly
    const auto again = run_cell_trial(cell, sum.records[1].seed);
    CHECK(again.replay_key() == sum.records[1].replay_key());

    const auto empty = run_experiment({}, 1, (dir / "empty").string());
    CHECK(empty.cells.empty());
    CHECK(fs::exists(dir / "empty" / "summary.json"));
    fs::remove_all(dir);
}

TEST_CASE("JSON parameters") {
    const auto p = pipeline_params_from_json(json::parse(R"({"k":3,"eps":0.03,"lookahead":false})"));
    CHECK(p.core.k == 3);
    CHECK(p.core.eps == 0.03);
    CHECK_FALSE(p.embed.lookahead);
    CHECK(pipeline_params_from_json(to_json(p)).core.delta_value() == p.core.delta_value());
    CHECK_THROWS_AS(pipeline_params_from_json(json::parse(R"({"kk":3})")), ArgumentError);
    CHECK_THROWS_AS(pipeline_params_from_json(json::parse(R"({"k":"three"})")), ArgumentError);

    const auto c = cell_from_json(json::parse(R"({"name":"a","host":{"clusters":6},"params":{"k":3}})"));
    CHECK(c.host.k == 3);
    CHECK(c.h.n == 300);

    const auto h = grid(3, 3);
    const auto sep = separation_from_separator(h, VertexSet{3, 4, 5});
    const auto back = separation_from_json(h, to_json(sep));
    CHECK(back.separator == sep.separator);
    CHECK(back.components == sep.components);
    CHECK_THROWS_AS(separation_from_json(h, json::parse(R"({"S":[9],"components":[]})")), ArgumentError);
}
