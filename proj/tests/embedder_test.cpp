#include <doctest.h>

#include <memory>

#include "helpers.hpp"
#include "oracles.hpp"
#include "wellsep/embedder.hpp"
#include "wellsep/errors.hpp"

using namespace wellsep;
using namespace testing;

namespace {

// Four clusters of size m; pairs {0,1} and {2,3} get density p, all other
// cross pairs are complete.
std::shared_ptr<const Graph> blowup(std::size_t m, double p, Rng& rng) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
            const bool clique = (i ^ 1) == j && i % 2 == 0;
            for (Vertex x = 0; x < m; ++x)
                for (Vertex y = 0; y < m; ++y)
                    if (!clique || rng.bernoulli(p)) e.emplace_back(i * m + x, j * m + y);
        }
    return std::make_shared<const Graph>(Graph(4 * m, e));
}

std::vector<VertexSet> blocks(std::size_t l, std::size_t m) {
    std::vector<VertexSet> out;
    for (std::size_t i = 0; i < l; ++i) out.push_back(VertexSet::range(i * m, (i + 1) * m));
    return out;
}

}  // namespace

TEST_CASE("verify_embedding") {
    const auto g = complete(5);
    const auto h = path(4);
    CHECK(verify_embedding(h, g, std::vector<Vertex>{0, 1, 2, 3}).ok);
    const auto twice = verify_embedding(h, g, std::vector<Vertex>{0, 1, 1, 3});
    CHECK_FALSE(twice.ok);
    CHECK(twice.violation.find("not injective") != std::string::npos);
    const auto missing = verify_embedding(h, path(5), std::vector<Vertex>{0, 1, 3, 4});
    CHECK_FALSE(missing.ok);
    CHECK(missing.violation.find("1-2") != std::string::npos);
    CHECK_FALSE(verify_embedding(h, g, std::vector<Vertex>{0, 1}).ok);
    CHECK_FALSE(verify_embedding(h, g, std::vector<Vertex>{0, 1, 2, 9}).ok);
}

TEST_CASE("brute force examples") {
    const auto c4 = brute_force_embed(cycle(4), complete(4));
    REQUIRE(c4);
    CHECK(verify_embedding(cycle(4), complete(4), *c4).ok);
    CHECK_FALSE(brute_force_embed(complete(3), cycle(5)));
    CHECK_THROWS_AS(brute_force_embed(make(13, {}), make(13, {})), RegimeError);
}

TEST_CASE("brute force agrees with trying every injection") {
    Rng rng(31);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 3 + rng.below(5);
        const auto h = random_graph(n, 0.2 + 0.4 * rng.unit(), rng);
        const auto g = random_graph(n, 0.3 + 0.6 * rng.unit(), rng);
        const auto bf = brute_force_embed(h, g);
        CHECK(bf.has_value() == oracle::embedding(h, g).has_value());
        if (bf) CHECK(verify_embedding(h, g, *bf).ok);
    }
}

TEST_CASE("restriction sets") {
    Rng rng(2);
    auto g = std::make_shared<const Graph>(complete(16));
    const auto part = degree_form_prune(g, {}, blocks(4, 4), 0.25, 0.02);
    const auto f = CliqueFactor::from_cliques(4, 2, {{0, 1}, {2, 3}});
    // H: edge 0-1 inside clique 0, edge 2-3 across the cliques
    const auto h = make(16, {{0, 1}, {2, 3}});
    Assignment kappa{{0, 1, 1, 2, 0, 0, 0, 1, 1, 2, 2, 2, 3, 3, 3, 3}};
    const auto none = build_restrictions(make(16, {{0, 1}}), kappa, part, f, 0.02, 0.25);
    CHECK(none.sets.empty());
    CHECK(none.cross_edges == 0);

    const auto r = build_restrictions(h, kappa, part, f, 0.02, 0.25);
    CHECK(r.cross_edges == 1);
    REQUIRE(r.sets.size() == 2);
    REQUIRE(r.find(2));
    CHECK(r.find(2)->allowed == part.clusters[1]);
    CHECK(r.find(3)->allowed == part.clusters[2]);
    CHECK(r.find(0) == nullptr);
    CHECK(r.min_ratio == 1.0);
}

TEST_CASE("cliquewise embedding of a perfect matching") {
    Rng rng(13);
    const std::size_t m = 12;
    auto g = blowup(m, 0.6, rng);
    const auto f = CliqueFactor::from_cliques(4, 2, {{0, 1}, {2, 3}});
    std::vector<Edge> e;
    for (Vertex x = 0; x < m; ++x) {
        e.emplace_back(x, m + x);
        e.emplace_back(2 * m + x, 3 * m + x);
    }
    const Graph h(4 * m, e);
    Assignment kappa;
    for (Vertex x = 0; x < 4 * m; ++x) kappa.kappa.push_back(x / m);
    const auto part = degree_form_prune(g, {}, blocks(4, m), 0.25, 0.02, {.refute_eps = 0.35});
    const auto restr = build_restrictions(h, kappa, part, f, 0.04, 0.25);
    for (int seed = 0; seed < 10; ++seed) {
        Rng r(seed);
        const auto res = embed_cliquewise(h, *g, kappa, part.clusters, f, restr, r);
        REQUIRE(res.phi);
        CHECK(verify_embedding(h, *g, *res.phi).ok);
        for (Vertex x = 0; x < h.order(); ++x) CHECK(part.clusters[kappa.kappa[x]].contains((*res.phi)[x]));
    }

    // isolated vertices only: the matching phase places them without constraints
    const Graph empty(4 * m, std::vector<Edge>{});
    Rng r(99);
    const auto iso = embed_cliquewise(empty, *g, kappa, part.clusters, f, build_restrictions(empty, kappa, part, f, 0.04, 0.25), r);
    REQUIRE(iso.phi);
    CHECK(verify_embedding(empty, *g, *iso.phi).ok);
}

TEST_CASE("embedding failure carries a Hall violation") {
    // cluster 0 vertices pair with cluster 1, but one G-vertex of cluster 1 is isolated
    const std::size_t m = 4;
    std::vector<Edge> e;
    for (Vertex x = 0; x < m; ++x)
        for (Vertex y = 0; y < m; ++y) {
            if (y != 0) e.emplace_back(x, m + y);
            e.emplace_back(2 * m + x, 3 * m + y);
        }
    const Graph g(4 * m, e);
    std::vector<Edge> he;
    for (Vertex x = 0; x < m; ++x) he.emplace_back(x, m + x);
    const Graph h(4 * m, he);
    Assignment kappa;
    for (Vertex x = 0; x < 4 * m; ++x) kappa.kappa.push_back(x / m);
    const auto f = CliqueFactor::from_cliques(4, 2, {{0, 1}, {2, 3}});
    Rng r(1);
    const auto res = embed_cliquewise(h, g, kappa, blocks(4, m), f, Restrictions{}, r);
    CHECK_FALSE(res.phi);
    REQUIRE(res.failure);
    CHECK(res.failure->clique == f.clique_of[0]);
    CHECK(res.failure->hall_neighbourhood.size() < res.failure->hall_set.size());
    CHECK(oracle::embedding(h.induced(VertexSet::range(0, 8)), g.induced(VertexSet::range(0, 8))) == std::nullopt);
}
