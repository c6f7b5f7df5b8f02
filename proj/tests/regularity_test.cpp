#include <doctest.h>

#include <bit>
#include <cmath>
#include <memory>

#include "helpers.hpp"
#include "oracles.hpp"
#include "wellsep/errors.hpp"
#include "wellsep/regularity.hpp"

using namespace wellsep;
using namespace testing;

namespace {

// Bipartite pair A = 0..na-1, B = na..na+nb-1 with edge probability p.
Graph random_pair(std::size_t na, std::size_t nb, double p, Rng& rng) {
    std::vector<Edge> e;
    for (Vertex a = 0; a < na; ++a)
        for (Vertex b = 0; b < nb; ++b)
            if (rng.bernoulli(p)) e.emplace_back(a, na + b);
    return Graph(na + nb, e);
}

VertexSet subset(const VertexSet& side, std::uint32_t mask) {
    std::vector<Vertex> out;
    for (std::size_t i = 0; i < side.size(); ++i)
        if (mask >> i & 1u) out.push_back(side[i]);
    return VertexSet(out);
}

}  // namespace

TEST_CASE("exact check examples") {
    const VertexSet a = VertexSet::range(0, 6), b = VertexSet::range(6, 12);
    std::vector<Edge> full, half;
    for (Vertex x = 0; x < 6; ++x)
        for (Vertex y = 6; y < 12; ++y) {
            full.emplace_back(x, y);
            if (x < 3 && y < 9) half.emplace_back(x, y);
        }
    CHECK(check_regular_exact(make(12, full), a, b, 0.2).status == PairStatus::certified_regular);
    CHECK(check_regular_exact(make(12, {}), a, b, 0.2).status == PairStatus::certified_regular);

    const auto g = make(12, half);
    const auto cert = check_regular_exact(g, a, b, 0.4);
    CHECK(cert.density == 0.25);
    REQUIRE(cert.status == PairStatus::refuted);
    CHECK(cert.witness_x.size() > 0.4 * 6);
    CHECK(cert.witness_y.size() > 0.4 * 6);
    CHECK(std::abs(density(g, cert.witness_x, cert.witness_y) - 0.25) >= 0.4);
    CHECK(std::abs(density(g, VertexSet{0, 1, 2}, VertexSet{6, 7, 8}) - 0.25) == 0.75);

    CHECK_THROWS_AS(check_regular_exact(make(30, {}), VertexSet::range(0, 15), VertexSet::range(15, 30), 0.2),
                    RegimeError);
    CHECK_THROWS_AS(check_regular_exact(g, a, VertexSet{5, 6}, 0.2), ArgumentError);
}

TEST_CASE("exact check agrees with full enumeration") {
    Rng rng(101);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t na = 2 + rng.below(6), nb = 2 + rng.below(6);
        const auto g = random_pair(na, nb, rng.unit(), rng);
        const VertexSet a = VertexSet::range(0, na), b = VertexSet::range(na, na + nb);
        const double eps = 0.1 + 0.35 * rng.unit();
        const auto cert = check_regular_exact(g, a, b, eps);
        const auto ref = oracle::regularity(g, a, b, eps);
        CHECK((cert.status == PairStatus::certified_regular) == ref.regular);
        if (cert.status == PairStatus::refuted) {
            CHECK(cert.witness_x.size() > eps * na);
            CHECK(cert.witness_y.size() > eps * nb);
            CHECK(std::abs(density(g, cert.witness_x, cert.witness_y) - density(g, a, b)) >= eps);
        } else {
            // few low-degree vertices toward every admissible Y
            const double d = density(g, a, b);
            for (std::uint32_t ym = 1; ym < (1u << nb); ++ym) {
                if (!(std::popcount(ym) > eps * nb)) continue;
                CHECK(low_degree_count(g, a, b, subset(b, ym), d, eps) <= eps * na);
            }
        }
    }
}

TEST_CASE("heuristic search is sound") {
    Rng rng(7);
    const std::size_t n = 100;
    const VertexSet a = VertexSet::range(0, n), b = VertexSet::range(n, 2 * n);
    std::vector<Edge> half, full;
    for (Vertex x = 0; x < n; ++x)
        for (Vertex y = 0; y < n; ++y) {
            full.emplace_back(x, n + y);
            if (x < n / 2 && y < n / 2) half.emplace_back(x, n + y);
        }
    const auto planted = make(2 * n, half);
    const auto cert = check_regular_heuristic(planted, a, b, 0.3, 1000, 1);
    REQUIRE(cert.status == PairStatus::refuted);
    CHECK(std::abs(density(planted, cert.witness_x, cert.witness_y) - cert.density) >= 0.3);

    const auto random = random_pair(n, n, 0.5, rng);
    CHECK(check_regular_heuristic(random, a, b, 0.3, 1000, 2).status == PairStatus::uncertified);
    CHECK(check_regular_heuristic(make(2 * n, full), a, b, 0.3, 100, 3).status == PairStatus::uncertified);

    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t s = 4 + rng.below(8);
        const auto g = random_pair(s, s, rng.unit(), rng);
        const VertexSet sa = VertexSet::range(0, s), sb = VertexSet::range(s, 2 * s);
        const auto h = check_regular_heuristic(g, sa, sb, 0.25, 50, trial);
        CHECK(h.status != PairStatus::certified_regular);
        if (h.status == PairStatus::refuted) CHECK_FALSE(oracle::regularity(g, sa, sb, 0.25).regular);
    }
}

TEST_CASE("low_degree_count") {
    const VertexSet a = VertexSet::range(0, 5), b = VertexSet::range(5, 10);
    std::vector<Edge> full;
    for (Vertex x = 0; x < 5; ++x)
        for (Vertex y = 5; y < 10; ++y) full.emplace_back(x, y);
    CHECK(low_degree_count(make(10, full), a, b, VertexSet{5, 6, 7}, 1.0, 0.1) == 0);
    CHECK(low_degree_count(make(10, {}), a, b, b, 0.0, 0.1) == 0);
    CHECK_THROWS_AS(low_degree_count(make(10, {}), a, b, VertexSet{5}, 0.0, 0.3), PreconditionError);

    // random pairs at density 0.5 that pass the exact check at eps 0.1
    Rng rng(23);
    std::size_t certified = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto g = random_pair(12, 12, 0.5, rng);
        const VertexSet ra = VertexSet::range(0, 12), rb = VertexSet::range(12, 24);
        if (check_regular_exact(g, ra, rb, 0.35).status != PairStatus::certified_regular) continue;
        ++certified;
        CHECK(low_degree_count(g, ra, rb, rb, density(g, ra, rb), 0.35) <= 0.35 * 12);
    }
    CHECK(certified > 0);
}

TEST_CASE("degree form prune") {
    auto k12 = std::make_shared<const Graph>(complete(12));
    const std::vector<VertexSet> clusters{VertexSet::range(0, 4), VertexSet::range(4, 8), VertexSet::range(8, 12)};
    const auto part = degree_form_prune(k12, {}, clusters, 0.25, 0.02);
    for (const auto& c : part.pairs) {
        CHECK(c.density == 1.0);
        CHECK_FALSE(c.emptied);
    }
    for (const auto& c : clusters)
        for (Vertex u : c)
            for (Vertex v : c) CHECK_FALSE(part.pruned_host->adjacent(u, v));
    CHECK(part.pruned_host->edge_count() == 66 - 3 * 6);

    // vertex 0 has all its edges in a pair of density 0.1
    std::vector<Edge> e;
    for (Vertex y = 10; y < 20; ++y) e.emplace_back(0, y);
    auto bad = std::make_shared<const Graph>(Graph(20, e));
    CHECK_THROWS_AS(degree_form_prune(bad, {}, {VertexSet::range(0, 10), VertexSet::range(10, 20)}, 0.25, 0.02),
                    StructuralError);

    CHECK_THROWS_AS(degree_form_prune(k12, {}, {VertexSet::range(0, 4), VertexSet::range(4, 9)}, 0.25, 0.02),
                    ArgumentError);
}

TEST_CASE("reduced graph") {
    // two disjoint K8, clusters aligned with the cliques
    std::vector<Edge> e;
    for (Vertex base : {0u, 8u})
        for (Vertex u = base; u < base + 8; ++u)
            for (Vertex v = u + 1; v < base + 8; ++v) e.emplace_back(u, v);
    auto g = std::make_shared<const Graph>(Graph(16, e));
    const std::vector<VertexSet> cl{VertexSet::range(0, 4), VertexSet::range(4, 8), VertexSet::range(8, 12),
                                    VertexSet::range(12, 16)};
    const auto part = degree_form_prune(g, {}, cl, 0.25, 0.02);
    const auto red = reduced_graph(part, 0.25);
    CHECK(red.graph.edge_count() == 2);
    CHECK(red.graph.adjacent(0, 1));
    CHECK(red.graph.adjacent(2, 3));
    CHECK(components(red.graph).size() == 2);
    CHECK(red.c == doctest::Approx(7.0 / 16));
    CHECK(red.theta == doctest::Approx(0.29));
    CHECK(red.required_min_degree == doctest::Approx((7.0 / 16 - 0.29) * 4));
    CHECK(red.bound_holds == (1.0 >= red.required_min_degree));

    auto pair = std::make_shared<const Graph>(complete(8));
    const auto single = reduced_graph(degree_form_prune(pair, {}, {VertexSet::range(0, 4), VertexSet::range(4, 8)}, 0.25, 0.2), 0.25);
    CHECK(single.graph.edge_count() == 1);
}

TEST_CASE("reduced graph edges shrink as d grows") {
    Rng rng(41);
    std::vector<Edge> e;
    const std::size_t l = 6, m = 8;
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = i + 1; j < l; ++j) {
            const double p = 0.2 + 0.8 * rng.unit();
            for (Vertex x = 0; x < m; ++x)
                for (Vertex y = 0; y < m; ++y)
                    if (rng.bernoulli(p)) e.emplace_back(i * m + x, j * m + y);
        }
    auto g = std::make_shared<const Graph>(Graph(l * m, e));
    std::vector<VertexSet> cl;
    for (std::size_t i = 0; i < l; ++i) cl.push_back(VertexSet::range(i * m, (i + 1) * m));
    const auto part = degree_form_prune(g, {}, cl, 0.0, 0.3, {.refute_eps = 0.95});
    std::size_t prev = l * l;
    for (double d = 0.0; d <= 1.0; d += 0.1) {
        const auto red = reduced_graph(part, d);
        CHECK(red.graph.edge_count() <= prev);
        prev = red.graph.edge_count();
        for (auto [u, v] : red.graph.edges()) CHECK(reduced_graph(part, d - 0.05).graph.adjacent(u, v));
    }
}

TEST_CASE("super-regularization") {
    auto k16 = std::make_shared<const Graph>(complete(16));
    const std::vector<VertexSet> cl{VertexSet::range(0, 4), VertexSet::range(4, 8), VertexSet::range(8, 12),
                                    VertexSet::range(12, 16)};
    const auto part = degree_form_prune(k16, {}, cl, 0.25, 0.02);
    const auto f = CliqueFactor::from_cliques(4, 2, {{0, 1}, {2, 3}});
    for (double delta : {0.0, 0.5}) {
        const auto sr = super_regularize(part, f, delta);
        for (auto dcount : sr.discarded) CHECK(dcount == 0);
        CHECK(sr.partition.exceptional.empty());
    }

    // random pairs inside cliques; every clique pair ends super-regular with equal cluster sizes
    Rng rng(9);
    const std::size_t m = 30;
    std::vector<Edge> e;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            for (Vertex x = 0; x < m; ++x)
                for (Vertex y = 0; y < m; ++y)
                    if (rng.bernoulli(0.5)) e.emplace_back(i * m + x, j * m + y);
    auto g = std::make_shared<const Graph>(Graph(4 * m, e));
    std::vector<VertexSet> rc;
    for (std::size_t i = 0; i < 4; ++i) rc.push_back(VertexSet::range(i * m, (i + 1) * m));
    const auto rp = degree_form_prune(g, {}, rc, 0.25, 0.02, {.refute_eps = 0.35});
    const auto sr = super_regularize(rp, f, 0.35);
    const auto& np = sr.partition;
    for (const auto& c : np.clusters) CHECK(c.size() == np.cluster_size);
    CHECK(np.cluster_size + sr.discarded[0] == m);
    CHECK(np.exceptional.size() == 4 * sr.discarded[0]);
    for (const auto& q : f.cliques) {
        const auto s = measure_super_regularity(*np.pruned_host, np.clusters[q[0]], np.clusters[q[1]], np.eps_effective, 0.35);
        CHECK(s.holds);
        CHECK(np.pair(q[0], q[1]).super->holds);
    }
    CHECK(np.eps_effective <= 2 * np.eps);
    CHECK(np.eps_effective >= np.eps);
}

TEST_CASE("refresh of the pruned host follows moved vertices") {
    auto k12 = std::make_shared<const Graph>(complete(12));
    auto part = degree_form_prune(k12, {}, {VertexSet::range(0, 4), VertexSet::range(4, 8), VertexSet::range(8, 12)}, 0.25, 0.02);
    CHECK_FALSE(part.pruned_host->adjacent(0, 3));
    part.clusters = {VertexSet{0, 1, 2, 4}, VertexSet{3, 5, 6, 7}, VertexSet::range(8, 12)};
    refresh_pruned_host(part);
    CHECK(part.pruned_host->adjacent(0, 3));
    CHECK_FALSE(part.pruned_host->adjacent(0, 4));
}
