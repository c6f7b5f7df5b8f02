#include <doctest.h>

#include <functional>
#include <sstream>

#include "helpers.hpp"
#include "wellsep/errors.hpp"

using namespace wellsep;
using namespace testing;

TEST_CASE("construction rejects loops, repeats and bad ids") {
    CHECK_THROWS_AS(make(3, {{1, 1}}), ArgumentError);
    CHECK_THROWS_AS(make(3, {{0, 1}, {1, 0}}), ArgumentError);
    CHECK_THROWS_AS(make(3, {{0, 3}}), ArgumentError);
    const auto g = make(3, {{2, 0}});
    CHECK(g.adjacent(0, 2));
    CHECK(g.adjacent(2, 0));
    CHECK(g.edge_count() == 1);
}

TEST_CASE("degree_into") {
    std::vector<Edge> star;
    for (Vertex v = 1; v <= 4; ++v) star.emplace_back(0, v);
    const auto g = make(5, star);
    CHECK(degree_into(g, 0, VertexSet{1, 2, 3, 4}) == 4);
    CHECK(degree_into(g, 0, VertexSet{}) == 0);
    CHECK(degree_into(path(4), 1, VertexSet{0, 3}) == 1);
    CHECK_THROWS_AS(degree_into(g, 7, VertexSet{1}), ArgumentError);
}

TEST_CASE("density") {
    // K_{3,4} between X = {0,1,2} and Y = {3..6}
    std::vector<Edge> full, six;
    for (Vertex x = 0; x < 3; ++x)
        for (Vertex y = 3; y < 7; ++y) full.emplace_back(x, y);
    six.assign(full.begin(), full.begin() + 6);
    const VertexSet X{0, 1, 2}, Y{3, 4, 5, 6};
    CHECK(density(make(7, full), X, Y) == 1.0);
    CHECK(density(make(7, {}), X, Y) == 0.0);
    CHECK(density(make(7, six), X, Y) == 0.5);
    CHECK(density(make(7, six), Y, X) == 0.5);
    CHECK_THROWS_AS(density(make(7, six), X, VertexSet{2, 3}), ArgumentError);
    CHECK_THROWS_AS(density(make(7, six), X, VertexSet{}), ArgumentError);
}

TEST_CASE("components") {
    const auto comps = components(path(3), VertexSet{1});
    REQUIRE(comps.size() == 2);
    CHECK(comps[0] == VertexSet{0});
    CHECK(comps[1] == VertexSet{2});

    const auto whole = components(cycle(7));
    REQUIRE(whole.size() == 1);
    CHECK(whole[0].size() == 7);

    // 4x4 grid minus column 1: column 0 (4 vertices) and columns 2-3 (8 vertices)
    const auto g = grid(4, 4);
    const auto cut = components(g, VertexSet{1, 5, 9, 13});
    REQUIRE(cut.size() == 2);
    CHECK(cut[0].size() == 4);
    CHECK(cut[1].size() == 8);
}

TEST_CASE("degree extremes and coloring") {
    const auto k4 = complete(4);
    CHECK(min_degree(k4) == 3);
    CHECK(max_degree(k4) == 3);
    CHECK(chromatic_upper(k4).classes == 4);

    const auto c5 = chromatic_upper(cycle(5));
    CHECK(c5.classes == 3);
    CHECK(c5.exact);

    CHECK(chromatic_upper(make(6, {})).classes == 1);
}

namespace {

// Smallest q admitting a proper q-coloring, by plain enumeration of q^n maps.
std::size_t chromatic_oracle(const Graph& g) {
    const std::size_t n = g.order();
    if (n == 0) return 0;
    for (std::size_t q = 1; q <= n; ++q) {
        std::vector<std::size_t> col(n, 0);
        std::function<bool(std::size_t)> go = [&](std::size_t v) {
            if (v == n) return true;
            for (std::size_t c = 0; c < q; ++c) {
                bool ok = true;
                for (Vertex u = 0; u < v && ok; ++u)
                    if (g.adjacent(u, v) && col[u] == c) ok = false;
                if (!ok) continue;
                col[v] = c;
                if (go(v + 1)) return true;
            }
            return false;
        };
        if (go(0)) return q;
    }
    return n;
}

}  // namespace

TEST_CASE("exact coloring matches an enumeration oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 3 + rng.below(7);
        const auto g = random_graph(n, 0.2 + 0.6 * rng.unit(), rng);
        const auto col = chromatic_upper(g);
        CHECK(is_proper_coloring(g, col.color));
        CHECK(col.exact);
        CHECK(col.classes == chromatic_oracle(g));
    }
}

TEST_CASE("graph properties on random graphs") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 5 + rng.below(40);
        const auto g = random_graph(n, 0.1, rng);
        std::size_t total = 0;
        for (Vertex v = 0; v < n; ++v) total += g.degree(v);
        CHECK(total == 2 * g.edge_count());

        const auto col = chromatic_upper(g);
        for (const auto& [u, v] : g.edges()) CHECK(col.color[u] != col.color[v]);

        const auto comps = components(g);
        std::vector<int> seen(n, 0);
        for (const auto& c : comps)
            for (Vertex v : c) ++seen[v];
        for (int s : seen) CHECK(s == 1);
        for (const auto& [u, v] : g.edges()) {
            std::size_t cu = 0, cv = 0;
            for (std::size_t i = 0; i < comps.size(); ++i) {
                if (comps[i].contains(u)) cu = i;
                if (comps[i].contains(v)) cv = i;
            }
            CHECK(cu == cv);
        }
        if (comps.size() >= 2) {
            auto e = g.edges();
            e.emplace_back(std::min(comps[0][0], comps[1][0]), std::max(comps[0][0], comps[1][0]));
            CHECK(components(Graph(n, e)).size() == comps.size() - 1);
        }

        const VertexSet x = VertexSet::range(0, n / 2), y = VertexSet::range(n / 2, n);
        const double dxy = density(g, x, y);
        CHECK(dxy >= 0.0);
        CHECK(dxy <= 1.0);
        CHECK(dxy == density(g, y, x));
    }
}

TEST_CASE("edge list round trip and parse errors") {
    const auto g = grid(3, 3);
    std::stringstream ss;
    write_edge_list(ss, g);
    CHECK(read_edge_list(ss) == g);

    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return read_edge_list(in);
    };
    CHECK(parse("3 2\n0 1\n1 2\n").edge_count() == 2);
    try {
        parse("3 2\n0 1\n0 1\n");
        FAIL("duplicate accepted");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    try {
        parse("3 1\n2 2\n");
        FAIL("loop accepted");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK(parse("3 1\n2 1\n").adjacent(1, 2));
    CHECK_THROWS_AS(parse("3 2\n0 1\n"), ParseError);
    CHECK_THROWS_AS(parse("x\n"), ParseError);
}
