#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "wellsep/errors.hpp"
#include "wellsep/separability.hpp"

using namespace wellsep;
using namespace testing;

namespace {

Graph path_power(std::size_t n, std::size_t power) {
    std::vector<Edge> e;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v <= u + power && v < n; ++v) e.emplace_back(u, v);
    return Graph(n, e);
}

std::vector<Vertex> identity(std::size_t n) {
    std::vector<Vertex> o(n);
    for (Vertex v = 0; v < n; ++v) o[v] = v;
    return o;
}

}  // namespace

TEST_CASE("verify_separation examples") {
    std::vector<Edge> star;
    for (Vertex v = 1; v <= 9; ++v) star.emplace_back(0, v);
    const auto s = make(10, star);
    CHECK(verify_separation(s, separation_from_separator(s, VertexSet{0}), 0.1).ok);

    const auto k10 = complete(10);
    CHECK_FALSE(verify_separation(k10, separation_from_separator(k10, VertexSet{}), 0.1).ok);
    const auto one = verify_separation(k10, separation_from_separator(k10, VertexSet{3}), 0.1);
    CHECK_FALSE(one.ok);
    CHECK(one.violation == SeparationViolation::component_too_large);

    const auto g = grid(5, 5);
    const auto sep = separation_from_separator(g, VertexSet{10, 11, 12, 13, 14});
    REQUIRE(sep.components.size() == 2);
    CHECK(sep.components[0].size() == 10);
    CHECK(sep.components[1].size() == 10);
    CHECK(verify_separation(g, sep, 0.4).ok);
}

TEST_CASE("verify_separation distinguishes malformed input from failure") {
    const auto g = path(4);
    CHECK_THROWS_AS(verify_separation(g, make_separation(g, VertexSet{1}, {VertexSet{0}}), 0.5),
                    StructuralError);
    CHECK_THROWS_AS(
        verify_separation(g, make_separation(g, VertexSet{1}, {VertexSet{0, 1}, VertexSet{2, 3}}), 0.5),
        StructuralError);
    const auto cross = verify_separation(g, make_separation(g, VertexSet{}, {VertexSet{0, 1}, VertexSet{2, 3}}), 0.5);
    CHECK_FALSE(cross.ok);
    CHECK(cross.violation == SeparationViolation::cross_edge);
}

TEST_CASE("bandwidth separator on P16") {
    const auto p = path(16);
    const auto out = bandwidth_separator(p, BandwidthOrdering::from_order(p, identity(16)), 1.0 / 16);
    CHECK(out.interval_count == 16);
    CHECK(out.stride == 4);
    CHECK(out.interval_length == 1);
    CHECK(out.separation.separator == VertexSet{3, 7, 11, 15});
    REQUIRE(out.separation.components.size() == 4);
    CHECK(out.separation.components[0] == VertexSet{0, 1, 2});
    CHECK(out.separation.components[3] == VertexSet{12, 13, 14});
    CHECK(verify_separation(p, out.separation, 0.25).ok);
    CHECK_FALSE(out.separation.rounded);
}

TEST_CASE("bandwidth separator edge cases") {
    const auto empty = make(16, {});
    const auto out = bandwidth_separator(empty, BandwidthOrdering::from_order(empty, identity(16)), 1.0 / 16);
    CHECK(out.separation.separator == VertexSet{3, 7, 11, 15});
    CHECK(verify_separation(empty, out.separation, 0.25).ok);

    const auto c = cycle(16);
    CHECK_THROWS_AS(bandwidth_separator(c, BandwidthOrdering::from_order(c, identity(16)), 1.0 / 16),
                    PreconditionError);
    CHECK_THROWS_AS(BandwidthOrdering::from_order(c, {0, 1, 2}), ArgumentError);
}

TEST_CASE("bandwidth separator properties on shuffled path powers") {
    Rng rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const double inv = std::vector<double>{16, 25, 100}[rng.below(3)];
        const double beta = 1.0 / inv;
        // an edge has stretch at least 1, so n must reach 1/beta
        const std::size_t n = std::max<std::size_t>(50, static_cast<std::size_t>(inv)) + rng.below(200);
        const std::size_t power = std::max<std::size_t>(1, static_cast<std::size_t>(beta * n));
        const auto base = path_power(n, power);
        // relabel so that the ordering is not the identity
        std::vector<Vertex> perm = identity(n);
        rng.shuffle(perm);
        std::vector<Edge> e;
        for (auto [u, v] : base.edges()) e.emplace_back(std::min(perm[u], perm[v]), std::max(perm[u], perm[v]));
        const Graph h(n, e);
        std::vector<Vertex> order(n);
        for (Vertex v = 0; v < n; ++v) order[v] = perm[v];
        const auto bo = BandwidthOrdering::from_order(h, order);
        CHECK(bo.width == power);
        const auto out = bandwidth_separator(h, bo, beta);
        const double ratio = out.separation.alpha_certificate;
        CHECK(verify_separation(h, out.separation, ratio).ok);
        const double m = std::floor(1.0 / beta + 1e-9);
        CHECK(static_cast<double>(out.separation.separator.size()) <= n / std::floor(std::sqrt(m)) + out.interval_length);

        // the listed parts are unions of components of h - S
        const auto comps = components(h, out.separation.separator);
        std::size_t covered = 0;
        for (const auto& c : comps) {
            bool inside = false;
            for (const auto& part : out.separation.components)
                if (set_intersection(part, c) == c) inside = true;
            CHECK(inside);
            covered += c.size();
        }
        CHECK(covered + out.separation.separator.size() == n);
    }
}

TEST_CASE("find_separator examples") {
    std::vector<Edge> matching;
    for (Vertex v = 0; v < 20; v += 2) matching.emplace_back(v, v + 1);
    const auto f = make(20, matching);
    const auto fs = find_separator(f, 0.1);
    REQUIRE(fs.separation);
    CHECK(fs.separation->separator.empty());
    CHECK(fs.separation->components.size() == 10);

    const auto p = path(100);
    for (double alpha : {0.1, 0.2}) {
        const auto ps = find_separator(p, alpha);
        REQUIRE(ps.separation);
        CHECK(verify_separation(p, *ps.separation, alpha).ok);
    }
    // hand construction: 9 evenly spaced cut vertices give parts of at most 10
    std::vector<Vertex> cuts;
    for (Vertex i = 1; i <= 9; ++i) cuts.push_back(i * 10);
    CHECK(verify_separation(p, separation_from_separator(p, VertexSet(cuts)), 0.1).ok);
    // at alpha = 0.05, S and the parts are all capped at 5: 5 + 6 * 5 < 100
    std::vector<Vertex> five{19, 39, 59, 79, 99};
    CHECK_FALSE(verify_separation(p, separation_from_separator(p, VertexSet(five)), 0.05).ok);

    CHECK_FALSE(find_separator(complete(20), 0.2).separation);
    const auto exact = find_separator(complete(12), 0.25);
    CHECK(exact.exact);
    CHECK_FALSE(exact.separation);
}

TEST_CASE("exhaustive separator search agrees with subset enumeration") {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 6 + rng.below(7);
        const auto g = random_graph(n, 0.35, rng);
        const double alpha = 0.3 + 0.2 * rng.unit();
        const auto limit = static_cast<std::size_t>(std::floor(alpha * n + 1e-9));
        bool exists = false;
        for (std::uint32_t mask = 0; mask < (1u << n) && !exists; ++mask) {
            std::vector<Vertex> s;
            for (Vertex v = 0; v < n; ++v)
                if (mask >> v & 1u) s.push_back(v);
            if (s.size() > limit) continue;
            bool ok = true;
            for (const auto& c : components(g, VertexSet(s))) ok = ok && c.size() <= limit;
            exists = ok;
        }
        const auto found = find_separator(g, alpha);
        CHECK(found.exact);
        CHECK(found.separation.has_value() == exists);
        if (found.separation) CHECK(verify_separation(g, *found.separation, alpha).ok);
    }
}

TEST_CASE("alpha threshold takes the smaller condition") {
    const auto t = alpha_threshold(0.02, 4, 4, 2);
    CHECK(t.concentration == doctest::Approx(0.0004 / 256.0));
    CHECK(t.reassignment == doctest::Approx(0.02 / 64.0));
    CHECK(t.combined == t.concentration);
}
