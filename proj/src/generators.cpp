#include <algorithm>
#include <cmath>
#include <numeric>

#include "wellsep/errors.hpp"
#include "wellsep/harness.hpp"
#include "wellsep/matching.hpp"

namespace wellsep {

double host_degree_requirement(std::size_t k, double gamma, std::size_t n) {
    return (1.0 - 1.0 / (2.0 * static_cast<double>(k - 1)) + gamma) * static_cast<double>(n);
}

namespace {

Graph make_pattern(const HostSpec& spec, double c, Rng& rng) {
    const std::size_t l = spec.clusters, k = spec.k;
    GraphBuilder b(l);
    for (std::size_t q = 0; q + k <= l; q += k)
        for (std::size_t i = q; i < q + k; ++i)
            for (std::size_t j = i + 1; j < q + k; ++j) b.add_edge(i, j);
    if (spec.pattern == HostPattern::complete) {
        for (std::size_t i = 0; i < l; ++i)
            for (std::size_t j = i + 1; j < l; ++j) b.add_edge(i, j);
        return b.build();
    }
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = i + 1; j < l; ++j)
            if (rng.bernoulli(0.5)) b.add_edge(i, j);
    // Top up low-degree clusters until every cluster can reach the host bound.
    const double m = static_cast<double>(spec.cluster_size);
    const auto target = std::min<std::size_t>(
        l - 1, static_cast<std::size_t>(std::ceil(c * static_cast<double>(l) - 1.0 + 1.0 / m - 1e-9)));
    for (std::size_t i = 0; i < l; ++i) {
        std::vector<std::size_t> others;
        for (std::size_t j = 0; j < l; ++j)
            if (j != i && !b.has_edge(i, j)) others.push_back(j);
        rng.shuffle(others);
        std::size_t deg = l - 1 - others.size();
        for (auto j : others) {
            if (deg >= target) break;
            b.add_edge(i, j);
            ++deg;
        }
    }
    return b.build();
}

}  // namespace

PlantedHost generate_host(const HostSpec& spec, Rng& rng) {
    const std::size_t l = spec.clusters, m = spec.cluster_size, k = spec.k;
    if (k < 2) throw ArgumentError("k must be at least 2");
    if (l < k) throw ArgumentError("need at least k clusters");
    if (m == 0) throw ArgumentError("cluster size must be positive");
    if (!(spec.pair_density > 0.0 && spec.pair_density <= 1.0))
        throw ArgumentError("pair density must lie in (0,1]");
    if (!(spec.exceptional_fraction >= 0.0 && spec.exceptional_fraction < 0.5))
        throw ArgumentError("exceptional fraction must lie in [0,0.5)");

    const std::size_t n = l * m;
    PlantedHost out;
    out.required_min_degree = host_degree_requirement(k, spec.gamma, n);
    const auto need = static_cast<double>(
        static_cast<std::size_t>(std::ceil(out.required_min_degree - 1e-9)));
    out.pattern = make_pattern(spec, out.required_min_degree / static_cast<double>(n), rng);

    std::vector<std::vector<std::size_t>> cover;
    for (std::size_t q = 0; q + k <= l; q += k) {
        std::vector<std::size_t> c(k);
        std::iota(c.begin(), c.end(), q);
        cover.push_back(std::move(c));
    }
    out.factor = CliqueFactor::from_cliques(l, k, cover);

    const std::size_t r =
        m == 1 ? 0 : static_cast<std::size_t>(std::lround(spec.exceptional_fraction * static_cast<double>(m)));
    const std::size_t mk = m - r;
    const double R = static_cast<double>(r * l);
    const double z = std::sqrt(2.0 * std::log(static_cast<double>(std::max<std::size_t>(n, 2)))) + 0.5;

    double q = 0.0;
    if (r > 0) {
        const double others = static_cast<double>(n - 1);
        if (others < need) throw PreconditionError("exceptional vertices cannot reach the degree bound");
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = (lo + hi) / 2;
            if (others * mid - z * std::sqrt(others * mid * (1 - mid)) >= need) hi = mid;
            else lo = mid;
        }
        q = hi;
    }
    out.exceptional_density = q;

    double p = 1.0;
    if (m > 1) {
        const double dmin = static_cast<double>(min_degree(out.pattern));
        const double md = static_cast<double>(mk);
        auto score = [&](double x) {
            return (md - 1.0) + x * dmin * md + q * R -
                   z * std::sqrt(dmin * md * x * (1 - x) + R * q * (1 - q));
        };
        if ((md - 1.0) + dmin * md + q * R < need)
            throw PreconditionError("pattern and cluster size cannot meet minimum degree " +
                                    std::to_string(need) + " even with complete pairs");
        if (score(spec.pair_density) >= need) {
            p = spec.pair_density;
        } else {
            double lo = spec.pair_density, hi = 1.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = (lo + hi) / 2;
                if (score(mid) >= need) hi = mid;
                else lo = mid;
            }
            p = hi;
        }
    }
    out.pair_density = p;

    for (std::size_t attempt = 1; attempt <= 50; ++attempt) {
        std::vector<Vertex> label(n);
        std::iota(label.begin(), label.end(), 0);
        rng.shuffle(label);
        std::vector<std::vector<Vertex>> members(l);
        std::vector<Vertex> v0;
        std::vector<std::size_t> owner(n, kNoCluster);
        for (std::size_t c = 0; c < l; ++c) {
            std::vector<Vertex> block(label.begin() + static_cast<std::ptrdiff_t>(c * m),
                                      label.begin() + static_cast<std::ptrdiff_t>((c + 1) * m));
            rng.shuffle(block);
            v0.insert(v0.end(), block.begin(), block.begin() + static_cast<std::ptrdiff_t>(r));
            members[c].assign(block.begin() + static_cast<std::ptrdiff_t>(r), block.end());
            std::sort(members[c].begin(), members[c].end());
            for (auto v : members[c]) owner[v] = c;
        }
        GraphBuilder b(n);
        for (std::size_t c = 0; c < l; ++c) {
            const auto& mc = members[c];
            for (std::size_t a = 0; a < mc.size(); ++a)
                for (std::size_t bb = a + 1; bb < mc.size(); ++bb) b.add_edge(mc[a], mc[bb]);
            for (std::size_t c2 = c + 1; c2 < l; ++c2) {
                if (!out.pattern.adjacent(c, c2)) continue;
                for (auto u : mc)
                    for (auto v : members[c2])
                        if (p >= 1.0 || rng.bernoulli(p)) b.add_edge(u, v);
            }
        }
        std::sort(v0.begin(), v0.end());
        std::vector<char> is_v0(n, 0);
        for (auto v : v0) is_v0[v] = 1;
        for (auto v : v0)
            for (Vertex u = 0; u < n; ++u) {
                if (u == v || (is_v0[u] && u < v)) continue;
                if (rng.bernoulli(q)) b.add_edge(u, v);
            }
        auto g = std::make_shared<Graph>(b.build());
        const std::size_t mind = min_degree(*g);
        out.attempts = attempt;
        out.min_degree = mind;
        if (static_cast<double>(mind) >= need) {
            out.graph = std::move(g);
            out.exceptional = VertexSet(v0);
            out.clusters.clear();
            for (auto& mc : members) out.clusters.emplace_back(mc);
            return out;
        }
    }
    throw PreconditionError("planted host missed the minimum degree bound in 50 samples");
}

std::string to_string(HFamily f) {
    switch (f) {
        case HFamily::grid: return "grid";
        case HFamily::forest: return "forest";
        case HFamily::component_union: return "component-union";
        case HFamily::path_power: return "path-power";
        case HFamily::matchings_union: return "matchings-union";
    }
    return "unknown";
}

HFamily parse_family(const std::string& s) {
    if (s == "grid") return HFamily::grid;
    if (s == "forest") return HFamily::forest;
    if (s == "component-union") return HFamily::component_union;
    if (s == "path-power" || s == "bandwidth-path-power") return HFamily::path_power;
    if (s == "matchings-union" || s == "hd") return HFamily::matchings_union;
    throw ArgumentError("unknown H family '" + s + "'");
}

namespace {

GeneratedH make_grid(const SubgraphSpec& spec) {
    const std::size_t n = spec.n;
    std::size_t r = spec.rows;
    if (r == 0) {
        r = 1;
        for (std::size_t t = 1; t * t <= n; ++t)
            if (n % t == 0) r = t;
    }
    if (r == 0 || n % r != 0) throw ArgumentError("grid rows must divide n");
    const std::size_t c = n / r;
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            const Vertex v = i * c + j;
            if (j + 1 < c) edges.emplace_back(v, v + 1);
            if (i + 1 < r) edges.emplace_back(v, v + c);
        }
    GeneratedH out{Graph(n, edges), std::nullopt, std::nullopt};
    const std::size_t bands = std::max<std::size_t>(spec.bands, 1);
    std::vector<Vertex> sep;
    std::size_t last = SIZE_MAX;
    // Cut across the longer side so separator lines are short.
    const bool by_column = c > r;
    const std::size_t span = by_column ? c : r;
    for (std::size_t t = 1; t < bands; ++t) {
        const std::size_t line = t * span / bands;
        if (line == last || line >= span) continue;
        last = line;
        if (by_column)
            for (std::size_t i = 0; i < r; ++i) sep.push_back(i * c + line);
        else
            for (std::size_t j = 0; j < c; ++j) sep.push_back(line * c + j);
    }
    std::sort(sep.begin(), sep.end());
    out.separation = separation_from_separator(out.graph, VertexSet(sep));
    return out;
}

Vertex centroid(const Graph& g, const VertexSet& tree) {
    // Repeatedly step into a subtree holding more than half of the tree.
    const std::size_t total = tree.size();
    Vertex cur = tree[0];
    Vertex prev = kNoCluster;
    for (;;) {
        bool moved = false;
        for (auto w : g.neighbors(cur)) {
            if (w == prev) continue;
            // Size of the side of w when the edge cur-w is cut.
            std::vector<Vertex> stack{w};
            std::vector<char> seen(g.order(), 0);
            seen[cur] = seen[w] = 1;
            std::size_t cnt = 0;
            while (!stack.empty()) {
                const auto v = stack.back();
                stack.pop_back();
                ++cnt;
                for (auto u : g.neighbors(v))
                    if (!seen[u]) {
                        seen[u] = 1;
                        stack.push_back(u);
                    }
            }
            if (2 * cnt > total) {
                prev = cur;
                cur = w;
                moved = true;
                break;
            }
        }
        if (!moved) return cur;
    }
}

GeneratedH make_forest(const SubgraphSpec& spec, Rng& rng) {
    const std::size_t n = spec.n, cs = std::max<std::size_t>(spec.component_size, 1);
    const std::size_t cap = spec.max_degree == 0 ? SIZE_MAX : spec.max_degree;
    if (cap < 2 && cs > 2) throw ArgumentError("forest trees need degree cap at least 2");
    std::vector<Edge> edges;
    std::vector<std::size_t> deg(n, 0);
    std::vector<Vertex> tree;
    std::size_t goal = 0;
    for (Vertex v = 0; v < n; ++v) {
        std::vector<Vertex> open;
        for (auto u : tree)
            if (deg[u] < cap) open.push_back(u);
        if (tree.size() >= goal || open.empty()) {
            tree.clear();
            goal = std::max<std::size_t>(1, cs / 2) + rng.below(cs - std::max<std::size_t>(1, cs / 2) + 1);
            tree.push_back(v);
            continue;
        }
        const Vertex u = open[rng.below(open.size())];
        edges.emplace_back(u, v);
        ++deg[u];
        ++deg[v];
        tree.push_back(v);
    }
    GeneratedH out{Graph(n, edges), std::nullopt, std::nullopt};
    std::vector<Vertex> sep;
    const std::size_t split = std::max<std::size_t>(2, cs / 2);
    for (const auto& t : components(out.graph))
        if (t.size() > split) sep.push_back(centroid(out.graph, t));
    out.separation = separation_from_separator(out.graph, VertexSet(sep));
    return out;
}

GeneratedH make_component_union(const SubgraphSpec& spec) {
    const std::size_t n = spec.n;
    std::size_t s = std::max<std::size_t>(spec.component_size, 1);
    if (spec.shape == "triangle") s = 3;
    if (spec.shape == "cycle" && s < 3) throw ArgumentError("cycle components need size >= 3");
    if (spec.shape != "path" && spec.shape != "cycle" && spec.shape != "triangle" &&
        spec.shape != "star")
        throw ArgumentError("unknown component shape '" + spec.shape + "'");
    std::vector<Edge> edges;
    std::vector<Vertex> sep;
    auto add_shape = [&](Vertex base) {
        if (spec.shape == "star") {
            for (std::size_t i = 1; i < s; ++i) edges.emplace_back(base, base + i);
            return;
        }
        for (std::size_t i = 0; i + 1 < s; ++i) edges.emplace_back(base + i, base + i + 1);
        if ((spec.shape == "cycle" || spec.shape == "triangle") && s >= 3)
            edges.emplace_back(base, base + s - 1);
    };
    Vertex next = 0;
    if (!spec.linked) {
        while (next + s <= n) {
            add_shape(next);
            next += s;
        }
    } else {
        const std::size_t t = (n + 1) / (s + 1);
        for (std::size_t i = 0; i < t; ++i) {
            add_shape(next);
            next += s;
            if (i + 1 < t) {
                // Separator vertex joining this component's last vertex to the next one's first.
                sep.push_back(next);
                edges.emplace_back(next - 1, next);
                edges.emplace_back(next, next + 1);
                ++next;
            }
        }
    }
    // Remaining vertices stay isolated.
    GeneratedH out{Graph(n, edges), std::nullopt, std::nullopt};
    out.separation = separation_from_separator(out.graph, VertexSet(sep));
    return out;
}

GeneratedH make_path_power(const SubgraphSpec& spec, Rng& rng) {
    const std::size_t n = spec.n, p = spec.power;
    std::vector<Vertex> label(n);
    std::iota(label.begin(), label.end(), 0);
    if (spec.relabel) rng.shuffle(label);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j <= i + p && j < n; ++j) {
            if (spec.dropout > 0.0 && rng.bernoulli(spec.dropout)) continue;
            edges.emplace_back(std::min(label[i], label[j]), std::max(label[i], label[j]));
        }
    std::sort(edges.begin(), edges.end());
    GeneratedH out{Graph(n, edges), std::nullopt, std::nullopt};
    out.ordering = BandwidthOrdering::from_order(out.graph, label);
    return out;
}

// d edge-disjoint perfect matchings between the halves, so H is d-regular.
// The unused pairs after t matchings form a (half - t)-regular bipartite
// graph, which always has a perfect matching; shuffled adjacency randomises it.
GeneratedH make_matchings_union(const SubgraphSpec& spec, Rng& rng) {
    if (spec.n % 2 != 0) throw ArgumentError("matchings union needs an even number of vertices");
    const std::size_t half = spec.n / 2;
    if (spec.matchings > half) throw ArgumentError("more matchings than vertices per side");
    GraphBuilder b(spec.n);
    for (std::size_t t = 0; t < spec.matchings; ++t) {
        BipartiteGraph free(half, half);
        for (std::size_t i = 0; i < half; ++i) {
            for (std::size_t j = 0; j < half; ++j)
                if (!b.has_edge(i, half + j)) free.add_edge(i, j);
            rng.shuffle(free.adj[i]);
        }
        const auto mt = max_matching(free);
        if (mt.size < half) throw InconsistencyError("regular bipartite remainder without a perfect matching");
        for (std::size_t i = 0; i < half; ++i) b.add_edge(i, half + mt.left_to_right[i]);
    }
    GeneratedH out{b.build(), std::nullopt, std::nullopt};
    out.separation = separation_from_separator(out.graph, VertexSet());
    return out;
}

}  // namespace

GeneratedH generate_h(const SubgraphSpec& spec, Rng& rng) {
    if (spec.n == 0) throw ArgumentError("H needs at least one vertex");
    GeneratedH out;
    switch (spec.family) {
        case HFamily::grid: out = make_grid(spec); break;
        case HFamily::forest: out = make_forest(spec, rng); break;
        case HFamily::component_union: out = make_component_union(spec); break;
        case HFamily::path_power: out = make_path_power(spec, rng); break;
        case HFamily::matchings_union: out = make_matchings_union(spec, rng); break;
    }
    if (spec.max_degree != 0 && out.graph.order() > 0 && max_degree(out.graph) > spec.max_degree)
        throw ArgumentError(to_string(spec.family) + " instance has maximum degree " +
                            std::to_string(max_degree(out.graph)) + " above the cap " +
                            std::to_string(spec.max_degree));
    if (out.separation) {
        const auto chk = verify_separation(out.graph, *out.separation,
                                           out.separation->alpha_certificate + 1e-12);
        if (!chk.ok) throw InconsistencyError("generated separation witness fails: " + chk.detail);
    }
    return out;
}

}  // namespace wellsep
