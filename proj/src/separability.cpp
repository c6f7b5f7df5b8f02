#include "wellsep/separability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wellsep/errors.hpp"
#include "wellsep/rng.hpp"

namespace wellsep {

namespace {

std::size_t max_part_size(double alpha, std::size_t n) {
    return static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n) + 1e-9));
}

}  // namespace

std::size_t Separation::largest_component() const {
    std::size_t best = 0;
    for (const auto& c : components) best = std::max(best, c.size());
    return best;
}

Separation make_separation(const Graph& h, VertexSet separator, std::vector<VertexSet> parts) {
    Separation sep;
    sep.separator = std::move(separator);
    sep.components = std::move(parts);
    const std::size_t n = h.order();
    const std::size_t big = std::max(sep.separator.size(), sep.largest_component());
    sep.alpha_certificate = n == 0 ? 0.0 : static_cast<double>(big) / static_cast<double>(n);
    return sep;
}

Separation separation_from_separator(const Graph& h, VertexSet separator) {
    auto parts = components(h, separator);
    return make_separation(h, std::move(separator), std::move(parts));
}

SeparationCheck verify_separation(const Graph& h, const Separation& sep, double alpha) {
    const std::size_t n = h.order();
    sep.separator.validate(h);
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> owner(n, kNone);
    const std::size_t sep_tag = sep.components.size();
    for (auto v : sep.separator) owner[v] = sep_tag;
    for (std::size_t i = 0; i < sep.components.size(); ++i) {
        sep.components[i].validate(h);
        for (auto v : sep.components[i]) {
            if (owner[v] != kNone)
                throw StructuralError("vertex " + std::to_string(v) + " appears in two parts");
            owner[v] = i;
        }
    }
    for (Vertex v = 0; v < n; ++v)
        if (owner[v] == kNone)
            throw StructuralError("vertex " + std::to_string(v) + " is not covered");

    SeparationCheck out;
    const std::size_t big = std::max(sep.separator.size(), sep.largest_component());
    out.certificate = n == 0 ? 0.0 : static_cast<double>(big) / static_cast<double>(n);
    const std::size_t limit = max_part_size(alpha, n);

    for (auto [u, v] : h.edges()) {
        if (owner[u] != sep_tag && owner[v] != sep_tag && owner[u] != owner[v]) {
            out.violation = SeparationViolation::cross_edge;
            out.detail = "edge " + std::to_string(u) + "-" + std::to_string(v) + " joins parts " +
                         std::to_string(owner[u]) + " and " + std::to_string(owner[v]);
            return out;
        }
    }
    if (sep.separator.size() > limit) {
        out.violation = SeparationViolation::separator_too_large;
        out.detail = "|S|=" + std::to_string(sep.separator.size()) + " > " + std::to_string(limit);
        return out;
    }
    for (std::size_t i = 0; i < sep.components.size(); ++i) {
        if (sep.components[i].size() > limit) {
            out.violation = SeparationViolation::component_too_large;
            out.detail = "part " + std::to_string(i) + " has " +
                         std::to_string(sep.components[i].size()) + " > " + std::to_string(limit) +
                         " vertices";
            return out;
        }
    }
    out.ok = true;
    return out;
}

BandwidthOrdering BandwidthOrdering::from_order(const Graph& h, std::vector<Vertex> order) {
    const std::size_t n = h.order();
    if (order.size() != n) throw ArgumentError("ordering length differs from graph order");
    std::vector<char> seen(n, 0);
    for (auto v : order) {
        if (v >= n || seen[v]) throw ArgumentError("ordering is not a permutation");
        seen[v] = 1;
    }
    BandwidthOrdering out;
    out.order = std::move(order);
    const auto pos = out.positions();
    for (auto [u, v] : h.edges()) {
        const std::size_t stretch = pos[u] > pos[v] ? pos[u] - pos[v] : pos[v] - pos[u];
        out.width = std::max(out.width, stretch);
    }
    return out;
}

std::vector<std::size_t> BandwidthOrdering::positions() const {
    std::vector<std::size_t> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    return pos;
}

BandwidthSeparation bandwidth_separator(const Graph& h, const BandwidthOrdering& ordering,
                                        double beta) {
    const std::size_t n = h.order();
    if (!(beta > 0.0 && beta < 1.0)) throw ArgumentError("beta must lie in (0,1)");
    if (ordering.order.size() != n) throw ArgumentError("ordering length differs from graph order");
    const auto pos = ordering.positions();
    const double limit = beta * static_cast<double>(n) + 1e-9;
    for (auto [u, v] : h.edges()) {
        const std::size_t stretch = pos[u] > pos[v] ? pos[u] - pos[v] : pos[v] - pos[u];
        if (static_cast<double>(stretch) > limit)
            throw PreconditionError("edge " + std::to_string(u) + "-" + std::to_string(v) +
                                    " has stretch " + std::to_string(stretch) + " > beta*n = " +
                                    std::to_string(beta * static_cast<double>(n)));
    }

    BandwidthSeparation out;
    out.interval_count = static_cast<std::size_t>(std::floor(1.0 / beta + 1e-9));
    out.stride = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(out.interval_count)) + 1e-9));
    out.interval_length = n == 0 ? 1 : (n + out.interval_count - 1) / out.interval_count;
    out.ideal_ratio = std::sqrt(beta);

    const std::size_t len = out.interval_length;
    const std::size_t intervals = n == 0 ? 0 : (n + len - 1) / len;
    std::vector<Vertex> sep;
    std::vector<VertexSet> parts;
    std::vector<Vertex> block;
    for (std::size_t i = 1; i <= intervals; ++i) {
        const std::size_t lo = (i - 1) * len;
        const std::size_t hi = std::min(n, i * len);
        const bool in_s = i % out.stride == 0;
        if (in_s && !block.empty()) {
            parts.emplace_back(std::move(block));
            block.clear();
        }
        for (std::size_t p = lo; p < hi; ++p) (in_s ? sep : block).push_back(ordering.order[p]);
    }
    if (!block.empty()) parts.emplace_back(std::move(block));

    out.separation = make_separation(h, VertexSet(std::move(sep)), std::move(parts));
    out.separation.rounded = (n % out.interval_count != 0) ||
                             out.stride * out.stride != out.interval_count ||
                             std::abs(1.0 / beta - static_cast<double>(out.interval_count)) > 1e-9;
    return out;
}

namespace {

// ---- exhaustive regime -------------------------------------------------------

bool small_components_mask(const std::vector<std::uint32_t>& adj, std::uint32_t alive,
                           std::size_t limit) {
    std::uint32_t left = alive;
    while (left) {
        std::uint32_t comp = left & (~left + 1);
        std::uint32_t frontier = comp;
        while (frontier) {
            const int v = std::countr_zero(frontier);
            frontier &= frontier - 1;
            const std::uint32_t fresh = adj[static_cast<std::size_t>(v)] & alive & ~comp;
            comp |= fresh;
            frontier |= fresh;
        }
        if (static_cast<std::size_t>(std::popcount(comp)) > limit) return false;
        left &= ~comp;
    }
    return true;
}

std::optional<VertexSet> exact_separator(const Graph& h, std::size_t limit) {
    const std::size_t n = h.order();
    std::vector<std::uint32_t> adj(n, 0);
    for (auto [u, v] : h.edges()) {
        adj[u] |= 1U << v;
        adj[v] |= 1U << u;
    }
    const std::uint32_t all = n == 32 ? ~0U : ((1U << n) - 1U);
    for (std::size_t size = 0; size <= std::min(limit, n); ++size) {
        // Gosper's hack over n-bit masks of the given popcount.
        if (size == 0) {
            if (small_components_mask(adj, all, limit)) return VertexSet{};
            continue;
        }
        std::uint32_t s = (1U << size) - 1U;
        while (s <= all && s != 0) {
            if (small_components_mask(adj, all & ~s, limit)) {
                std::vector<Vertex> members;
                for (std::size_t v = 0; v < n; ++v)
                    if (s >> v & 1U) members.push_back(v);
                return VertexSet(std::move(members));
            }
            const std::uint32_t c = s & (~s + 1);
            const std::uint32_t r = s + c;
            if (r == 0) break;
            s = (((r ^ s) >> 2) / c) | r;
        }
    }
    return std::nullopt;
}

// ---- heuristics ---------------------------------------------------------------

std::vector<std::vector<Vertex>> bfs_layers(const Graph& h, Vertex root,
                                            const std::vector<char>& inside) {
    std::vector<std::vector<Vertex>> layers;
    std::vector<char> seen(h.order(), 0);
    std::vector<Vertex> cur{root};
    seen[root] = 1;
    while (!cur.empty()) {
        std::vector<Vertex> next;
        for (auto u : cur)
            for (auto w : h.neighbors(u))
                if (inside[w] && !seen[w]) {
                    seen[w] = 1;
                    next.push_back(w);
                }
        layers.push_back(std::move(cur));
        cur = std::move(next);
    }
    return layers;
}

Vertex peripheral_vertex(const Graph& h, Vertex start, const std::vector<char>& inside) {
    Vertex v = start;
    std::size_t depth = 0;
    for (int sweep = 0; sweep < 4; ++sweep) {
        auto layers = bfs_layers(h, v, inside);
        if (layers.size() <= depth) break;
        depth = layers.size();
        const auto& last = layers.back();
        v = *std::min_element(last.begin(), last.end(), [&](Vertex a, Vertex b) {
            return h.degree(a) < h.degree(b) || (h.degree(a) == h.degree(b) && a < b);
        });
    }
    return v;
}

// Chooses separator layers minimising their total size subject to every run of
// kept layers holding at most `limit` vertices.
std::vector<std::size_t> layer_dp(const std::vector<std::size_t>& sizes, std::size_t limit) {
    const std::size_t t = sizes.size();
    constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 2;
    // cost[i+1]: best cost with layer i a separator (cost[0]: virtual separator before 0).
    std::vector<std::size_t> cost(t + 1, kInf), prev(t + 1, 0);
    cost[0] = 0;
    for (std::size_t i = 0; i < t; ++i) {
        std::size_t run = 0;
        for (std::size_t j = i + 1; j-- > 0;) {
            // previous separator at layer j-1 (index j in cost), kept layers j..i-1
            if (cost[j] < kInf && cost[j] + sizes[i] < cost[i + 1]) {
                cost[i + 1] = cost[j] + sizes[i];
                prev[i + 1] = j;
            }
            if (j == 0) break;
            run += sizes[j - 1];
            if (run > limit) break;
        }
    }
    std::size_t best = kInf, best_j = 0, run = 0;
    for (std::size_t j = t + 1; j-- > 0;) {
        if (cost[j] < best) {
            best = cost[j];
            best_j = j;
        }
        if (j == 0) break;
        run += sizes[j - 1];
        if (run > limit) break;
    }
    std::vector<std::size_t> chosen;
    for (std::size_t j = best_j; j > 0; j = prev[j]) chosen.push_back(j - 1);
    std::reverse(chosen.begin(), chosen.end());
    return chosen;
}

struct UnionFind {
    std::vector<std::size_t> parent, size;
    explicit UnionFind(std::size_t n) : parent(n), size(n, 1) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    }
};

// Returns separator vertices to the graph whenever the merged component stays small.
std::vector<Vertex> prune_separator(const Graph& h, std::vector<Vertex> sep, std::size_t limit) {
    const std::size_t n = h.order();
    std::vector<char> in_sep(n, 0);
    for (auto v : sep) in_sep[v] = 1;
    UnionFind uf(n);
    for (auto [u, v] : h.edges())
        if (!in_sep[u] && !in_sep[v]) uf.unite(u, v);
    std::sort(sep.begin(), sep.end(), [&](Vertex a, Vertex b) {
        return h.degree(a) < h.degree(b) || (h.degree(a) == h.degree(b) && a < b);
    });
    std::vector<Vertex> kept;
    for (auto s : sep) {
        std::vector<std::size_t> roots;
        std::size_t merged = 1;
        for (auto w : h.neighbors(s)) {
            if (in_sep[w]) continue;
            const std::size_t r = uf.find(w);
            if (std::find(roots.begin(), roots.end(), r) == roots.end()) {
                roots.push_back(r);
                merged += uf.size[r];
            }
        }
        if (merged <= limit) {
            in_sep[s] = 0;
            for (auto r : roots) uf.unite(s, r);
        } else {
            kept.push_back(s);
        }
    }
    return kept;
}

std::vector<Vertex> sweep_strategy(const Graph& h, std::size_t limit, Rng& rng,
                                   std::size_t roots_per_component) {
    std::vector<Vertex> sep;
    std::vector<char> inside(h.order(), 0);
    for (const auto& comp : components(h)) {
        if (comp.size() <= limit) continue;
        for (auto v : comp) inside[v] = 1;
        std::vector<Vertex> seeds{peripheral_vertex(h, comp[0], inside)};
        for (std::size_t r = 1; r < roots_per_component; ++r)
            seeds.push_back(comp[rng.below(comp.size())]);
        std::vector<Vertex> best;
        bool have = false;
        for (auto root : seeds) {
            auto layers = bfs_layers(h, root, inside);
            std::vector<std::size_t> sizes;
            for (const auto& l : layers) sizes.push_back(l.size());
            std::vector<Vertex> cut;
            for (auto idx : layer_dp(sizes, limit))
                cut.insert(cut.end(), layers[idx].begin(), layers[idx].end());
            if (!have || cut.size() < best.size()) {
                best = std::move(cut);
                have = true;
            }
        }
        sep.insert(sep.end(), best.begin(), best.end());
        for (auto v : comp) inside[v] = 0;
    }
    return sep;
}

void bisect(const Graph& h, const std::vector<Vertex>& part, std::size_t limit,
            std::vector<char>& inside, std::vector<Vertex>& sep) {
    if (part.size() <= limit) return;
    for (auto v : part) inside[v] = 1;
    const Vertex root = peripheral_vertex(h, part[0], inside);
    auto layers = bfs_layers(h, root, inside);
    for (auto v : part) inside[v] = 0;
    const std::size_t total = part.size();
    std::size_t best = layers.size() / 2, prefix = 0;
    std::size_t best_size = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (4 * prefix >= total && 4 * prefix <= 3 * total && layers[i].size() < best_size) {
            best = i;
            best_size = layers[i].size();
        }
        prefix += layers[i].size();
    }
    std::vector<char> cut(h.order(), 0);
    for (auto v : layers[best]) {
        cut[v] = 1;
        sep.push_back(v);
    }
    // Recurse into the connected pieces of part minus the cut layer.
    std::vector<char> todo(h.order(), 0);
    for (auto v : part)
        if (!cut[v]) todo[v] = 1;
    for (auto s : part) {
        if (!todo[s]) continue;
        std::vector<Vertex> piece{s}, stack{s};
        todo[s] = 0;
        while (!stack.empty()) {
            Vertex u = stack.back();
            stack.pop_back();
            for (auto w : h.neighbors(u))
                if (todo[w]) {
                    todo[w] = 0;
                    piece.push_back(w);
                    stack.push_back(w);
                }
        }
        bisect(h, piece, limit, inside, sep);
    }
}

std::vector<Vertex> bisection_strategy(const Graph& h, std::size_t limit) {
    std::vector<Vertex> sep;
    std::vector<char> inside(h.order(), 0);
    for (const auto& comp : components(h)) bisect(h, comp.members(), limit, inside, sep);
    return sep;
}

}  // namespace

SeparatorSearch find_separator(const Graph& h, double alpha, std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in (0,1]");
    const std::size_t n = h.order();
    const std::size_t limit = max_part_size(alpha, n);
    SeparatorSearch out;

    auto parts = components(h);
    const bool trivially = std::all_of(parts.begin(), parts.end(),
                                       [&](const VertexSet& c) { return c.size() <= limit; });
    if (trivially) {
        out.separation = make_separation(h, VertexSet{}, std::move(parts));
        out.exact = n <= kExactSeparatorLimit;
        out.strategy = "already-separated";
        return out;
    }

    if (n <= kExactSeparatorLimit) {
        out.exact = true;
        out.strategy = "exhaustive";
        if (auto s = exact_separator(h, limit)) out.separation = separation_from_separator(h, *s);
        return out;
    }

    Rng rng(seed);
    auto sweep = prune_separator(h, sweep_strategy(h, limit, rng, 6), limit);
    auto bis = prune_separator(h, bisection_strategy(h, limit), limit);
    const bool use_sweep = sweep.size() <= bis.size();
    auto& best = use_sweep ? sweep : bis;
    out.strategy = use_sweep ? "bfs-layer-sweep" : "recursive-bisection";
    if (best.size() <= limit) {
        auto sep = separation_from_separator(h, VertexSet(best));
        if (sep.largest_component() <= limit) out.separation = std::move(sep);
    }
    return out;
}

AlphaThreshold alpha_threshold(double eps, std::size_t clusters, std::size_t max_degree,
                               std::size_t k) {
    AlphaThreshold t;
    const double l = static_cast<double>(clusters);
    t.concentration = eps * eps / (4.0 * l * l * l);
    t.reassignment = eps / (l * std::pow(static_cast<double>(max_degree), static_cast<double>(k)));
    t.combined = std::min(t.concentration, t.reassignment);
    return t;
}

}  // namespace wellsep
