#include "wellsep/clique_factor.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>

#include "wellsep/errors.hpp"

namespace wellsep {

CliqueFactor CliqueFactor::from_cliques(std::size_t order, std::size_t k,
                                        std::vector<std::vector<std::size_t>> cliques) {
    CliqueFactor f;
    f.k = k;
    f.clique_of.assign(order, kNoCluster);
    for (std::size_t q = 0; q < cliques.size(); ++q) {
        std::sort(cliques[q].begin(), cliques[q].end());
        for (auto v : cliques[q]) {
            if (v >= order) throw ArgumentError("clique member out of range");
            f.clique_of[v] = q;
        }
    }
    f.cliques = std::move(cliques);
    for (std::size_t v = 0; v < order; ++v)
        if (f.clique_of[v] == kNoCluster) f.leftover.push_back(v);
    return f;
}

std::vector<std::size_t> CliqueFactor::partners(std::size_t v) const {
    std::vector<std::size_t> out;
    if (v >= clique_of.size() || clique_of[v] == kNoCluster) return out;
    for (auto u : cliques[clique_of[v]])
        if (u != v) out.push_back(u);
    return out;
}

bool verify_factor(const Graph& gr, const CliqueFactor& f, std::size_t k, std::string* why) {
    auto fail = [&](std::string msg) {
        if (why) *why = std::move(msg);
        return false;
    };
    const std::size_t l = gr.order();
    if (f.k != k) return fail("factor built for a different k");
    if (k == 0 || f.cliques.size() != l / k)
        return fail("expected " + std::to_string(k ? l / k : 0) + " cliques, got " +
                    std::to_string(f.cliques.size()));
    std::vector<char> seen(l, 0);
    for (std::size_t q = 0; q < f.cliques.size(); ++q) {
        const auto& c = f.cliques[q];
        if (c.size() != k) return fail("clique " + std::to_string(q) + " has wrong size");
        for (std::size_t a = 0; a < c.size(); ++a) {
            if (c[a] >= l) return fail("clique member out of range");
            if (seen[c[a]]) return fail("vertex " + std::to_string(c[a]) + " in two cliques");
            seen[c[a]] = 1;
            for (std::size_t b = a + 1; b < c.size(); ++b)
                if (!gr.adjacent(c[a], c[b]))
                    return fail("non-edge " + std::to_string(c[a]) + "-" + std::to_string(c[b]) +
                                " inside clique " + std::to_string(q));
        }
    }
    std::vector<std::size_t> rest;
    for (std::size_t v = 0; v < l; ++v)
        if (!seen[v]) rest.push_back(v);
    auto listed = f.leftover;
    std::sort(listed.begin(), listed.end());
    if (listed != rest) return fail("leftover list does not match uncovered vertices");
    if (rest.size() > k - 1) return fail("more than k-1 leftover vertices");
    if (f.clique_of.size() != l) return fail("clique_of has wrong length");
    for (std::size_t v = 0; v < l; ++v) {
        const std::size_t q = f.clique_of[v];
        if (seen[v] != (q != kNoCluster)) return fail("clique_of disagrees with cliques");
        if (q != kNoCluster && !std::binary_search(f.cliques[q].begin(), f.cliques[q].end(), v))
            return fail("clique_of disagrees with cliques");
    }
    return true;
}

namespace {

class Greedy {
  public:
    Greedy(const Graph& g, std::size_t k) : g_(g), k_(k), alive_(g.order(), 1), deg_(g.order()) {
        for (std::size_t v = 0; v < g.order(); ++v) deg_[v] = g.degree(v);
    }

    // Packs cliques until stuck or the target is met.
    std::vector<std::vector<std::size_t>> run(std::size_t target) {
        std::vector<std::vector<std::size_t>> out;
        std::vector<std::size_t> seeds;
        while (out.size() < target) {
            seeds.clear();
            for (std::size_t v = 0; v < g_.order(); ++v)
                if (alive_[v]) seeds.push_back(v);
            std::sort(seeds.begin(), seeds.end(), [&](std::size_t a, std::size_t b) {
                return deg_[a] < deg_[b] || (deg_[a] == deg_[b] && a < b);
            });
            bool placed = false;
            for (auto s : seeds) {
                auto clique = grow(s);
                if (clique.size() == k_) {
                    for (auto v : clique) kill(v);
                    out.push_back(std::move(clique));
                    placed = true;
                    break;
                }
            }
            if (!placed) break;
        }
        return out;
    }

  private:
    std::vector<std::size_t> grow(std::size_t seed) {
        std::vector<std::size_t> clique{seed};
        std::vector<std::size_t> cand;
        for (auto w : g_.neighbors(seed))
            if (alive_[w]) cand.push_back(w);
        while (clique.size() < k_) {
            const std::size_t need = k_ - clique.size() - 1;
            std::size_t best = kNoCluster;
            long best_resid = -1;
            for (auto c : cand) {
                std::size_t ext = 0;
                for (auto o : cand)
                    if (o != c && g_.adjacent(c, o)) ++ext;
                if (ext < need) continue;
                const long resid = residual_min_degree(clique, c);
                if (resid > best_resid) {
                    best_resid = resid;
                    best = c;
                }
            }
            if (best == kNoCluster) return clique;
            clique.push_back(best);
            std::vector<std::size_t> next;
            for (auto o : cand)
                if (o != best && g_.adjacent(best, o)) next.push_back(o);
            cand = std::move(next);
        }
        return clique;
    }

    long residual_min_degree(const std::vector<std::size_t>& clique, std::size_t extra) const {
        long best = -1;
        for (std::size_t u = 0; u < g_.order(); ++u) {
            if (!alive_[u] || u == extra) continue;
            if (std::find(clique.begin(), clique.end(), u) != clique.end()) continue;
            long d = static_cast<long>(deg_[u]);
            if (g_.adjacent(u, extra)) --d;
            for (auto c : clique)
                if (g_.adjacent(u, c)) --d;
            if (best < 0 || d < best) best = d;
        }
        return best < 0 ? static_cast<long>(g_.order()) : best;
    }

    void kill(std::size_t v) {
        alive_[v] = 0;
        for (auto w : g_.neighbors(v))
            if (alive_[w]) --deg_[w];
    }

    const Graph& g_;
    std::size_t k_;
    std::vector<char> alive_;
    std::vector<std::size_t> deg_;
};

// Finds a k-clique inside `pool` (by backtracking), or an empty vector.
std::vector<std::size_t> clique_in(const Graph& g, const std::vector<std::size_t>& pool,
                                   std::size_t k) {
    std::vector<std::size_t> chosen;
    std::function<bool(std::size_t)> rec = [&](std::size_t from) {
        if (chosen.size() == k) return true;
        for (std::size_t i = from; i < pool.size(); ++i) {
            if (pool.size() - i < k - chosen.size()) return false;
            const auto v = pool[i];
            bool ok = true;
            for (auto c : chosen)
                if (!g.adjacent(v, c)) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            chosen.push_back(v);
            if (rec(i + 1)) return true;
            chosen.pop_back();
        }
        return false;
    };
    if (rec(0)) return chosen;
    return {};
}

bool is_clique_with(const Graph& g, const std::vector<std::size_t>& q, std::size_t drop,
                    std::size_t add) {
    for (auto v : q)
        if (v != drop && !g.adjacent(v, add)) return false;
    return true;
}

// Single-vertex swaps between a packed clique and the uncovered pool.
bool swap_repair(const Graph& g, std::size_t k, std::size_t target,
                 std::vector<std::vector<std::size_t>>& packed) {
    const std::size_t l = g.order();
    for (std::size_t round = 0; round < l * k + 8 && packed.size() < target; ++round) {
        std::vector<char> used(l, 0);
        for (const auto& q : packed)
            for (auto v : q) used[v] = 1;
        std::vector<std::size_t> pool;
        for (std::size_t v = 0; v < l; ++v)
            if (!used[v]) pool.push_back(v);
        if (auto c = clique_in(g, pool, k); !c.empty()) {
            packed.push_back(std::move(c));
            continue;
        }
        bool improved = false;
        for (std::size_t qi = 0; qi < packed.size() && !improved; ++qi) {
            for (std::size_t pos = 0; pos < k && !improved; ++pos) {
                const std::size_t out_v = packed[qi][pos];
                for (std::size_t pi = 0; pi < pool.size() && !improved; ++pi) {
                    const std::size_t in_v = pool[pi];
                    if (!is_clique_with(g, packed[qi], out_v, in_v)) continue;
                    auto next_pool = pool;
                    next_pool[pi] = out_v;
                    std::sort(next_pool.begin(), next_pool.end());
                    if (auto c = clique_in(g, next_pool, k); !c.empty()) {
                        packed[qi][pos] = in_v;
                        packed.push_back(std::move(c));
                        improved = true;
                    }
                }
            }
        }
        if (!improved) return false;
    }
    return packed.size() >= target;
}

class Exhaustive {
  public:
    Exhaustive(const Graph& g, std::size_t k, std::size_t target, std::size_t budget)
        : k_(k), target_(target), budget_(budget), adj_(g.order(), 0) {
        for (auto [u, v] : g.edges()) {
            adj_[u] |= std::uint64_t{1} << v;
            adj_[v] |= std::uint64_t{1} << u;
        }
    }

    bool run(std::size_t order) {
        const std::uint64_t all = order == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << order) - 1);
        return search(all, order - k_ * target_);
    }
    const std::vector<std::vector<std::size_t>>& cliques() const { return found_; }
    std::size_t nodes() const { return nodes_; }
    bool exhausted() const { return exhausted_; }

  private:
    bool search(std::uint64_t alive, std::size_t skips) {
        if (found_.size() == target_) return true;
        if (++nodes_ > budget_) {
            exhausted_ = true;
            return false;
        }
        // Most constrained alive vertex: fewest alive neighbours.
        int v = -1;
        int best_deg = 1 << 30;
        for (std::uint64_t m = alive; m; m &= m - 1) {
            const int u = std::countr_zero(m);
            const int d = std::popcount(adj_[static_cast<std::size_t>(u)] & alive);
            if (d < best_deg) {
                best_deg = d;
                v = u;
            }
        }
        if (v < 0) return false;
        const std::uint64_t bit = std::uint64_t{1} << v;
        std::vector<std::size_t> clique{static_cast<std::size_t>(v)};
        if (extend(alive & ~bit, adj_[static_cast<std::size_t>(v)] & alive, clique, skips))
            return true;
        if (exhausted_) return false;
        if (skips > 0) return search(alive & ~bit, skips - 1);
        return false;
    }

    bool extend(std::uint64_t alive, std::uint64_t cand, std::vector<std::size_t>& clique,
                std::size_t skips) {
        if (clique.size() == k_) {
            found_.push_back(clique);
            if (search(alive, skips)) return true;
            found_.pop_back();
            return false;
        }
        // Members after the first are added in increasing id order.
        const std::size_t first_extra = clique.size() > 1 ? clique.back() + 1 : 0;
        for (std::uint64_t m = cand; m; m &= m - 1) {
            const auto u = static_cast<std::size_t>(std::countr_zero(m));
            if (u < first_extra) continue;
            if (static_cast<std::size_t>(std::popcount(cand)) + clique.size() < k_) return false;
            const std::uint64_t bit = std::uint64_t{1} << u;
            clique.push_back(u);
            if (extend(alive & ~bit, cand & adj_[u] & ~bit, clique, skips)) return true;
            clique.pop_back();
            if (exhausted_) return false;
        }
        return false;
    }

    std::size_t k_, target_, budget_;
    std::vector<std::uint64_t> adj_;
    std::vector<std::vector<std::size_t>> found_;
    std::size_t nodes_ = 0;
    bool exhausted_ = false;
};

}  // namespace

std::optional<CliqueFactor> find_kfactor(const Graph& gr, std::size_t k, FactorSearchStats* stats) {
    const std::size_t l = gr.order();
    if (k < 2) throw ArgumentError("k must be at least 2");
    if (k > l) throw ArgumentError("k=" + std::to_string(k) + " exceeds reduced graph order " +
                                   std::to_string(l));
    const std::size_t target = l / k;
    FactorSearchStats local;
    FactorSearchStats& st = stats ? *stats : local;

    Greedy greedy(gr, k);
    auto packed = greedy.run(target);
    st.strategy = "greedy";
    if (packed.size() < target) {
        st.strategy = "swap-repair";
        swap_repair(gr, k, target, packed);
    }
    if (packed.size() >= target) return CliqueFactor::from_cliques(l, k, std::move(packed));

    if (l <= kExactFactorLimit) {
        st.strategy = "exhaustive";
        Exhaustive ex(gr, k, target, 20'000'000);
        const bool ok = ex.run(l);
        st.nodes = ex.nodes();
        st.exhausted_budget = ex.exhausted();
        if (ok) return CliqueFactor::from_cliques(l, k, ex.cliques());
    }
    return std::nullopt;
}

}  // namespace wellsep
