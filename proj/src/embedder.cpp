#include "wellsep/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "wellsep/errors.hpp"
#include "wellsep/matching.hpp"

namespace wellsep {

Restrictions build_restrictions(const Graph& h, const Assignment& kappa,
                                const RegularPartition& part, const CliqueFactor& factor,
                                double eps, double d) {
    Restrictions out;
    const std::size_t l = part.cluster_count();
    out.index.assign(h.order(), kNoCluster);
    out.per_cluster.assign(l, 0);
    const Graph& gp = *part.pruned_host;
    const auto& kv = kappa.kappa;

    std::vector<char> endpoint(h.order(), 0);
    for (auto [x, y] : h.edges()) {
        if (factor.clique_of.at(kv[x]) == factor.clique_of.at(kv[y])) continue;
        ++out.cross_edges;
        endpoint[x] = endpoint[y] = 1;
    }
    for (Vertex x = 0; x < h.order(); ++x) {
        if (!endpoint[x]) continue;
        RestrictionSet rs;
        rs.x = x;
        rs.cluster = kv[x];
        std::set<std::size_t> rel;
        for (auto y : h.neighbors(x)) rel.insert(kv[y]);
        rs.relevant.assign(rel.begin(), rel.end());
        std::vector<Vertex> allowed = part.clusters[rs.cluster].members();
        for (auto c : rs.relevant) {
            const VertexSet& target = part.clusters[c];
            const double need = (d - eps) * static_cast<double>(target.size());
            std::vector<Vertex> next;
            for (auto v : allowed)
                if (static_cast<double>(degree_into(gp, v, target)) >= need) next.push_back(v);
            allowed = std::move(next);
        }
        const double size = static_cast<double>(part.clusters[rs.cluster].size());
        rs.required = (1.0 - static_cast<double>(2 * factor.k - 2) * eps) * size;
        if (static_cast<double>(allowed.size()) < rs.required)
            throw InconsistencyError("restriction set of H-vertex " + std::to_string(x) + " has " +
                                     std::to_string(allowed.size()) + " vertices, below " +
                                     std::to_string(rs.required));
        rs.allowed = VertexSet(std::move(allowed));
        out.max_relevant = std::max(out.max_relevant, rs.relevant.size());
        if (size > 0) out.min_ratio = std::min(out.min_ratio, static_cast<double>(rs.allowed.size()) / size);
        ++out.per_cluster[rs.cluster];
        out.index[x] = out.sets.size();
        out.sets.push_back(std::move(rs));
    }
    out.exceeds_two_k_minus_two = out.max_relevant > 2 * factor.k - 2;
    return out;
}

namespace {

class CliqueEmbedder {
  public:
    CliqueEmbedder(const Graph& h, const Graph& g, const Assignment& kappa,
                   const std::vector<VertexSet>& clusters, const Restrictions& restrictions,
                   std::vector<Vertex>& phi, std::vector<char>& used)
        : h_(h), g_(g), kappa_(kappa.kappa), clusters_(clusters), restr_(restrictions),
          phi_(phi), used_(used), assigned_(clusters.size()) {
        for (Vertex x = 0; x < h.order(); ++x) assigned_[kappa_[x]].push_back(x);
    }

    bool compatible(Vertex x, Vertex w) const {
        if (used_[w]) return false;
        if (const auto* rs = restr_.find(x); rs && !rs->allowed.contains(w)) return false;
        for (auto y : h_.neighbors(x))
            if (phi_[y] != kNoCluster && !g_.adjacent(phi_[y], w)) return false;
        return true;
    }

    // Whether the unembedded vertices of cluster c still have a perfect
    // matching into the free vertices of c, counting only constraints from
    // embedded neighbours.
    bool cluster_matchable(std::size_t c) const {
        std::vector<Vertex> left, right;
        for (auto x : assigned_[c])
            if (phi_[x] == kNoCluster) left.push_back(x);
        if (left.empty()) return true;
        for (auto w : clusters_[c])
            if (!used_[w]) right.push_back(w);
        if (right.size() < left.size()) return false;
        BipartiteGraph bg(left.size(), right.size());
        for (std::size_t a = 0; a < left.size(); ++a)
            for (std::size_t b = 0; b < right.size(); ++b)
                if (compatible(left[a], right[b])) bg.add_edge(a, b);
        return max_matching(bg).size == left.size();
    }

    // After tentatively placing x: kappa(x) and the clusters of all of x's
    // unembedded neighbours, in any clique, must stay matchable.
    bool guard_ok(Vertex x) const {
        std::vector<std::size_t> touched{kappa_[x]};
        for (auto y : h_.neighbors(x))
            if (phi_[y] == kNoCluster && std::find(touched.begin(), touched.end(), kappa_[y]) == touched.end())
                touched.push_back(kappa_[y]);
        for (auto c : touched)
            if (!cluster_matchable(c)) return false;
        return true;
    }

    // One attempt at the clique's H-vertices; rolls back on failure.
    bool attempt(const std::vector<Vertex>& members, const std::vector<std::size_t>& cluster_ids,
                 double fraction, bool lookahead, Rng& rng, EmbedFailure& why, std::size_t& greedy,
                 std::size_t& matched) {
        std::vector<Vertex> placed;
        auto rollback = [&] {
            for (auto x : placed) {
                used_[phi_[x]] = 0;
                phi_[x] = kNoCluster;
            }
        };

        std::vector<char> buffer(h_.order(), 0);
        std::vector<std::size_t> target(clusters_.size(), 0), have(clusters_.size(), 0);
        for (auto c : cluster_ids) {
            std::size_t load = 0;
            for (auto x : members) load += kappa_[x] == c;
            target[c] = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(load)));
        }
        std::vector<Vertex> order = members;
        rng.shuffle(order);
        auto buffer_ok = [&](Vertex x) {
            for (auto y : h_.neighbors(x))
                if (buffer[y]) return false;
            return true;
        };
        for (auto x : order) {
            const auto c = kappa_[x];
            if (have[c] < target[c] && buffer_ok(x)) {
                buffer[x] = 1;
                ++have[c];
            }
        }

        // Greedy phase, most constrained first.
        std::vector<Vertex> pending;
        for (auto x : members)
            if (!buffer[x]) pending.push_back(x);
        std::vector<std::size_t> embedded_nbrs(h_.order(), 0);
        for (auto x : pending)
            for (auto y : h_.neighbors(x))
                if (phi_[y] != kNoCluster) ++embedded_nbrs[x];
        std::vector<Vertex> cand;
        while (!pending.empty()) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < pending.size(); ++i) {
                const Vertex a = pending[i], b = pending[best];
                if (embedded_nbrs[a] != embedded_nbrs[b]) {
                    if (embedded_nbrs[a] > embedded_nbrs[b]) best = i;
                } else if (h_.degree(a) != h_.degree(b)) {
                    if (h_.degree(a) > h_.degree(b)) best = i;
                } else if (a < b) {
                    best = i;
                }
            }
            const Vertex x = pending[best];
            pending[best] = pending.back();
            pending.pop_back();
            cand.clear();
            for (auto w : clusters_[kappa_[x]])
                if (compatible(x, w)) cand.push_back(w);
            if (cand.empty()) {
                // Stranded: hand it to the matching phase when that keeps the
                // buffer independent.
                if (buffer_ok(x)) {
                    buffer[x] = 1;
                    continue;
                }
                why.reason = "greedy dead end at H-vertex " + std::to_string(x);
                rollback();
                return false;
            }
            // Uniform over the candidates that keep every affected buffer
            // matchable: the first passing one in a random order.
            rng.shuffle(cand);
            Vertex w = kNoCluster;
            for (auto u : cand) {
                phi_[x] = u;
                used_[u] = 1;
                if (!lookahead || guard_ok(x)) {
                    w = u;
                    break;
                }
                used_[u] = 0;
                phi_[x] = kNoCluster;
            }
            if (w == kNoCluster) {
                if (buffer_ok(x)) {
                    buffer[x] = 1;
                    continue;
                }
                w = cand.front();
                phi_[x] = w;
                used_[w] = 1;
            }
            placed.push_back(x);
            ++greedy;
            for (auto y : h_.neighbors(x)) ++embedded_nbrs[y];
        }

        // Matching phase, cluster by cluster.
        std::vector<std::pair<Vertex, Vertex>> assigned;
        for (auto c : cluster_ids) {
            std::vector<Vertex> left, right;
            for (auto x : members)
                if (buffer[x] && kappa_[x] == c) left.push_back(x);
            for (auto w : clusters_[c])
                if (!used_[w]) right.push_back(w);
            BipartiteGraph bg(left.size(), right.size());
            for (std::size_t a = 0; a < left.size(); ++a)
                for (std::size_t b = 0; b < right.size(); ++b)
                    if (compatible(left[a], right[b])) bg.add_edge(a, b);
            const auto mt = max_matching(bg);
            if (mt.size < left.size()) {
                const auto hall = hall_violator(bg, mt);
                why.reason = "no perfect matching in cluster " + std::to_string(c);
                why.hall_set.clear();
                why.hall_neighbourhood.clear();
                for (auto a : hall.left_set) why.hall_set.push_back(left[a]);
                for (auto b : hall.neighbourhood) why.hall_neighbourhood.push_back(right[b]);
                for (auto [x, w] : assigned) {
                    used_[w] = 0;
                    phi_[x] = kNoCluster;
                }
                rollback();
                return false;
            }
            // Buffer vertices are pairwise non-adjacent, so fixing this
            // cluster's images cannot invalidate another cluster's edges.
            // With lookahead the matching is built one vertex at a time so
            // that later clusters stay matchable; the computed matching is
            // the fallback.
            std::size_t done = 0;
            if (lookahead) {
                std::vector<Vertex> cand;
                for (; done < left.size(); ++done) {
                    const Vertex x = left[done];
                    cand.clear();
                    for (auto u : right)
                        if (compatible(x, u)) cand.push_back(u);
                    rng.shuffle(cand);
                    Vertex w = kNoCluster;
                    for (auto u : cand) {
                        phi_[x] = u;
                        used_[u] = 1;
                        if (guard_ok(x)) {
                            w = u;
                            break;
                        }
                        used_[u] = 0;
                        phi_[x] = kNoCluster;
                    }
                    if (w == kNoCluster) break;
                    assigned.emplace_back(x, w);
                }
            }
            if (done < left.size()) {
                std::vector<Vertex> rest(left.begin() + static_cast<std::ptrdiff_t>(done), left.end()), free;
                for (auto w : clusters_[c])
                    if (!used_[w]) free.push_back(w);
                BipartiteGraph rb(rest.size(), free.size());
                for (std::size_t a = 0; a < rest.size(); ++a)
                    for (std::size_t b = 0; b < free.size(); ++b)
                        if (compatible(rest[a], free[b])) rb.add_edge(a, b);
                const auto rm = max_matching(rb);
                // The guard kept the remainder matchable.
                if (rm.size < rest.size()) throw InconsistencyError("buffer matching lost after guarded placement");
                for (std::size_t a = 0; a < rest.size(); ++a) {
                    phi_[rest[a]] = free[rm.left_to_right[a]];
                    used_[phi_[rest[a]]] = 1;
                    assigned.emplace_back(rest[a], phi_[rest[a]]);
                }
            }
        }
        matched += assigned.size();
        return true;
    }

  private:
    const Graph& h_;
    const Graph& g_;
    const std::vector<std::size_t>& kappa_;
    const std::vector<VertexSet>& clusters_;
    const Restrictions& restr_;
    std::vector<Vertex>& phi_;
    std::vector<char>& used_;
    std::vector<std::vector<Vertex>> assigned_;  // H-vertices per cluster
};

}  // namespace

EmbedResult embed_cliquewise(const Graph& h, const Graph& g, const Assignment& kappa,
                             const std::vector<VertexSet>& clusters, const CliqueFactor& factor,
                             const Restrictions& restrictions, Rng& rng,
                             const EmbedOptions& options) {
    const std::size_t l = clusters.size();
    if (kappa.kappa.size() != h.order()) throw ArgumentError("assignment has wrong length");
    if (factor.clique_of.size() != l) throw ArgumentError("factor does not match the clusters");
    const auto loads = kappa.loads(l);
    for (std::size_t i = 0; i < l; ++i)
        if (loads[i] != clusters[i].size())
            throw PreconditionError("cluster " + std::to_string(i) + " holds " +
                                    std::to_string(clusters[i].size()) + " vertices but " +
                                    std::to_string(loads[i]) + " H-vertices are assigned to it");
    for (auto c : kappa.kappa)
        if (c == kNoCluster || factor.clique_of[c] == kNoCluster)
            throw PreconditionError("H-vertex assigned outside the clique factor");

    EmbedResult res;
    const std::size_t q = factor.cliques.size();
    std::vector<std::size_t> pressure(q, 0);
    for (const auto& rs : restrictions.sets) ++pressure[factor.clique_of[rs.cluster]];
    res.clique_order.resize(q);
    std::iota(res.clique_order.begin(), res.clique_order.end(), 0);
    std::stable_sort(res.clique_order.begin(), res.clique_order.end(),
                     [&](std::size_t a, std::size_t b) { return pressure[a] > pressure[b]; });

    std::vector<Vertex> phi(h.order(), kNoCluster);
    std::vector<char> used(g.order(), 0);
    CliqueEmbedder worker(h, g, kappa, clusters, restrictions, phi, used);
    for (auto cq : res.clique_order) {
        std::vector<Vertex> members;
        for (Vertex x = 0; x < h.order(); ++x)
            if (factor.clique_of[kappa.kappa[x]] == cq) members.push_back(x);
        bool ok = false;
        EmbedFailure why;
        for (std::size_t a = 0; a < std::max<std::size_t>(options.retries, 1) && !ok; ++a) {
            ++res.attempts;
            ok = worker.attempt(members, factor.cliques[cq], options.buffer_fraction, options.lookahead, rng, why,
                                res.greedy_placed, res.matched);
        }
        if (!ok) {
            why.clique = cq;
            res.failure = std::move(why);
            return res;
        }
    }
    const auto chk = verify_embedding(h, g, phi);
    if (!chk.ok) throw InconsistencyError("embedder produced an invalid map: " + chk.violation);
    res.phi = std::move(phi);
    return res;
}

EmbeddingCheck verify_embedding(const Graph& h, const Graph& g, std::span<const Vertex> phi) {
    EmbeddingCheck chk;
    if (phi.size() != h.order()) {
        chk.violation = "map has " + std::to_string(phi.size()) + " entries for " +
                        std::to_string(h.order()) + " H-vertices";
        return chk;
    }
    std::vector<Vertex> owner(g.order(), kNoCluster);
    for (Vertex x = 0; x < phi.size(); ++x) {
        if (phi[x] >= g.order()) {
            chk.violation = "H-vertex " + std::to_string(x) + " maps outside V(G)";
            return chk;
        }
        if (owner[phi[x]] != kNoCluster) {
            chk.violation = "not injective: H-vertices " + std::to_string(owner[phi[x]]) + " and " +
                            std::to_string(x) + " both map to " + std::to_string(phi[x]);
            return chk;
        }
        owner[phi[x]] = x;
    }
    for (auto [x, y] : h.edges())
        if (!g.adjacent(phi[x], phi[y])) {
            chk.violation = "H-edge " + std::to_string(x) + "-" + std::to_string(y) +
                            " maps to non-edge " + std::to_string(phi[x]) + "-" +
                            std::to_string(phi[y]);
            return chk;
        }
    chk.ok = true;
    return chk;
}

namespace {

class BruteForce {
  public:
    BruteForce(const Graph& h, const Graph& g)
        : h_(h), g_(g), phi_(h.order(), kNoCluster), free_(g.order()) {
        for (Vertex w = 0; w < g.order(); ++w) free_.set(w);
    }

    bool run() { return place(0); }
    const std::vector<Vertex>& phi() const { return phi_; }

  private:
    Bitset domain(Vertex x) const {
        Bitset d = free_;
        for (auto y : h_.neighbors(x))
            if (phi_[y] != kNoCluster) d &= g_.row(phi_[y]);
        return d;
    }

    bool place(std::size_t done) {
        if (done == h_.order()) return true;
        // Smallest domain first; prefer vertices with placed neighbours.
        Vertex pick = kNoCluster;
        std::size_t best = SIZE_MAX;
        Bitset best_dom;
        for (Vertex x = 0; x < h_.order(); ++x) {
            if (phi_[x] != kNoCluster) continue;
            Bitset d = domain(x);
            std::size_t c = 0;
            d.for_each([&](std::size_t w) { c += g_.degree(w) >= h_.degree(x); });
            if (c < best || (c == best && h_.degree(x) > h_.degree(pick))) {
                best = c;
                pick = x;
                best_dom = std::move(d);
            }
            if (best == 0) return false;
        }
        bool found = false;
        std::vector<std::size_t> options = best_dom.to_vector();
        for (auto w : options) {
            if (g_.degree(w) < h_.degree(pick)) continue;
            phi_[pick] = w;
            free_.reset(w);
            bool alive = true;
            for (auto z : h_.neighbors(pick))
                if (phi_[z] == kNoCluster && !domain(z).any()) {
                    alive = false;
                    break;
                }
            if (alive && place(done + 1)) {
                found = true;
                break;
            }
            free_.set(w);
            phi_[pick] = kNoCluster;
        }
        return found;
    }

    const Graph& h_;
    const Graph& g_;
    std::vector<Vertex> phi_;
    Bitset free_;
};

}  // namespace

std::optional<std::vector<Vertex>> brute_force_embed(const Graph& h, const Graph& g) {
    if (h.order() > kBruteForceLimit)
        throw RegimeError("brute-force embedding limited to " + std::to_string(kBruteForceLimit) +
                          " H-vertices");
    if (h.order() > g.order()) return std::nullopt;
    if (h.order() == 0) return std::vector<Vertex>{};
    BruteForce bf(h, g);
    if (!bf.run()) return std::nullopt;
    return bf.phi();
}

}  // namespace wellsep
