#include "wellsep/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wellsep/errors.hpp"

namespace wellsep {

double Parameters::default_delta(double d, double eps, std::size_t k) {
    return std::pow(d - eps, static_cast<double>(2 * k - 2)) / 2.0;
}

double Parameters::delta_value() const { return delta < 0.0 ? default_delta(d, eps, k) : delta; }

void Parameters::validate() const {
    if (k < 2) throw ArgumentError("k must be at least 2");
    if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("eps must lie in (0,1)");
    if (!(d > eps && d < 1.0)) throw ArgumentError("d must lie in (eps,1)");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("gamma must lie in (0,1)");
    if (!(delta_value() >= 0.0)) throw ArgumentError("delta must be non-negative");
}

std::vector<std::string> Parameters::regime_warnings() const {
    std::vector<std::string> out;
    const double dl = delta_value();
    auto num = [](double x) {
        std::ostringstream s;
        s << x;
        return s.str();
    };
    if (!(eps < dl)) out.push_back("eps=" + num(eps) + " is not below delta=" + num(dl));
    if (!(dl < d)) out.push_back("delta=" + num(dl) + " is not below d=" + num(d));
    if (!(d < gamma)) out.push_back("d=" + num(d) + " is not below gamma=" + num(gamma));
    if (!(gamma1() > 0.0)) out.push_back("gamma' = gamma - d - 2 eps = " + num(gamma1()) + " <= 0");
    if (!(gamma2() > 0.0))
        out.push_back("gamma'' = k(gamma - 2(eps + d)) = " + num(gamma2()) + " <= 0");
    return out;
}

namespace {

// deg into each cluster for every vertex of g, via an owner map.
std::vector<std::size_t> cluster_degrees(const Graph& g, Vertex v,
                                         const std::vector<std::size_t>& owner, std::size_t l) {
    std::vector<std::size_t> deg(l, 0);
    for (auto w : g.neighbors(v))
        if (owner[w] != kNoCluster) ++deg[owner[w]];
    return deg;
}

std::vector<std::size_t> owner_map(std::size_t n, const std::vector<VertexSet>& clusters) {
    std::vector<std::size_t> own(n, kNoCluster);
    for (std::size_t i = 0; i < clusters.size(); ++i)
        for (auto v : clusters[i]) own[v] = i;
    return own;
}

}  // namespace

AuxBipartite build_f1(const Graph& g, const RegularPartition& part, const CliqueFactor& factor,
                      double delta) {
    const std::size_t l = part.cluster_count();
    if (factor.clique_of.size() != l) throw ArgumentError("factor does not match the partition");
    AuxBipartite f;
    f.clusters = l;
    f.threshold = delta * static_cast<double>(part.cluster_size);
    f.left = part.exceptional.members();
    f.adj.resize(f.left.size());
    const auto own = owner_map(g.order(), part.clusters);
    for (std::size_t a = 0; a < f.left.size(); ++a) {
        const auto deg = cluster_degrees(g, f.left[a], own, l);
        for (std::size_t i = 0; i < l; ++i) {
            if (factor.clique_of[i] == kNoCluster) continue;
            bool ok = true;
            for (auto j : factor.partners(i))
                if (static_cast<double>(deg[j]) < f.threshold) {
                    ok = false;
                    break;
                }
            if (ok) f.adj[a].push_back(i);
        }
    }
    if (!f.left.empty()) {
        f.min_left_degree = f.adj.front().size();
        for (const auto& row : f.adj) f.min_left_degree = std::min(f.min_left_degree, row.size());
    }
    return f;
}

Distribution distribute_v0(const RegularPartition& part, const CliqueFactor& factor,
                           const AuxBipartite& f1, double eps, Rng& rng, std::size_t retry_cap) {
    const std::size_t l = part.cluster_count();
    Distribution out;
    out.target = 4.0 * static_cast<double>(factor.k) * eps * static_cast<double>(part.cluster_size);
    for (std::size_t a = 0; a < f1.left.size(); ++a)
        if (f1.adj[a].empty())
            throw HostRegimeError("exceptional vertex " + std::to_string(f1.left[a]) +
                                  " has no neighbour in F1");
    std::vector<std::size_t> base(l);
    for (std::size_t i = 0; i < l; ++i) base[i] = part.clusters[i].size();

    for (std::size_t attempt = 1; attempt <= std::max<std::size_t>(retry_cap, 1); ++attempt) {
        Rng stream = rng.split();
        std::vector<std::size_t> sizes = base;
        std::vector<std::size_t> placement(f1.left.size());
        for (std::size_t a = 0; a < f1.left.size(); ++a) {
            const auto& row = f1.adj[a];
            placement[a] = row[stream.below(row.size())];
            ++sizes[placement[a]];
        }
        const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
        const std::size_t spread = l ? *hi - *lo : 0;
        if (static_cast<double>(spread) < out.target || f1.left.empty()) {
            out.attempts = attempt;
            out.spread = spread;
            out.placement = placement;
            out.partition = part;
            std::vector<std::vector<Vertex>> grown(l);
            for (std::size_t i = 0; i < l; ++i) grown[i] = part.clusters[i].members();
            for (std::size_t a = 0; a < f1.left.size(); ++a)
                grown[placement[a]].push_back(f1.left[a]);
            for (std::size_t i = 0; i < l; ++i) out.partition.clusters[i] = VertexSet(grown[i]);
            out.partition.exceptional = VertexSet();
            return out;
        }
        out.spread = spread;
    }
    throw BalanceError("cluster size spread " + std::to_string(out.spread) +
                       " still reaches 4 k eps m = " + std::to_string(out.target) + " after " +
                       std::to_string(retry_cap) + " attempts");
}

std::vector<std::size_t> Assignment::loads(std::size_t clusters) const {
    std::vector<std::size_t> out(clusters, 0);
    for (auto c : kappa)
        if (c != kNoCluster) ++out.at(c);
    return out;
}

Placement map_component(const VertexSet& comp, std::span<const std::size_t> color,
                        const CliqueFactor& factor, Rng& rng, Assignment& out) {
    if (factor.cliques.empty()) throw PreconditionError("clique factor is empty");
    Placement p;
    p.clique = rng.below(factor.cliques.size());
    p.perm.resize(factor.k);
    std::iota(p.perm.begin(), p.perm.end(), 0);
    rng.shuffle(p.perm);
    const auto& q = factor.cliques[p.clique];
    for (auto v : comp) {
        if (color[v] >= factor.k)
            throw ArgumentError("vertex " + std::to_string(v) + " has color " +
                                std::to_string(color[v]) + " >= k");
        out.kappa.at(v) = q[p.perm[color[v]]];
    }
    return p;
}

Mapping map_all(const Graph& h, const Separation& sep, std::span<const std::size_t> color,
                const CliqueFactor& factor, Rng& rng) {
    if (color.size() != h.order()) throw ArgumentError("coloring has wrong length");
    Mapping m;
    m.assignment.kappa.assign(h.order(), kNoCluster);
    m.separator.clique = kNoCluster;
    if (!sep.separator.empty())
        m.separator = map_component(sep.separator, color, factor, rng, m.assignment);
    for (const auto& c : sep.components)
        m.parts.push_back(map_component(c, color, factor, rng, m.assignment));
    return m;
}

ConcentrationReport concentration_report(const Graph& h, const Separation& sep,
                                         std::span<const std::size_t> color,
                                         const CliqueFactor& factor, std::size_t runs, Rng& rng) {
    ConcentrationReport r;
    r.runs = runs;
    const std::size_t l = factor.clique_of.size();
    r.clusters = l;
    if (runs == 0 || l == 0) return r;
    r.expected = static_cast<double>(h.order()) / static_cast<double>(l);
    r.lambda = std::sqrt(2.0 * static_cast<double>(l));
    r.bound = 1.0 / (2.0 * static_cast<double>(l));
    std::vector<double> sum(l, 0.0), sum_sq(l, 0.0);
    for (std::size_t run = 0; run < runs; ++run) {
        const auto mapping = map_all(h, sep, color, factor, rng);
        const auto loads = mapping.assignment.loads(l);
        double worst = 0.0;
        for (std::size_t i = 0; i < l; ++i) {
            const double z = static_cast<double>(loads[i]);
            sum[i] += z;
            sum_sq[i] += z * z;
            worst = std::max(worst, std::abs(z - r.expected));
        }
        r.max_deviation.push_back(worst);
    }
    if (runs >= 2) {
        double var = 0.0;
        const double rn = static_cast<double>(runs);
        for (std::size_t i = 0; i < l; ++i) {
            const double mean = sum[i] / rn;
            var += std::max(0.0, (sum_sq[i] - rn * mean * mean) / (rn - 1.0));
        }
        r.load_std = std::sqrt(var / static_cast<double>(l));
    }
    const double cut = r.lambda * r.load_std;
    for (auto dev : r.max_deviation)
        if (dev >= cut) ++r.exceed;
    r.exceed_fraction = static_cast<double>(r.exceed) / static_cast<double>(runs);
    return r;
}

BoundaryLayers reassign_boundary(const Graph& h, const Separation& sep, std::size_t part,
                                 std::span<const std::size_t> color, const Mapping& mapping,
                                 const CliqueFactor& factor, const Graph& gr, Rng& rng,
                                 Assignment& kappa) {
    const std::size_t k = factor.k;
    BoundaryLayers out;
    out.layers.assign(k, {});
    out.targets.assign(k, kNoCluster);
    if (sep.separator.empty()) return out;
    const VertexSet& comp = sep.components.at(part);

    std::vector<char> in_comp(h.order(), 0), in_sep(h.order(), 0);
    for (auto v : comp) in_comp[v] = 1;
    for (auto v : sep.separator) in_sep[v] = 1;

    std::vector<std::vector<char>> layer(k, std::vector<char>(h.order(), 0));
    bool any = false;
    for (auto v : comp)
        for (auto w : h.neighbors(v))
            if (in_sep[w]) {
                layer[color[v]][v] = 1;
                any = true;
                break;
            }
    if (!any) return out;

    // Backwards over classes: class t absorbs the neighbours of every later layer.
    for (std::size_t t = k - 1; t-- > 0;) {
        for (std::size_t q = t + 1; q < k; ++q)
            for (auto v : comp) {
                if (!layer[q][v]) continue;
                for (auto w : h.neighbors(v))
                    if (in_comp[w] && color[w] == t) layer[t][w] = 1;
            }
    }
    for (std::size_t p = 0; p < k; ++p)
        for (auto v : comp)
            if (layer[p][v]) out.layers[p].push_back(v);

    const auto& own = mapping.parts.at(part);
    const auto& home_clique = factor.cliques.at(own.clique);
    std::vector<std::size_t> home(k), sep_cluster(k, kNoCluster);
    std::vector<char> class_present(k, 0), sep_present(k, 0);
    for (std::size_t p = 0; p < k; ++p) home[p] = home_clique[own.perm[p]];
    for (auto v : comp) class_present[color[v]] = 1;
    for (auto v : sep.separator) sep_present[color[v]] = 1;
    for (std::size_t p = 0; p < k; ++p)
        if (sep_present[p]) sep_cluster[p] = factor.cliques.at(mapping.separator.clique)[mapping.separator.perm[p]];

    const std::size_t l = gr.order();
    for (std::size_t i = 0; i < k; ++i) {
        if (out.layers[i].empty()) continue;
        std::vector<std::size_t> candidates;
        for (std::size_t w = 0; w < l; ++w) {
            bool ok = true;
            for (std::size_t p = 0; p < k && ok; ++p) {
                if (p != i && sep_present[p] && !gr.adjacent(w, sep_cluster[p])) ok = false;
                if (p > i && class_present[p] && !gr.adjacent(w, home[p])) ok = false;
                if (p < i && out.targets[p] != kNoCluster && !gr.adjacent(w, out.targets[p]))
                    ok = false;
            }
            if (ok) candidates.push_back(w);
        }
        if (candidates.empty()) {
            std::ostringstream msg;
            msg << "no cluster adjacent to all of {";
            bool first = true;
            auto add = [&](std::size_t c) {
                msg << (first ? "" : ",") << c;
                first = false;
            };
            for (std::size_t p = 0; p < k; ++p) {
                if (p != i && sep_present[p]) add(sep_cluster[p]);
                if (p > i && class_present[p]) add(home[p]);
                if (p < i && out.targets[p] != kNoCluster) add(out.targets[p]);
            }
            msg << "} for boundary class " << i << " of part " << part;
            throw HostRegimeError(msg.str());
        }
        out.targets[i] = candidates[rng.below(candidates.size())];
        for (auto v : out.layers[i]) kappa.kappa[v] = out.targets[i];
    }
    return out;
}

std::size_t count_reduced_nonedges(const Graph& h, const Assignment& kappa, const Graph& gr) {
    std::size_t bad = 0;
    for (auto [x, y] : h.edges()) {
        const auto a = kappa.kappa[x], b = kappa.kappa[y];
        if (a == kNoCluster || b == kNoCluster || a == b || !gr.adjacent(a, b)) ++bad;
    }
    return bad;
}

ReassignmentReport reassign_all(const Graph& h, const Separation& sep,
                                std::span<const std::size_t> color, const Mapping& mapping,
                                const CliqueFactor& factor, const Graph& gr, Rng& rng,
                                Assignment& kappa) {
    ReassignmentReport rep;
    std::vector<std::size_t> order(sep.components.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ca = sep.components[a];
        const auto& cb = sep.components[b];
        if (ca.size() != cb.size()) return ca.size() > cb.size();
        return !ca.empty() && !cb.empty() && ca[0] < cb[0];
    });
    for (auto p : order) {
        auto layers = reassign_boundary(h, sep, p, color, mapping, factor, gr, rng, kappa);
        for (const auto& lay : layers.layers) rep.moved.insert(rep.moved.end(), lay.begin(), lay.end());
    }
    std::sort(rep.moved.begin(), rep.moved.end());
    rep.moved.erase(std::unique(rep.moved.begin(), rep.moved.end()), rep.moved.end());

    if (!sep.separator.empty()) {
        const auto dist = bfs_distances(h, sep.separator);
        for (auto v : rep.moved) rep.max_distance = std::max(rep.max_distance, dist[v]);
    }
    rep.within_distance = rep.max_distance <= factor.k;
    const std::size_t delta_h = h.order() ? max_degree(h) : 0;
    std::size_t bound = sep.separator.size();
    for (std::size_t i = 0; i < factor.k; ++i) {
        if (delta_h != 0 && bound > std::numeric_limits<std::size_t>::max() / delta_h) {
            bound = std::numeric_limits<std::size_t>::max();
            break;
        }
        bound *= delta_h;
    }
    rep.locality_bound = bound;
    rep.within_size = rep.moved.size() <= bound;
    rep.nonedges = count_reduced_nonedges(h, kappa, gr);
    return rep;
}

std::size_t MoveGraph::out_degree(std::size_t i) const {
    std::size_t c = 0;
    for (std::size_t j = 0; j < clusters; ++j) c += has(i, j);
    return c;
}

std::size_t MoveGraph::in_degree(std::size_t j) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < clusters; ++i) c += has(i, j);
    return c;
}

MoveGraph build_f2(const Graph& gr, const CliqueFactor& factor) {
    const std::size_t l = gr.order();
    if (factor.clique_of.size() != l) throw ArgumentError("factor does not match reduced graph");
    MoveGraph f;
    f.clusters = l;
    f.arc.assign(l * l, 0);
    for (std::size_t j = 0; j < l; ++j) {
        if (factor.clique_of[j] == kNoCluster) continue;
        const auto partners = factor.partners(j);
        for (std::size_t i = 0; i < l; ++i) {
            if (i == j) continue;
            bool ok = true;
            for (auto p : partners)
                if (p == i || !gr.adjacent(i, p)) {
                    ok = false;
                    break;
                }
            f.arc[i * l + j] = ok;
        }
    }
    return f;
}

namespace {

class Balancer {
  public:
    Balancer(RegularPartition& part, const CliqueFactor& factor, double threshold,
             const std::vector<std::size_t>& loads)
        : g_(*part.host), factor_(factor), threshold_(threshold), loads_(loads),
          owner_(owner_map(g_.order(), part.clusters)), members_(part.cluster_count()) {
        for (std::size_t i = 0; i < part.cluster_count(); ++i)
            members_[i] = part.clusters[i].members();
    }

    std::size_t size(std::size_t i) const { return members_[i].size(); }

    // Best vertex of src for joining dst: maximises the smallest degree into
    // dst's clique partners; kNoCluster if none reaches the threshold.
    // Partners that will host no H-vertex impose nothing.
    Vertex best_mover(std::size_t src, std::size_t dst) const {
        const auto partners = factor_.partners(dst);
        Vertex best = kNoCluster;
        std::size_t best_score = 0;
        std::vector<std::size_t> cnt(factor_.clique_of.size(), 0);
        for (auto v : members_[src]) {
            for (auto p : partners) cnt[p] = 0;
            for (auto w : g_.neighbors(v))
                if (owner_[w] != kNoCluster) ++cnt[owner_[w]];
            std::size_t score = std::numeric_limits<std::size_t>::max();
            for (auto p : partners)
                if (loads_[p] != 0) score = std::min(score, cnt[p]);
            if (static_cast<double>(score) < threshold_) continue;
            if (best == kNoCluster || score > best_score) {
                best = v;
                best_score = score;
            }
        }
        return best;
    }

    void move(Vertex v, std::size_t src, std::size_t dst) {
        auto& from = members_[src];
        from.erase(std::find(from.begin(), from.end(), v));
        members_[dst].push_back(v);
        owner_[v] = dst;
    }

    void store(RegularPartition& part) const {
        for (std::size_t i = 0; i < members_.size(); ++i) part.clusters[i] = VertexSet(members_[i]);
    }

  private:
    const Graph& g_;
    const CliqueFactor& factor_;
    double threshold_;
    const std::vector<std::size_t>& loads_;
    std::vector<std::size_t> owner_;
    std::vector<std::vector<Vertex>> members_;
};

}  // namespace

BalanceReport balance_loads(RegularPartition& part, const std::vector<std::size_t>& loads,
                            const MoveGraph& f2, const CliqueFactor& factor, double delta,
                            double eps, Rng& rng) {
    const std::size_t l = part.cluster_count();
    if (loads.size() != l || f2.clusters != l)
        throw ArgumentError("loads and F2 must match the partition");
    std::size_t total_v = 0, total_l = 0;
    for (std::size_t i = 0; i < l; ++i) {
        total_v += part.clusters[i].size();
        total_l += loads[i];
    }
    if (total_v != total_l)
        throw PreconditionError("cluster sizes sum to " + std::to_string(total_v) +
                                " but loads sum to " + std::to_string(total_l));
    const double m = static_cast<double>(part.cluster_size);
    BalanceReport rep;
    rep.move_bound = 5.0 * eps * static_cast<double>(factor.k) * static_cast<double>(l) * m;
    for (std::size_t i = 0; i < l; ++i) {
        const std::size_t gap = part.clusters[i].size() > loads[i] ? part.clusters[i].size() - loads[i]
                                                                   : loads[i] - part.clusters[i].size();
        rep.initial_imbalance += gap;
        rep.max_gap = std::max(rep.max_gap, gap);
    }
    rep.within_bound = static_cast<double>(rep.max_gap) < 5.0 * eps * static_cast<double>(factor.k) * m;

    Balancer bal(part, factor, delta * m, loads);
    for (;;) {
        std::size_t src = kNoCluster, dst = kNoCluster;
        std::size_t surplus = 0, deficit = 0;
        for (std::size_t i = 0; i < l; ++i) {
            const std::size_t s = bal.size(i);
            if (s > loads[i] && s - loads[i] > surplus) {
                surplus = s - loads[i];
                src = i;
            }
            if (s < loads[i] && loads[i] - s > deficit) {
                deficit = loads[i] - s;
                dst = i;
            }
        }
        if (src == kNoCluster) break;

        if (f2.has(src, dst)) {
            const Vertex v = bal.best_mover(src, dst);
            if (v != kNoCluster) {
                bal.move(v, src, dst);
                ++rep.direct;
                ++rep.transfers;
                continue;
            }
        }
        std::vector<std::size_t> centres;
        for (std::size_t p = 0; p < l; ++p)
            if (p != src && p != dst && f2.has(src, p) && f2.has(p, dst)) centres.push_back(p);
        if (centres.empty() && !f2.has(src, dst))
            throw HostRegimeError("no F2 path of length at most two from cluster " +
                                  std::to_string(src) + " to cluster " + std::to_string(dst));
        rng.shuffle(centres);
        bool done = false;
        for (auto p : centres) {
            const Vertex v = bal.best_mover(src, p);
            if (v == kNoCluster) continue;
            bal.move(v, src, p);
            const Vertex w = bal.best_mover(p, dst);
            if (w == kNoCluster) {
                bal.move(v, p, src);
                continue;
            }
            bal.move(w, p, dst);
            ++rep.two_step;
            ++rep.transfers;
            done = true;
            break;
        }
        if (!done)
            throw InconsistencyError("no vertex of cluster " + std::to_string(src) +
                                     " has delta m neighbours in every partner needed to reach cluster " +
                                     std::to_string(dst));
    }
    bal.store(part);
    return rep;
}

}  // namespace wellsep
