#include "wellsep/regularity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "wellsep/errors.hpp"
#include "wellsep/rng.hpp"

namespace wellsep {

std::string to_string(PairStatus s) {
    switch (s) {
        case PairStatus::certified_regular: return "certified-regular";
        case PairStatus::refuted: return "refuted";
        case PairStatus::uncertified: return "uncertified";
    }
    return "unknown";
}

std::string to_string(EdgeRule r) {
    return r == EdgeRule::certified_only ? "certified-only" : "not-refuted";
}

namespace {

void check_pair_sets(const Graph& g, const VertexSet& a, const VertexSet& b) {
    a.validate(g);
    b.validate(g);
    if (a.empty() || b.empty()) throw ArgumentError("regularity check needs nonempty sides");
    if (!disjoint(a, b)) throw ArgumentError("regularity check needs disjoint sides");
}

double ratio(std::size_t e, std::size_t x, std::size_t y) {
    return static_cast<double>(e) / (static_cast<double>(x) * static_cast<double>(y));
}

// Dense 0/1 matrix of the pair, rows indexed by A, columns by B.
struct PairMatrix {
    std::size_t rows, cols;
    std::vector<unsigned char> cell;
    PairMatrix(const Graph& g, const VertexSet& a, const VertexSet& b)
        : rows(a.size()), cols(b.size()), cell(a.size() * b.size(), 0) {
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) cell[i * cols + j] = g.adjacent(a[i], b[j]);
    }
    bool at(std::size_t i, std::size_t j) const { return cell[i * cols + j] != 0; }
    std::size_t total() const { return static_cast<std::size_t>(std::count(cell.begin(), cell.end(), 1)); }
};

// Given a subset P of one side, the most deviating subset Q of the other side
// among those with |Q| > eps * other_size. Only prefixes of the degree order
// need to be examined.
struct SideScan {
    std::vector<std::size_t> chosen;
    double deviation = -1.0;
};

template <typename Degree>
SideScan best_other_side(std::size_t p_size, std::size_t other_size, double d, double eps,
                         Degree&& degree_of) {
    std::vector<std::size_t> deg(other_size);
    for (std::size_t q = 0; q < other_size; ++q) deg[q] = degree_of(q);
    std::vector<std::size_t> order(other_size);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return deg[x] > deg[y]; });
    SideScan best;
    std::size_t hi = 0, lo = 0;
    std::size_t best_t = 0;
    bool best_top = true;
    for (std::size_t t = 1; t <= other_size; ++t) {
        hi += deg[order[t - 1]];
        lo += deg[order[other_size - t]];
        if (!(static_cast<double>(t) > eps * static_cast<double>(other_size))) continue;
        const double up = ratio(hi, p_size, t) - d;
        const double down = d - ratio(lo, p_size, t);
        if (up > best.deviation) {
            best.deviation = up;
            best_t = t;
            best_top = true;
        }
        if (down > best.deviation) {
            best.deviation = down;
            best_t = t;
            best_top = false;
        }
    }
    for (std::size_t r = 0; r < best_t; ++r)
        best.chosen.push_back(best_top ? order[r] : order[other_size - 1 - r]);
    std::sort(best.chosen.begin(), best.chosen.end());
    return best;
}

VertexSet pick(const VertexSet& side, const std::vector<std::size_t>& idx) {
    std::vector<Vertex> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(side[i]);
    return VertexSet(std::move(out));
}

// Confirms a candidate witness by direct recomputation before it is reported.
bool replays(const Graph& g, const VertexSet& a, const VertexSet& b, const VertexSet& x,
             const VertexSet& y, double eps) {
    if (!(static_cast<double>(x.size()) > eps * static_cast<double>(a.size()))) return false;
    if (!(static_cast<double>(y.size()) > eps * static_cast<double>(b.size()))) return false;
    return std::abs(density(g, x, y) - density(g, a, b)) >= eps;
}

}  // namespace

PairCertificate check_regular_exact(const Graph& g, const VertexSet& a, const VertexSet& b,
                                    double eps) {
    check_pair_sets(g, a, b);
    if (a.size() > kExactRegularityLimit || b.size() > kExactRegularityLimit)
        throw RegimeError("exact regularity check limited to sides of size " +
                          std::to_string(kExactRegularityLimit) +
                          "; use check_regular_heuristic");
    PairMatrix mat(g, a, b);
    PairCertificate cert;
    cert.eps = eps;
    cert.density = ratio(mat.total(), a.size(), b.size());

    // Column masks: which rows of A each b is adjacent to.
    std::vector<std::uint32_t> col(b.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            if (mat.at(i, j)) col[j] |= std::uint32_t{1} << i;

    const std::uint32_t limit = std::uint32_t{1} << a.size();
    for (std::uint32_t mask = 1; mask < limit; ++mask) {
        const auto xs = static_cast<std::size_t>(std::popcount(mask));
        if (!(static_cast<double>(xs) > eps * static_cast<double>(a.size()))) continue;
        auto scan = best_other_side(xs, b.size(), cert.density, eps, [&](std::size_t j) {
            return static_cast<std::size_t>(std::popcount(col[j] & mask));
        });
        if (scan.deviation >= eps) {
            std::vector<std::size_t> xi;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (mask >> i & 1U) xi.push_back(i);
            cert.status = PairStatus::refuted;
            cert.witness_x = pick(a, xi);
            cert.witness_y = pick(b, scan.chosen);
            return cert;
        }
    }
    cert.status = PairStatus::certified_regular;
    return cert;
}

PairCertificate check_regular_heuristic(const Graph& g, const VertexSet& a, const VertexSet& b,
                                        double eps, std::size_t trials, std::uint64_t seed) {
    check_pair_sets(g, a, b);
    PairMatrix mat(g, a, b);
    PairCertificate cert;
    cert.eps = eps;
    cert.density = ratio(mat.total(), a.size(), b.size());
    cert.status = PairStatus::uncertified;
    const double d = cert.density;
    const std::size_t na = a.size(), nb = b.size();
    const std::size_t min_x =
        static_cast<std::size_t>(std::floor(eps * static_cast<double>(na))) + 1;
    if (min_x > na) return cert;

    Rng rng(seed);
    std::vector<std::size_t> all_a(na);
    std::iota(all_a.begin(), all_a.end(), 0);

    auto degrees_from_x = [&](const std::vector<std::size_t>& xs) {
        return best_other_side(xs.size(), nb, d, eps, [&](std::size_t j) {
            std::size_t c = 0;
            for (auto i : xs) c += mat.at(i, j);
            return c;
        });
    };
    auto degrees_from_y = [&](const std::vector<std::size_t>& ys) {
        return best_other_side(ys.size(), na, d, eps, [&](std::size_t i) {
            std::size_t c = 0;
            for (auto j : ys) c += mat.at(i, j);
            return c;
        });
    };

    for (std::size_t trial = 0; trial < trials; ++trial) {
        std::vector<std::size_t> xs;
        if (trial % 2 == 0 && nb > 0) {
            // Neighbourhood seed: X = N(y) or its complement within A.
            const std::size_t y = rng.below(nb);
            const bool inside = rng.bernoulli(0.5);
            for (std::size_t i = 0; i < na; ++i)
                if (mat.at(i, y) == inside) xs.push_back(i);
        }
        if (xs.size() < min_x) {
            rng.shuffle(all_a);
            const std::size_t size = min_x + rng.below(na - min_x + 1);
            xs.assign(all_a.begin(), all_a.begin() + static_cast<std::ptrdiff_t>(size));
            std::sort(xs.begin(), xs.end());
        }
        for (int round = 0; round < 4; ++round) {
            auto ys = degrees_from_x(xs);
            if (ys.chosen.empty()) break;
            if (ys.deviation >= eps) {
                auto wx = pick(a, xs), wy = pick(b, ys.chosen);
                if (replays(g, a, b, wx, wy, eps)) {
                    cert.status = PairStatus::refuted;
                    cert.witness_x = std::move(wx);
                    cert.witness_y = std::move(wy);
                    return cert;
                }
            }
            auto nx = degrees_from_y(ys.chosen);
            if (nx.chosen.empty()) break;
            if (nx.deviation >= eps) {
                auto wx = pick(a, nx.chosen), wy = pick(b, ys.chosen);
                if (replays(g, a, b, wx, wy, eps)) {
                    cert.status = PairStatus::refuted;
                    cert.witness_x = std::move(wx);
                    cert.witness_y = std::move(wy);
                    return cert;
                }
            }
            xs = std::move(nx.chosen);
        }
    }
    return cert;
}

std::size_t low_degree_count(const Graph& g, const VertexSet& a, const VertexSet& b,
                             const VertexSet& y, double d, double eps) {
    a.validate(g);
    y.validate(g);
    for (auto v : y)
        if (!b.contains(v)) throw ArgumentError("Y must be a subset of B");
    if (!(static_cast<double>(y.size()) > eps * static_cast<double>(b.size())))
        throw PreconditionError("|Y| must exceed eps|B|");
    const double cut = (d - eps) * static_cast<double>(y.size());
    std::size_t count = 0;
    for (auto x : a)
        if (static_cast<double>(degree_into(g, x, y)) <= cut) ++count;
    return count;
}

SuperRegularity measure_super_regularity(const Graph& g, const VertexSet& a, const VertexSet& b,
                                         double eps, double delta) {
    SuperRegularity s;
    s.eps = eps;
    s.delta = delta;
    s.min_degree_a = b.size();
    s.min_degree_b = a.size();
    for (auto x : a) s.min_degree_a = std::min(s.min_degree_a, degree_into(g, x, b));
    for (auto y : b) s.min_degree_b = std::min(s.min_degree_b, degree_into(g, y, a));
    s.holds = !a.empty() && !b.empty() &&
              static_cast<double>(s.min_degree_a) > delta * static_cast<double>(b.size()) &&
              static_cast<double>(s.min_degree_b) > delta * static_cast<double>(a.size());
    return s;
}

std::vector<std::size_t> RegularPartition::owners() const {
    std::vector<std::size_t> own(host ? host->order() : 0, kNoCluster);
    for (std::size_t i = 0; i < clusters.size(); ++i)
        for (auto v : clusters[i]) own[v] = i;
    return own;
}

namespace {

std::size_t pair_index(std::size_t l, std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return i * l - i * (i + 1) / 2 + (j - i - 1);
}

void check_partition(const Graph& g, const VertexSet& v0, const std::vector<VertexSet>& clusters) {
    v0.validate(g);
    if (clusters.empty()) throw ArgumentError("partition has no clusters");
    std::vector<char> seen(g.order(), 0);
    for (auto v : v0) seen[v] = 1;
    const std::size_t m = clusters.front().size();
    if (m == 0) throw ArgumentError("clusters must be nonempty");
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        clusters[i].validate(g);
        if (clusters[i].size() != m)
            throw ArgumentError("cluster " + std::to_string(i) + " has size " +
                                std::to_string(clusters[i].size()) + ", expected " +
                                std::to_string(m));
        for (auto v : clusters[i]) {
            if (seen[v]) throw ArgumentError("vertex " + std::to_string(v) + " in two parts");
            seen[v] = 1;
        }
    }
    for (std::size_t v = 0; v < g.order(); ++v)
        if (!seen[v]) throw ArgumentError("vertex " + std::to_string(v) + " not covered");
}

}  // namespace

const PairCertificate& RegularPartition::pair(std::size_t i, std::size_t j) const {
    if (i == j || i >= clusters.size() || j >= clusters.size())
        throw ArgumentError("no pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    return pairs[pair_index(clusters.size(), i, j)];
}

RegularPartition degree_form_prune(std::shared_ptr<const Graph> g, const VertexSet& exceptional,
                                   const std::vector<VertexSet>& clusters, double d, double eps,
                                   const PruneOptions& options) {
    if (!g) throw ArgumentError("null host graph");
    check_partition(*g, exceptional, clusters);
    if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("eps must lie in (0,1)");
    if (!(d >= 0.0 && d <= 1.0)) throw ArgumentError("d must lie in [0,1]");
    const double refute_eps = options.refute_eps > 0.0 ? options.refute_eps : eps;

    RegularPartition part;
    part.host = g;
    part.exceptional = exceptional;
    part.clusters = clusters;
    part.eps = eps;
    part.d = d;
    part.eps_effective = eps;
    part.cluster_size = clusters.front().size();

    const std::size_t l = clusters.size();
    const bool exact = part.cluster_size <= kExactRegularityLimit;
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = i + 1; j < l; ++j) {
            PairCertificate cert;
            const double dens = density(*g, clusters[i], clusters[j]);
            if (dens < d) {
                cert.density = dens;
                cert.eps = refute_eps;
                cert.status = PairStatus::uncertified;
                cert.emptied = true;
            } else {
                cert = exact ? check_regular_exact(*g, clusters[i], clusters[j], refute_eps)
                             : check_regular_heuristic(*g, clusters[i], clusters[j], refute_eps,
                                                       options.heuristic_trials,
                                                       Rng::mix(options.seed ^ (i * l + j)));
                cert.emptied = cert.status == PairStatus::refuted;
            }
            cert.i = i;
            cert.j = j;
            part.pairs.push_back(std::move(cert));
        }
    }

    const auto own = part.owners();
    auto pruned = std::make_shared<Graph>(g->filter_edges([&](Vertex u, Vertex v) {
        const std::size_t a = own[u], b = own[v];
        if (a == kNoCluster || b == kNoCluster) return true;
        if (a == b) return false;
        return !part.pairs[pair_index(l, a, b)].emptied;
    }));

    const double allowance = (d + eps) * static_cast<double>(g->order());
    for (Vertex v = 0; v < g->order(); ++v) {
        const double kept = static_cast<double>(pruned->degree(v));
        if (!(kept > static_cast<double>(g->degree(v)) - allowance))
            throw StructuralError("vertex " + std::to_string(v) + " keeps " +
                                  std::to_string(pruned->degree(v)) + " of " +
                                  std::to_string(g->degree(v)) +
                                  " edges; the partition is not degree-form compatible");
    }
    part.pruned_host = std::move(pruned);
    return part;
}

ReducedGraph reduced_graph(const RegularPartition& part, double d, EdgeRule rule) {
    ReducedGraph out;
    out.rule = rule;
    out.d = d;
    const std::size_t l = part.cluster_count();
    std::vector<Edge> edges;
    for (const auto& cert : part.pairs) {
        if (cert.emptied) continue;
        if (cert.status == PairStatus::refuted) continue;
        if (rule == EdgeRule::certified_only && cert.status != PairStatus::certified_regular)
            continue;
        if (density(*part.pruned_host, part.clusters[cert.i], part.clusters[cert.j]) < d) continue;
        edges.emplace_back(cert.i, cert.j);
    }
    out.graph = Graph(l, edges);

    const Graph& host = *part.host;
    out.c = static_cast<double>(min_degree(host)) / static_cast<double>(host.order());
    out.theta = 2.0 * part.eps + d;
    out.required_min_degree = (out.c - out.theta) * static_cast<double>(l);
    out.min_degree = l > 0 ? wellsep::min_degree(out.graph) : 0;
    out.bound_holds = static_cast<double>(out.min_degree) >= out.required_min_degree - 1e-9;
    if (!out.bound_holds)
        out.warning = "reduced graph minimum degree " + std::to_string(out.min_degree) +
                      " is below (c - theta) l = " + std::to_string(out.required_min_degree);
    return out;
}

SuperRegularization super_regularize(const RegularPartition& part, const CliqueFactor& factor,
                                     double delta) {
    const std::size_t l = part.cluster_count();
    if (factor.clique_of.size() != l || !factor.leftover.empty())
        throw PreconditionError("factor must cover every cluster");
    SuperRegularization out;
    out.partition = part;
    out.discarded.assign(l, 0);
    const Graph& gp = *part.pruned_host;
    const std::size_t m0 = part.cluster_size;

    std::vector<std::vector<Vertex>> cur(l);
    for (std::size_t i = 0; i < l; ++i) cur[i] = part.clusters[i].members();
    std::vector<Vertex> moved;

    if (delta > 0.0) {
        for (std::size_t round = 0;; ++round) {
            std::vector<VertexSet> sets;
            for (auto& c : cur) sets.emplace_back(c);
            bool any_low = false;
            std::vector<std::vector<Vertex>> low(l);
            std::vector<std::vector<std::pair<double, Vertex>>> slack(l);
            for (std::size_t i = 0; i < l; ++i) {
                const auto partners = factor.partners(i);
                for (auto x : cur[i]) {
                    double worst = 1e300;
                    bool is_low = false;
                    for (auto j : partners) {
                        const double have = static_cast<double>(degree_into(gp, x, sets[j]));
                        const double need = delta * static_cast<double>(sets[j].size());
                        worst = std::min(worst, have - need);
                        if (have <= need) is_low = true;
                    }
                    if (is_low) low[i].push_back(x);
                    slack[i].emplace_back(worst, x);
                }
                for (auto j : partners) {
                    std::size_t cnt = 0;
                    for (auto x : cur[i])
                        if (static_cast<double>(degree_into(gp, x, sets[j])) <=
                            delta * static_cast<double>(sets[j].size()))
                            ++cnt;
                    if (round == 0) {
                        out.max_low_degree = std::max(out.max_low_degree, cnt);
                        const auto& cert = part.pair(i, j);
                        const double dens = density(gp, sets[i], sets[j]);
                        if (cert.status == PairStatus::certified_regular &&
                            delta <= dens - cert.eps &&
                            static_cast<double>(cnt) > cert.eps * static_cast<double>(m0))
                            throw InconsistencyError(
                                "cluster " + std::to_string(i) + " has " + std::to_string(cnt) +
                                " low-degree vertices against certified partner " +
                                std::to_string(j));
                    }
                }
                if (!low[i].empty()) any_low = true;
            }
            out.rounds = round + (any_low ? 1 : 0);
            if (!any_low) break;
            std::size_t r = 0;
            for (auto& lo : low) r = std::max(r, lo.size());
            for (std::size_t i = 0; i < l; ++i) {
                // Pad with the vertices closest to the threshold.
                std::sort(slack[i].begin(), slack[i].end());
                std::vector<Vertex> drop = low[i];
                for (const auto& [s, x] : slack[i]) {
                    if (drop.size() >= r) break;
                    if (std::find(drop.begin(), drop.end(), x) == drop.end()) drop.push_back(x);
                }
                std::sort(drop.begin(), drop.end());
                std::vector<Vertex> keep;
                std::set_difference(cur[i].begin(), cur[i].end(), drop.begin(), drop.end(),
                                    std::back_inserter(keep));
                cur[i] = std::move(keep);
                moved.insert(moved.end(), drop.begin(), drop.end());
                out.discarded[i] += drop.size();
            }
            if (cur.front().size() * 2 < m0)
                throw InconsistencyError("super-regularisation discarded more than half of every cluster");
        }
    }

    RegularPartition& np = out.partition;
    np.clusters.clear();
    for (auto& c : cur) np.clusters.emplace_back(c);
    np.exceptional = set_union(part.exceptional, VertexSet(moved));
    np.cluster_size = np.clusters.front().size();
    const std::size_t k = factor.k;
    const double inflation = 1.0 - static_cast<double>(k - 1) * part.eps;
    np.eps_effective = inflation > 0.5 ? std::min(2.0 * part.eps, part.eps / inflation)
                                       : 2.0 * part.eps;
    for (auto& cert : np.pairs) {
        cert.density = density(*np.host, np.clusters[cert.i], np.clusters[cert.j]);
        if (factor.clique_of[cert.i] == factor.clique_of[cert.j])
            cert.super = measure_super_regularity(gp, np.clusters[cert.i], np.clusters[cert.j],
                                                  np.eps_effective, delta);
        else
            cert.super.reset();
    }
    return out;
}

FactorRestriction restrict_to_factor(const RegularPartition& part, const Graph& reduced,
                                     const CliqueFactor& factor) {
    const std::size_t l = part.cluster_count();
    if (reduced.order() != l || factor.clique_of.size() != l)
        throw ArgumentError("reduced graph and factor must match the partition");
    FactorRestriction out;
    std::vector<std::size_t> new_index(l, kNoCluster);
    for (std::size_t i = 0; i < l; ++i)
        if (factor.clique_of[i] != kNoCluster) {
            new_index[i] = out.old_index.size();
            out.old_index.push_back(i);
        }

    RegularPartition& np = out.partition;
    np = part;
    np.clusters.clear();
    np.pairs.clear();
    std::vector<Vertex> dropped;
    for (auto i : factor.leftover)
        dropped.insert(dropped.end(), part.clusters[i].begin(), part.clusters[i].end());
    np.exceptional = set_union(part.exceptional, VertexSet(dropped));
    for (auto i : out.old_index) np.clusters.push_back(part.clusters[i]);
    for (std::size_t a = 0; a < out.old_index.size(); ++a)
        for (std::size_t b = a + 1; b < out.old_index.size(); ++b) {
            PairCertificate c = part.pair(out.old_index[a], out.old_index[b]);
            c.i = a;
            c.j = b;
            np.pairs.push_back(std::move(c));
        }
    out.reduced = reduced.induced(VertexSet(out.old_index));

    std::vector<std::vector<std::size_t>> cliques;
    for (const auto& q : factor.cliques) {
        std::vector<std::size_t> nq;
        for (auto v : q) nq.push_back(new_index[v]);
        cliques.push_back(std::move(nq));
    }
    out.factor = CliqueFactor::from_cliques(out.old_index.size(), factor.k, std::move(cliques));
    return out;
}

void refresh_pruned_host(RegularPartition& part) {
    const std::size_t l = part.cluster_count();
    if (part.pairs.size() != l * (l - 1) / 2) throw ArgumentError("pair table does not match the clusters");
    const auto own = part.owners();
    part.pruned_host = std::make_shared<Graph>(part.host->filter_edges([&](Vertex u, Vertex v) {
        const std::size_t a = own[u], b = own[v];
        if (a == kNoCluster || b == kNoCluster) return true;
        if (a == b) return false;
        return !part.pairs[pair_index(l, std::min(a, b), std::max(a, b))].emptied;
    }));
}

}  // namespace wellsep
