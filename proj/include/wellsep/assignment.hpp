#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wellsep/clique_factor.hpp"
#include "wellsep/graph.hpp"
#include "wellsep/regularity.hpp"
#include "wellsep/rng.hpp"
#include "wellsep/separability.hpp"

namespace wellsep {

/// Pipeline constants. Derived slacks follow the usual definitions.
struct Parameters {
    double gamma = 0.1;
    double eps = 0.02;
    double d = 0.25;
    double delta = -1.0;  // negative means the default (d - eps)^(2k-2) / 2
    std::size_t k = 2;

    double gamma1() const { return gamma - d - 2.0 * eps; }
    double gamma2() const { return static_cast<double>(k) * (gamma - 2.0 * (eps + d)); }
    double delta_value() const;
    static double default_delta(double d, double eps, std::size_t k);

    /// Throws ArgumentError unless 0 < eps < d < 1, 0 < gamma < 1, k >= 2, delta >= 0.
    void validate() const;
    /// The asymptotic relations eps << delta << d << gamma and positive slacks,
    /// reported rather than enforced.
    std::vector<std::string> regime_warnings() const;
};

/// Exceptional vertices on the left, clusters on the right; v ~ V_i iff v has at
/// least delta m neighbours in every clique partner of V_i.
struct AuxBipartite {
    std::size_t clusters = 0;
    std::vector<Vertex> left;
    std::vector<std::vector<std::size_t>> adj;
    std::size_t min_left_degree = 0;  // 0 when there are no exceptional vertices
    double threshold = 0.0;           // delta m
};

AuxBipartite build_f1(const Graph& g, const RegularPartition& part, const CliqueFactor& factor,
                      double delta);

struct Distribution {
    RegularPartition partition;  // exceptional set emptied, clusters grown
    std::size_t attempts = 0;
    std::size_t spread = 0;      // max |V_i| - min |V_i|
    double target = 0.0;         // 4 k eps m
    std::vector<std::size_t> placement;  // cluster chosen for left[i]
};

/// Places each exceptional vertex in a uniformly chosen F1 neighbour and retries
/// with fresh streams until the spread is below 4 k eps m. HostRegimeError on an
/// isolated vertex, BalanceError once the retry cap is exhausted.
Distribution distribute_v0(const RegularPartition& part, const CliqueFactor& factor,
                           const AuxBipartite& f1, double eps, Rng& rng,
                           std::size_t retry_cap = 20);

/// Cluster of each H-vertex; kNoCluster for vertices not yet mapped.
struct Assignment {
    std::vector<std::size_t> kappa;
    std::vector<std::size_t> loads(std::size_t clusters) const;
};

/// One draw of the mapping algorithm: color class c goes to clique[perm[c]].
struct Placement {
    std::size_t clique = 0;
    std::vector<std::size_t> perm;
};

/// Picks a clique and a permutation uniformly and assigns comp's color classes.
Placement map_component(const VertexSet& comp, std::span<const std::size_t> color,
                        const CliqueFactor& factor, Rng& rng, Assignment& out);

/// Maps the separator first, then every part, each with its own draw.
struct Mapping {
    Assignment assignment;
    Placement separator;
    std::vector<Placement> parts;
};

Mapping map_all(const Graph& h, const Separation& sep, std::span<const std::size_t> color,
                const CliqueFactor& factor, Rng& rng);

struct ConcentrationReport {
    std::size_t runs = 0;
    std::size_t clusters = 0;
    double expected = 0.0;      // n / l
    double lambda = 0.0;        // sqrt(2 l)
    double load_std = 0.0;      // sample std of a single cluster's load, pooled over clusters
    std::vector<double> max_deviation;  // per run, max_i |Z_i - n/l|
    std::size_t exceed = 0;     // runs with max deviation >= lambda * load_std
    double exceed_fraction = 0.0;
    double bound = 0.0;         // 1 / (2 l)
};

ConcentrationReport concentration_report(const Graph& h, const Separation& sep,
                                         std::span<const std::size_t> color,
                                         const CliqueFactor& factor, std::size_t runs, Rng& rng);

struct BoundaryLayers {
    std::vector<std::vector<Vertex>> layers;  // B'_p per color class
    std::vector<std::size_t> targets;         // W_p, kNoCluster when B'_p is empty
};

/// Backward-recursive boundary layers of one part, then fresh clusters W_p
/// from the common reduced-graph neighbourhoods. No-op when the part has no
/// neighbour in S. HostRegimeError on an empty candidate set.
BoundaryLayers reassign_boundary(const Graph& h, const Separation& sep, std::size_t part,
                                 std::span<const std::size_t> color, const Mapping& mapping,
                                 const CliqueFactor& factor, const Graph& gr, Rng& rng,
                                 Assignment& kappa);

struct ReassignmentReport {
    std::vector<Vertex> moved;            // union of all B'_p, sorted
    std::size_t max_distance = 0;         // from S, by BFS
    std::size_t locality_bound = 0;       // Delta^k |S| (saturating)
    bool within_distance = true;
    bool within_size = true;
    std::size_t nonedges = 0;             // H-edges on reduced non-edges afterwards
};

/// Processes all parts in decreasing size (ties by smallest vertex).
ReassignmentReport reassign_all(const Graph& h, const Separation& sep,
                                std::span<const std::size_t> color, const Mapping& mapping,
                                const CliqueFactor& factor, const Graph& gr, Rng& rng,
                                Assignment& kappa);

/// H-edges {x,y} with {kappa(x), kappa(y)} not an edge of gr.
std::size_t count_reduced_nonedges(const Graph& h, const Assignment& kappa, const Graph& gr);

/// arc(i, j) iff i is adjacent in gr to every clique partner of j (and i != j).
struct MoveGraph {
    std::size_t clusters = 0;
    std::vector<char> arc;
    bool has(std::size_t i, std::size_t j) const { return arc[i * clusters + j] != 0; }
    std::size_t out_degree(std::size_t i) const;
    std::size_t in_degree(std::size_t j) const;
};

MoveGraph build_f2(const Graph& gr, const CliqueFactor& factor);

struct BalanceReport {
    std::size_t transfers = 0;   // one per direct or two-step relocation
    std::size_t direct = 0;
    std::size_t two_step = 0;
    std::size_t initial_imbalance = 0;  // sum_i ||V_i| - |L_i||
    std::size_t max_gap = 0;            // max_i ||V_i| - |L_i|| before balancing
    bool within_bound = true;           // max_gap < 5 eps k m
    double move_bound = 0.0;            // 5 eps k l m
};

/// Relocates G-vertices along F2 arcs or two-arc paths (random centre) until
/// |V_i| = L_i. A relocated vertex needs at least delta m neighbours in every
/// clique partner of its new cluster that has a nonzero load; the best such
/// vertex is taken.
BalanceReport balance_loads(RegularPartition& part, const std::vector<std::size_t>& loads,
                            const MoveGraph& f2, const CliqueFactor& factor, double delta,
                            double eps, Rng& rng);

}  // namespace wellsep
