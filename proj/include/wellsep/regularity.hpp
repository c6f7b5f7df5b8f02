#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wellsep/clique_factor.hpp"
#include "wellsep/graph.hpp"

namespace wellsep {

inline constexpr std::size_t kExactRegularityLimit = 14;

enum class PairStatus { certified_regular, refuted, uncertified };

std::string to_string(PairStatus s);

/// Per-vertex degree floors of an (eps, delta)-super-regular pair.
struct SuperRegularity {
    double eps = 0.0;
    double delta = 0.0;
    std::size_t min_degree_a = 0;  // min over a in A of deg(a, B)
    std::size_t min_degree_b = 0;  // min over b in B of deg(b, A)
    bool holds = false;            // both minima exceed delta times the opposite side
};

/// Regularity verdict for one pair of clusters.
///
/// A refuted certificate carries X ⊆ A, Y ⊆ B with |X| > eps|A|, |Y| > eps|B|
/// and |d(X,Y) - d(A,B)| >= eps, so it can be replayed through density().
struct PairCertificate {
    std::size_t i = kNoCluster;
    std::size_t j = kNoCluster;
    double density = 0.0;  // d(A,B) in the graph that was checked
    double eps = 0.0;
    PairStatus status = PairStatus::uncertified;
    VertexSet witness_x;
    VertexSet witness_y;
    /// Set by degree_form_prune when the pair was removed from G'.
    bool emptied = false;
    std::optional<SuperRegularity> super;
};

/// Exhaustive check of the regularity condition; |A|, |B| <= 14.
///
/// For a fixed X and |Y| = t the extreme values of e(X,Y) come from the t
/// vertices of B with the largest or smallest degree into X, so only those
/// two candidates per (X, t) are examined.
PairCertificate check_regular_exact(const Graph& g, const VertexSet& a, const VertexSet& b,
                                    double eps);

/// Randomised witness search. Sound: returns refuted only with a valid
/// witness, otherwise uncertified; never certifies.
PairCertificate check_regular_heuristic(const Graph& g, const VertexSet& a, const VertexSet& b,
                                        double eps, std::size_t trials, std::uint64_t seed);

/// |{x in A : deg(x, Y) <= (d - eps)|Y|}|. Requires Y ⊆ B and |Y| > eps|B|.
std::size_t low_degree_count(const Graph& g, const VertexSet& a, const VertexSet& b,
                             const VertexSet& y, double d, double eps);

/// Measures the super-regularity degree floors of (A, B) in g.
SuperRegularity measure_super_regularity(const Graph& g, const VertexSet& a, const VertexSet& b,
                                         double eps, double delta);

/// Exceptional cluster V0 plus clusters V1..Vl, with the pruned host G'.
struct RegularPartition {
    std::shared_ptr<const Graph> host;
    std::shared_ptr<const Graph> pruned_host;
    VertexSet exceptional;
    std::vector<VertexSet> clusters;
    double eps = 0.0;
    double d = 0.0;
    /// Regularity parameter after super-regularisation discards (eps' < 2 eps).
    double eps_effective = 0.0;
    /// Common cluster size m at construction, updated by super_regularize.
    std::size_t cluster_size = 0;
    /// One certificate per pair i < j, row-major.
    std::vector<PairCertificate> pairs;

    std::size_t cluster_count() const noexcept { return clusters.size(); }
    /// owner[v] = cluster index of v, kNoCluster for V0.
    std::vector<std::size_t> owners() const;
    const PairCertificate& pair(std::size_t i, std::size_t j) const;
};

struct PruneOptions {
    /// Tolerance used when searching for irregularity witnesses; 0 means eps.
    double refute_eps = 0.0;
    std::size_t heuristic_trials = 32;
    std::uint64_t seed = 0;
};

/// Builds G' from a supplied equal-size partition: drops edges inside clusters,
/// empties pairs of density < d or with an irregularity witness, and checks
/// deg_G'(v) > deg_G(v) - (d + eps)|V| for every v (StructuralError otherwise).
RegularPartition degree_form_prune(std::shared_ptr<const Graph> g, const VertexSet& exceptional,
                                   const std::vector<VertexSet>& clusters, double d, double eps,
                                   const PruneOptions& options = {});

enum class EdgeRule {
    certified_only,  // status must be certified_regular
    not_refuted,     // certified_regular or uncertified (no witness found)
};

std::string to_string(EdgeRule r);

struct ReducedGraph {
    Graph graph;
    EdgeRule rule = EdgeRule::not_refuted;
    double d = 0.0;
    /// Bound delta(G_r) >= (c - theta) l with c = delta(G)/n, theta = 2 eps + d.
    double c = 0.0;
    double theta = 0.0;
    double required_min_degree = 0.0;
    std::size_t min_degree = 0;
    bool bound_holds = false;
    std::string warning;
};

/// Clusters become vertices; i ~ j iff the pair passes `rule` and has density >= d in G'.
ReducedGraph reduced_graph(const RegularPartition& part, double d,
                           EdgeRule rule = EdgeRule::not_refuted);

struct SuperRegularization {
    RegularPartition partition;
    std::vector<std::size_t> discarded;  // per cluster (same for every cluster)
    std::size_t max_low_degree = 0;      // worst low-degree count against one partner
    std::size_t rounds = 0;
};

/// Moves low-degree vertices of every clique pair to V0 and trims all clusters
/// to a common size so that each intra-clique pair satisfies deg(a) > delta|B|.
/// Throws InconsistencyError when more than eps m vertices of a cluster are
/// low against a partner whose pair was certified regular at eps.
SuperRegularization super_regularize(const RegularPartition& part, const CliqueFactor& factor,
                                     double delta);

/// Moves clusters outside the factor into V0 and renumbers the rest; the
/// factor and reduced graph are renumbered accordingly.
struct FactorRestriction {
    RegularPartition partition;
    Graph reduced;
    CliqueFactor factor;
    std::vector<std::size_t> old_index;  // new cluster -> old cluster
};
FactorRestriction restrict_to_factor(const RegularPartition& part, const Graph& reduced,
                                     const CliqueFactor& factor);

/// Rebuilds pruned_host from host for the current cluster sets: edges inside a
/// cluster and edges of emptied pairs are dropped, edges at V0 are kept. Used
/// once vertices have changed clusters.
void refresh_pruned_host(RegularPartition& part);

}  // namespace wellsep
