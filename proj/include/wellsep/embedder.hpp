#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wellsep/assignment.hpp"
#include "wellsep/clique_factor.hpp"
#include "wellsep/graph.hpp"
#include "wellsep/regularity.hpp"
#include "wellsep/rng.hpp"

namespace wellsep {

/// Allowed images of an H-vertex that has a neighbour in another clique.
struct RestrictionSet {
    Vertex x = 0;
    std::size_t cluster = kNoCluster;
    VertexSet allowed;
    std::vector<std::size_t> relevant;  // clusters hosting neighbours of x
    double required = 0.0;              // (1 - (2k-2) eps) |cluster|
};

struct Restrictions {
    std::vector<RestrictionSet> sets;
    std::vector<std::size_t> index;        // per H-vertex, position in sets or kNoCluster
    std::vector<std::size_t> per_cluster;  // number of restricted vertices per cluster
    std::size_t cross_edges = 0;           // |E'|
    std::size_t max_relevant = 0;
    double min_ratio = 1.0;                // min |T_x| / |cluster|
    bool exceeds_two_k_minus_two = false;

    const RestrictionSet* find(Vertex x) const {
        return index.empty() || index[x] == kNoCluster ? nullptr : &sets[index[x]];
    }
};

/// T_x for every endpoint x of an H-edge whose clusters lie in different
/// cliques: the vertices of kappa(x) with at least (d - eps)|V| neighbours in
/// every cluster V hosting a neighbour of x, filtered one cluster at a time.
/// InconsistencyError when |T_x| < (1 - (2k-2) eps)|kappa(x)|; after balancing
/// the clusters have size |L_i| rather than the common m.
Restrictions build_restrictions(const Graph& h, const Assignment& kappa,
                                const RegularPartition& part, const CliqueFactor& factor,
                                double eps, double d);

struct EmbedOptions {
    double buffer_fraction = 0.3;
    std::size_t retries = 5;
    /// Skip greedy images that would leave some buffer without a perfect matching.
    bool lookahead = true;
};

struct EmbedFailure {
    std::size_t clique = kNoCluster;
    std::string reason;
    std::vector<Vertex> hall_set;            // H-vertices with too few compatible images
    std::vector<Vertex> hall_neighbourhood;  // their compatible G-vertices
};

struct EmbedResult {
    std::optional<std::vector<Vertex>> phi;
    std::vector<std::size_t> clique_order;
    std::size_t attempts = 0;
    std::size_t greedy_placed = 0;
    std::size_t matched = 0;
    std::optional<EmbedFailure> failure;
};

/// Clique by clique (most cross-clique endpoints first): a random H-independent
/// buffer of about buffer_fraction of each cluster is held back, every other
/// vertex is placed greedily among compatible free images, then the buffer is
/// completed by a perfect matching. With lookahead, a greedy image is drawn
/// uniformly among those that keep the affected buffers matchable. Each clique
/// gets `retries` attempts.
EmbedResult embed_cliquewise(const Graph& h, const Graph& g, const Assignment& kappa,
                             const std::vector<VertexSet>& clusters, const CliqueFactor& factor,
                             const Restrictions& restrictions, Rng& rng,
                             const EmbedOptions& options = {});

struct EmbeddingCheck {
    bool ok = false;
    std::string violation;
};

/// Injectivity and edge preservation, checked from scratch.
EmbeddingCheck verify_embedding(const Graph& h, const Graph& g, std::span<const Vertex> phi);

inline constexpr std::size_t kBruteForceLimit = 12;

/// Exhaustive backtracking; nullopt proves that H is not a subgraph of G.
/// RegimeError when |V(H)| > 12.
std::optional<std::vector<Vertex>> brute_force_embed(const Graph& h, const Graph& g);

}  // namespace wellsep
