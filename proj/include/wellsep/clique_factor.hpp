#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wellsep/graph.hpp"

namespace wellsep {

/// floor(l/k) vertex-disjoint k-cliques of the reduced graph; the rest is leftover.
struct CliqueFactor {
    std::size_t k = 0;
    std::vector<std::vector<std::size_t>> cliques;  // each sorted
    std::vector<std::size_t> leftover;               // sorted
    std::vector<std::size_t> clique_of;              // kNoCluster for leftover

    /// Fills leftover and clique_of from the cliques.
    static CliqueFactor from_cliques(std::size_t order, std::size_t k,
                                     std::vector<std::vector<std::size_t>> cliques);

    /// clq(v): the k-1 other members of v's clique; empty for leftover vertices.
    std::vector<std::size_t> partners(std::size_t v) const;
    std::size_t covered() const noexcept { return cliques.size() * k; }
};

struct FactorSearchStats {
    std::string strategy;  // "greedy", "swap-repair", "exhaustive"
    std::size_t nodes = 0;
    bool exhausted_budget = false;
};

inline constexpr std::size_t kExactFactorLimit = 30;

/// K_k-factor in the relaxed sense: floor(l/k) disjoint k-cliques.
///
/// Greedy packing (lowest-degree seed, partners keeping the residual minimum
/// degree high), then swap repair, then branch and bound for l <= 30. Throws
/// ArgumentError when k < 2 or k > l.
std::optional<CliqueFactor> find_kfactor(const Graph& gr, std::size_t k,
                                         FactorSearchStats* stats = nullptr);

/// Disjointness, clique-ness, count floor(l/k) and leftover consistency.
bool verify_factor(const Graph& gr, const CliqueFactor& f, std::size_t k,
                   std::string* why = nullptr);

}  // namespace wellsep
