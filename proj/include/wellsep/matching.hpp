#pragma once

#include <cstddef>
#include <vector>

namespace wellsep {

/// Bipartite graph with left vertices 0..left-1 and right vertices 0..right-1.
struct BipartiteGraph {
    std::size_t left = 0;
    std::size_t right = 0;
    std::vector<std::vector<std::size_t>> adj;  // adj[l] lists right neighbours

    explicit BipartiteGraph(std::size_t l = 0, std::size_t r = 0) : left(l), right(r), adj(l) {}
    void add_edge(std::size_t l, std::size_t r) { adj[l].push_back(r); }
};

inline constexpr std::size_t kUnmatched = static_cast<std::size_t>(-1);

struct Matching {
    std::vector<std::size_t> left_to_right;  // kUnmatched if free
    std::vector<std::size_t> right_to_left;
    std::size_t size = 0;
};

/// Maximum matching by Hopcroft-Karp.
Matching max_matching(const BipartiteGraph& g);

/// A left set X with |N(X)| < |X|, extracted from a maximum matching that
/// leaves some left vertex free; empty when the matching saturates the left side.
struct HallViolation {
    std::vector<std::size_t> left_set;
    std::vector<std::size_t> neighbourhood;
};

HallViolation hall_violator(const BipartiteGraph& g, const Matching& m);

}  // namespace wellsep
