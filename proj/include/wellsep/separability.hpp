#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wellsep/graph.hpp"

namespace wellsep {

/// Separator S of H together with the parts of H - S.
///
/// Parts are pairwise disjoint, disjoint from S, cover V(H) - S, and no edge
/// joins two parts. A part is normally one connected component; interval
/// constructions may list a union of components as one part.
struct Separation {
    VertexSet separator;
    std::vector<VertexSet> components;
    /// max(|S|, max part size) / n.
    double alpha_certificate = 0.0;
    /// Set when the certificate relies on a rounding rule rather than exact divisibility.
    bool rounded = false;

    std::size_t largest_component() const;
};

/// Builds a Separation with its certificate; no validation.
Separation make_separation(const Graph& h, VertexSet separator, std::vector<VertexSet> parts);

/// Separator S with the connected components of h - S as parts.
Separation separation_from_separator(const Graph& h, VertexSet separator);

enum class SeparationViolation { none, separator_too_large, component_too_large, cross_edge };

struct SeparationCheck {
    bool ok = false;
    SeparationViolation violation = SeparationViolation::none;
    std::string detail;
    double certificate = 0.0;
};

/// Checks |S| <= alpha n, every part <= alpha n and no cross-part edge.
/// Throws StructuralError when parts overlap or leave vertices uncovered.
SeparationCheck verify_separation(const Graph& h, const Separation& sep, double alpha);

/// Vertex ordering: order[pos] is the vertex placed at position pos.
struct BandwidthOrdering {
    std::vector<Vertex> order;
    std::size_t width = 0;

    /// Validates that order is a permutation of V(h) and computes the width.
    static BandwidthOrdering from_order(const Graph& h, std::vector<Vertex> order);
    std::vector<std::size_t> positions() const;
};

struct BandwidthSeparation {
    Separation separation;
    std::size_t interval_count = 0;   // m = floor(1/beta)
    std::size_t stride = 0;           // s = floor(sqrt(m))
    std::size_t interval_length = 0;  // ceil(n/m)
    double ideal_ratio = 0.0;         // sqrt(beta)
};

/// Cuts the ordering into intervals of length ceil(n/m), m = floor(1/beta);
/// every s-th interval (s = floor(sqrt m)) goes to S and the runs of s-1
/// intervals between them become the parts. Throws PreconditionError naming
/// the first edge whose stretch exceeds beta n.
BandwidthSeparation bandwidth_separator(const Graph& h, const BandwidthOrdering& ordering,
                                        double beta);

inline constexpr std::size_t kExactSeparatorLimit = 18;

struct SeparatorSearch {
    std::optional<Separation> separation;
    /// True when the answer (including "none") comes from exhaustive search.
    bool exact = false;
    std::string strategy;
};

/// Searches for an alpha-separation. Exhaustive for n <= 18, otherwise BFS
/// layer sweeps and recursive layer bisection; a heuristic miss proves nothing.
SeparatorSearch find_separator(const Graph& h, double alpha, std::uint64_t seed = 0);

/// The two alpha conditions that make the mapping argument go through:
/// concentration needs alpha <= eps^2 / (4 l^3), reassignment needs
/// alpha <= eps / (l Delta^k). Both must hold.
struct AlphaThreshold {
    double concentration = 0.0;
    double reassignment = 0.0;
    double combined = 0.0;  // min of the two
};
AlphaThreshold alpha_threshold(double eps, std::size_t clusters, std::size_t max_degree,
                               std::size_t k);

}  // namespace wellsep
