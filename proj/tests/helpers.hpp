#pragma once

#include <vector>

#include "wellsep/graph.hpp"
#include "wellsep/rng.hpp"

namespace testing {

using wellsep::Edge;
using wellsep::Graph;
using wellsep::Vertex;

inline Graph make(std::size_t n, std::vector<Edge> edges) { return Graph(n, edges); }

inline Graph path(std::size_t n) {
    std::vector<Edge> e;
    for (Vertex v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
    return Graph(n, e);
}

inline Graph cycle(std::size_t n) {
    std::vector<Edge> e;
    for (Vertex v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
    e.emplace_back(0, n - 1);
    return Graph(n, e);
}

inline Graph complete(std::size_t n) {
    std::vector<Edge> e;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return Graph(n, e);
}

// r x c grid, vertex r_i * c + c_j.
inline Graph grid(std::size_t r, std::size_t c) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            const Vertex v = i * c + j;
            if (j + 1 < c) e.emplace_back(v, v + 1);
            if (i + 1 < r) e.emplace_back(v, v + c);
        }
    return Graph(r * c, e);
}

inline Graph random_graph(std::size_t n, double p, wellsep::Rng& rng) {
    std::vector<Edge> e;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if (rng.bernoulli(p)) e.emplace_back(u, v);
    return Graph(n, e);
}

}  // namespace testing
