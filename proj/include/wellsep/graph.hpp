#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wellsep/bitset.hpp"

namespace wellsep {

using Vertex = std::size_t;
using Edge = std::pair<Vertex, Vertex>;

/// Marker for "no cluster" / "no clique" in index maps.
inline constexpr std::size_t kNoCluster = static_cast<std::size_t>(-1);

class Graph;

/// Sorted, duplicate-free set of vertex ids.
class VertexSet {
  public:
    VertexSet() = default;
    explicit VertexSet(std::vector<Vertex> members);
    VertexSet(std::initializer_list<Vertex> members);

    static VertexSet range(Vertex begin, Vertex end);
    static VertexSet from_bitset(const Bitset& bits);

    const std::vector<Vertex>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }
    bool contains(Vertex v) const;
    auto begin() const noexcept { return members_.begin(); }
    auto end() const noexcept { return members_.end(); }
    Vertex operator[](std::size_t i) const { return members_[i]; }

    Bitset to_bitset(std::size_t n) const;

    /// Throws ArgumentError if a member is not a vertex of g.
    void validate(const Graph& g) const;

    bool operator==(const VertexSet&) const = default;

  private:
    std::vector<Vertex> members_;
};

VertexSet set_union(const VertexSet& a, const VertexSet& b);
VertexSet set_difference(const VertexSet& a, const VertexSet& b);
VertexSet set_intersection(const VertexSet& a, const VertexSet& b);
bool disjoint(const VertexSet& a, const VertexSet& b);

/// Immutable simple undirected graph on vertices 0..n-1.
///
/// Adjacency is held both as sorted neighbour lists and as bit rows, so
/// membership queries are O(1) and set intersections are word-parallel.
class Graph {
  public:
    Graph() = default;
    /// Throws ArgumentError on self-loops, duplicate edges or out-of-range ids.
    Graph(std::size_t n, std::span<const Edge> edges);

    std::size_t order() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return m_; }

    bool adjacent(Vertex u, Vertex v) const { return rows_[u].test(v); }
    std::span<const Vertex> neighbors(Vertex v) const { return adj_[v]; }
    std::size_t degree(Vertex v) const { return adj_[v].size(); }
    const Bitset& row(Vertex v) const { return rows_[v]; }

    /// Edge list with u < v, lexicographically sorted.
    std::vector<Edge> edges() const;

    /// Subgraph induced on `keep`, relabelled to 0..|keep|-1 in sorted order.
    Graph induced(const VertexSet& keep) const;

    /// Same vertex set, keeping the edges for which keep(u, v) is true.
    template <typename Pred>
    Graph filter_edges(Pred&& keep) const {
        std::vector<Edge> out;
        for (Vertex u = 0; u < n_; ++u)
            for (Vertex v : adj_[u])
                if (u < v && keep(u, v)) out.emplace_back(u, v);
        return Graph(n_, out);
    }

    void check_vertex(Vertex v) const;

    bool operator==(const Graph& o) const { return n_ == o.n_ && adj_ == o.adj_; }

  private:
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<std::vector<Vertex>> adj_;
    std::vector<Bitset> rows_;
};

/// Accumulates edges, silently ignoring repeats; for generators.
class GraphBuilder {
  public:
    explicit GraphBuilder(std::size_t n) : n_(n), rows_(n, Bitset(n)) {}
    std::size_t order() const noexcept { return n_; }
    /// Returns false if the edge was already present. Loops are rejected.
    bool add_edge(Vertex u, Vertex v);
    bool has_edge(Vertex u, Vertex v) const { return rows_[u].test(v); }
    void remove_edge(Vertex u, Vertex v);
    Graph build() const;

  private:
    std::size_t n_;
    std::vector<Bitset> rows_;
};

/// |N(v) ∩ A|.
std::size_t degree_into(const Graph& g, Vertex v, const VertexSet& a);

/// e(X, Y) for disjoint X, Y.
std::size_t edges_between(const Graph& g, const VertexSet& x, const VertexSet& y);

/// e(X,Y) / (|X||Y|). Throws ArgumentError if the sets overlap or one is empty.
double density(const Graph& g, const VertexSet& x, const VertexSet& y);

/// Connected components of g - removed, each sorted, ordered by smallest member.
std::vector<VertexSet> components(const Graph& g, const VertexSet& removed = {});

std::size_t min_degree(const Graph& g);
std::size_t max_degree(const Graph& g);

/// Breadth-first distances from a source set; unreachable vertices get SIZE_MAX.
std::vector<std::size_t> bfs_distances(const Graph& g, const VertexSet& sources);

struct Coloring {
    std::vector<std::size_t> color;  // color[v] in 0..classes-1
    std::size_t classes = 0;
    bool exact = false;              // classes == chi(g)

    /// Members of each color class.
    std::vector<VertexSet> class_sets() const;
};

/// DSATUR coloring; for n <= 20 an exact branch and bound replaces it.
Coloring chromatic_upper(const Graph& g);

inline constexpr std::size_t kExactColoringLimit = 20;

bool is_proper_coloring(const Graph& g, std::span<const std::size_t> color);

/// Edge-list text: "n m" header then m lines "u v" with u < v.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list_file(const std::string& path, const Graph& g);

}  // namespace wellsep
