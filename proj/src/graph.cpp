#include "wellsep/graph.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "wellsep/errors.hpp"

namespace wellsep {

VertexSet::VertexSet(std::vector<Vertex> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

VertexSet::VertexSet(std::initializer_list<Vertex> members)
    : VertexSet(std::vector<Vertex>(members)) {}

VertexSet VertexSet::range(Vertex begin, Vertex end) {
    std::vector<Vertex> v(end > begin ? end - begin : 0);
    std::iota(v.begin(), v.end(), begin);
    return VertexSet(std::move(v));
}

VertexSet VertexSet::from_bitset(const Bitset& bits) { return VertexSet(bits.to_vector()); }

bool VertexSet::contains(Vertex v) const {
    return std::binary_search(members_.begin(), members_.end(), v);
}

Bitset VertexSet::to_bitset(std::size_t n) const {
    Bitset b(n);
    for (auto v : members_) b.set(v);
    return b;
}

void VertexSet::validate(const Graph& g) const {
    if (!members_.empty() && members_.back() >= g.order())
        throw ArgumentError("vertex " + std::to_string(members_.back()) +
                            " out of range for graph of order " + std::to_string(g.order()));
}

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
    std::vector<Vertex> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return VertexSet(std::move(out));
}

VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
    std::vector<Vertex> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return VertexSet(std::move(out));
}

VertexSet set_intersection(const VertexSet& a, const VertexSet& b) {
    std::vector<Vertex> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return VertexSet(std::move(out));
}

bool disjoint(const VertexSet& a, const VertexSet& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) return false;
        if (*i < *j)
            ++i;
        else
            ++j;
    }
    return true;
}

Graph::Graph(std::size_t n, std::span<const Edge> edges) : n_(n), adj_(n), rows_(n, Bitset(n)) {
    for (auto [u, v] : edges) {
        if (u >= n || v >= n)
            throw ArgumentError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                ") out of range for n=" + std::to_string(n));
        if (u == v) throw ArgumentError("self-loop at vertex " + std::to_string(u));
        if (rows_[u].test(v))
            throw ArgumentError("duplicate edge (" + std::to_string(u) + "," + std::to_string(v) +
                                ")");
        rows_[u].set(v);
        rows_[v].set(u);
        adj_[u].push_back(v);
        adj_[v].push_back(u);
        ++m_;
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(m_);
    for (Vertex u = 0; u < n_; ++u)
        for (Vertex v : adj_[u])
            if (u < v) out.emplace_back(u, v);
    return out;
}

Graph Graph::induced(const VertexSet& keep) const {
    keep.validate(*this);
    std::vector<std::size_t> index(n_, std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < keep.size(); ++i) index[keep[i]] = i;
    std::vector<Edge> out;
    for (Vertex u : keep)
        for (Vertex v : adj_[u])
            if (u < v && index[v] != std::numeric_limits<std::size_t>::max())
                out.emplace_back(index[u], index[v]);
    return Graph(keep.size(), out);
}

void Graph::check_vertex(Vertex v) const {
    if (v >= n_)
        throw ArgumentError("vertex " + std::to_string(v) + " out of range for graph of order " +
                            std::to_string(n_));
}

bool GraphBuilder::add_edge(Vertex u, Vertex v) {
    if (u >= n_ || v >= n_) throw ArgumentError("edge endpoint out of range");
    if (u == v) throw ArgumentError("self-loop at vertex " + std::to_string(u));
    if (rows_[u].test(v)) return false;
    rows_[u].set(v);
    rows_[v].set(u);
    return true;
}

void GraphBuilder::remove_edge(Vertex u, Vertex v) {
    rows_[u].reset(v);
    rows_[v].reset(u);
}

Graph GraphBuilder::build() const {
    std::vector<Edge> edges;
    for (Vertex u = 0; u < n_; ++u)
        rows_[u].for_each([&](std::size_t v) {
            if (u < v) edges.emplace_back(u, v);
        });
    return Graph(n_, edges);
}

std::size_t degree_into(const Graph& g, Vertex v, const VertexSet& a) {
    g.check_vertex(v);
    a.validate(g);
    std::size_t c = 0;
    for (auto u : a)
        if (g.adjacent(v, u)) ++c;
    return c;
}

std::size_t edges_between(const Graph& g, const VertexSet& x, const VertexSet& y) {
    std::size_t e = 0;
    for (auto u : x)
        for (auto v : y)
            if (g.adjacent(u, v)) ++e;
    return e;
}

double density(const Graph& g, const VertexSet& x, const VertexSet& y) {
    x.validate(g);
    y.validate(g);
    if (x.empty() || y.empty()) throw ArgumentError("density of an empty set");
    if (!disjoint(x, y)) throw ArgumentError("density requires disjoint sets");
    return static_cast<double>(edges_between(g, x, y)) /
           (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

std::vector<VertexSet> components(const Graph& g, const VertexSet& removed) {
    removed.validate(g);
    const std::size_t n = g.order();
    std::vector<char> gone(n, 0);
    for (auto v : removed) gone[v] = 1;
    std::vector<VertexSet> out;
    std::vector<Vertex> stack;
    for (Vertex s = 0; s < n; ++s) {
        if (gone[s]) continue;
        std::vector<Vertex> comp;
        gone[s] = 1;
        stack.push_back(s);
        while (!stack.empty()) {
            Vertex u = stack.back();
            stack.pop_back();
            comp.push_back(u);
            for (Vertex w : g.neighbors(u))
                if (!gone[w]) {
                    gone[w] = 1;
                    stack.push_back(w);
                }
        }
        out.emplace_back(std::move(comp));
    }
    return out;
}

std::size_t min_degree(const Graph& g) {
    if (g.order() == 0) throw ArgumentError("min_degree of the empty graph");
    std::size_t d = std::numeric_limits<std::size_t>::max();
    for (Vertex v = 0; v < g.order(); ++v) d = std::min(d, g.degree(v));
    return d;
}

std::size_t max_degree(const Graph& g) {
    if (g.order() == 0) throw ArgumentError("max_degree of the empty graph");
    std::size_t d = 0;
    for (Vertex v = 0; v < g.order(); ++v) d = std::max(d, g.degree(v));
    return d;
}

std::vector<std::size_t> bfs_distances(const Graph& g, const VertexSet& sources) {
    sources.validate(g);
    std::vector<std::size_t> dist(g.order(), std::numeric_limits<std::size_t>::max());
    std::queue<Vertex> q;
    for (auto s : sources) {
        dist[s] = 0;
        q.push(s);
    }
    while (!q.empty()) {
        Vertex u = q.front();
        q.pop();
        for (Vertex w : g.neighbors(u))
            if (dist[w] == std::numeric_limits<std::size_t>::max()) {
                dist[w] = dist[u] + 1;
                q.push(w);
            }
    }
    return dist;
}

std::vector<VertexSet> Coloring::class_sets() const {
    std::vector<std::vector<Vertex>> cls(classes);
    for (Vertex v = 0; v < color.size(); ++v) cls[color[v]].push_back(v);
    std::vector<VertexSet> out;
    out.reserve(classes);
    for (auto& c : cls) out.emplace_back(std::move(c));
    return out;
}

bool is_proper_coloring(const Graph& g, std::span<const std::size_t> color) {
    if (color.size() != g.order()) return false;
    for (auto [u, v] : g.edges())
        if (color[u] == color[v]) return false;
    return true;
}

namespace {

constexpr std::size_t kUncolored = std::numeric_limits<std::size_t>::max();

// Picks the uncoloured vertex of maximum saturation, ties by degree then id.
Vertex pick_dsatur(const Graph& g, const std::vector<std::size_t>& color,
                   const std::vector<Bitset>& seen) {
    Vertex best = kUncolored;
    std::size_t best_sat = 0, best_deg = 0;
    for (Vertex v = 0; v < g.order(); ++v) {
        if (color[v] != kUncolored) continue;
        const std::size_t sat = seen[v].count();
        const std::size_t deg = g.degree(v);
        if (best == kUncolored || sat > best_sat || (sat == best_sat && deg > best_deg)) {
            best = v;
            best_sat = sat;
            best_deg = deg;
        }
    }
    return best;
}

std::vector<std::size_t> dsatur(const Graph& g, std::size_t& classes) {
    const std::size_t n = g.order();
    std::vector<std::size_t> color(n, kUncolored);
    std::vector<Bitset> seen(n, Bitset(n + 1));
    classes = 0;
    for (std::size_t step = 0; step < n; ++step) {
        const Vertex v = pick_dsatur(g, color, seen);
        std::size_t c = 0;
        while (seen[v].test(c)) ++c;
        color[v] = c;
        classes = std::max(classes, c + 1);
        for (Vertex w : g.neighbors(v)) seen[w].set(c);
    }
    return color;
}

// Exact colouring: DSATUR-ordered backtracking trying to beat `best`.
class ExactColoring {
  public:
    ExactColoring(const Graph& g, std::vector<std::size_t> best, std::size_t best_k)
        : g_(g), best_(std::move(best)), best_k_(best_k), color_(g.order(), kUncolored),
          seen_count_(g.order(), std::vector<std::size_t>(g.order() + 1, 0)),
          sat_(g.order(), 0) {}

    void run() {
        if (g_.order() == 0) return;
        search(0, 0);
    }
    const std::vector<std::size_t>& best() const { return best_; }
    std::size_t best_k() const { return best_k_; }

  private:
    void assign(Vertex v, std::size_t c, int delta) {
        for (Vertex w : g_.neighbors(v)) {
            auto& cnt = seen_count_[w][c];
            if (delta > 0) {
                if (cnt++ == 0) ++sat_[w];
            } else if (--cnt == 0) {
                --sat_[w];
            }
        }
    }

    void search(std::size_t colored, std::size_t used) {
        if (used >= best_k_) return;
        if (colored == g_.order()) {
            best_ = color_;
            best_k_ = used;
            return;
        }
        Vertex v = kUncolored;
        for (Vertex u = 0; u < g_.order(); ++u) {
            if (color_[u] != kUncolored) continue;
            if (v == kUncolored || sat_[u] > sat_[v] ||
                (sat_[u] == sat_[v] && g_.degree(u) > g_.degree(v)))
                v = u;
        }
        for (std::size_t c = 0; c <= used; ++c) {
            if (c == used && used + 1 >= best_k_) break;  // a new class cannot improve
            if (seen_count_[v][c]) continue;
            color_[v] = c;
            assign(v, c, +1);
            search(colored + 1, std::max(used, c + 1));
            assign(v, c, -1);
            color_[v] = kUncolored;
            if (used >= best_k_) break;
        }
    }

    const Graph& g_;
    std::vector<std::size_t> best_;
    std::size_t best_k_;
    std::vector<std::size_t> color_;
    std::vector<std::vector<std::size_t>> seen_count_;
    std::vector<std::size_t> sat_;
};

}  // namespace

Coloring chromatic_upper(const Graph& g) {
    Coloring out;
    out.color = dsatur(g, out.classes);
    if (g.order() <= kExactColoringLimit) {
        ExactColoring exact(g, out.color, out.classes);
        exact.run();
        out.color = exact.best();
        out.classes = exact.best_k();
        out.exact = true;
    }
    return out;
}

Graph read_edge_list(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            auto pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos || line[pos] == '#') continue;
            return true;
        }
        return false;
    };
    if (!next_line()) throw ParseError(lineno + 1, "missing header 'n m'");
    std::size_t n = 0, m = 0;
    {
        std::istringstream hs(line);
        std::string extra;
        if (!(hs >> n >> m) || (hs >> extra)) throw ParseError(lineno, "header must be 'n m'");
    }
    std::vector<Edge> edges;
    edges.reserve(m);
    std::vector<Bitset> rows(n, Bitset(n));
    for (std::size_t i = 0; i < m; ++i) {
        if (!next_line())
            throw ParseError(lineno + 1, "expected " + std::to_string(m) + " edges, got " +
                                             std::to_string(i));
        std::istringstream ls(line);
        long long u = -1, v = -1;
        std::string extra;
        if (!(ls >> u >> v) || (ls >> extra)) throw ParseError(lineno, "edge line must be 'u v'");
        if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
            throw ParseError(lineno, "vertex id out of range 0.." + std::to_string(n ? n - 1 : 0));
        if (u == v) throw ParseError(lineno, "self-loop at vertex " + std::to_string(u));
        auto a = static_cast<Vertex>(std::min(u, v));
        auto b = static_cast<Vertex>(std::max(u, v));
        if (rows[a].test(b))
            throw ParseError(lineno, "duplicate edge " + std::to_string(a) + " " + std::to_string(b));
        rows[a].set(b);
        edges.emplace_back(a, b);
    }
    if (next_line()) throw ParseError(lineno, "trailing content after " + std::to_string(m) + " edges");
    return Graph(n, edges);
}

Graph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open " + path);
    return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
    out << g.order() << ' ' << g.edge_count() << '\n';
    for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void write_edge_list_file(const std::string& path, const Graph& g) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write " + path);
    write_edge_list(out, g);
}

}  // namespace wellsep
