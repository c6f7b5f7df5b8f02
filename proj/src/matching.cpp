#include "wellsep/matching.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "wellsep/errors.hpp"

namespace wellsep {

namespace {

constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();

class HopcroftKarp {
  public:
    explicit HopcroftKarp(const BipartiteGraph& g)
        : g_(g), dist_(g.left), it_(g.left) {
        m_.left_to_right.assign(g.left, kUnmatched);
        m_.right_to_left.assign(g.right, kUnmatched);
    }

    Matching run() {
        while (bfs()) {
            std::fill(it_.begin(), it_.end(), 0);
            for (std::size_t l = 0; l < g_.left; ++l)
                if (m_.left_to_right[l] == kUnmatched && dfs(l)) ++m_.size;
        }
        return std::move(m_);
    }

  private:
    bool bfs() {
        std::queue<std::size_t> q;
        for (std::size_t l = 0; l < g_.left; ++l) {
            if (m_.left_to_right[l] == kUnmatched) {
                dist_[l] = 0;
                q.push(l);
            } else {
                dist_[l] = kInf;
            }
        }
        bool found = false;
        while (!q.empty()) {
            const auto l = q.front();
            q.pop();
            for (auto r : g_.adj[l]) {
                const auto next = m_.right_to_left[r];
                if (next == kUnmatched) {
                    found = true;
                } else if (dist_[next] == kInf) {
                    dist_[next] = dist_[l] + 1;
                    q.push(next);
                }
            }
        }
        return found;
    }

    // Iterative augmenting-path search along the BFS layering.
    bool dfs(std::size_t root) {
        std::vector<std::size_t> stack{root};
        std::vector<std::size_t> via;  // right vertex used to reach stack[i+1]
        while (!stack.empty()) {
            const auto l = stack.back();
            bool advanced = false;
            while (it_[l] < g_.adj[l].size()) {
                const auto r = g_.adj[l][it_[l]++];
                const auto next = m_.right_to_left[r];
                if (next == kUnmatched) {
                    via.push_back(r);
                    for (std::size_t i = 0; i < stack.size(); ++i) {
                        m_.left_to_right[stack[i]] = via[i];
                        m_.right_to_left[via[i]] = stack[i];
                    }
                    return true;
                }
                if (dist_[next] == dist_[l] + 1) {
                    via.push_back(r);
                    stack.push_back(next);
                    advanced = true;
                    break;
                }
            }
            if (!advanced) {
                dist_[l] = kInf;
                stack.pop_back();
                if (!via.empty()) via.pop_back();
            }
        }
        return false;
    }

    const BipartiteGraph& g_;
    Matching m_;
    std::vector<std::size_t> dist_;
    std::vector<std::size_t> it_;
};

}  // namespace

Matching max_matching(const BipartiteGraph& g) {
    if (g.adj.size() != g.left) throw ArgumentError("bipartite adjacency has wrong length");
    for (const auto& row : g.adj)
        for (auto r : row)
            if (r >= g.right) throw ArgumentError("right vertex out of range");
    return HopcroftKarp(g).run();
}

HallViolation hall_violator(const BipartiteGraph& g, const Matching& m) {
    HallViolation out;
    std::size_t root = kUnmatched;
    for (std::size_t l = 0; l < g.left; ++l)
        if (m.left_to_right[l] == kUnmatched) {
            root = l;
            break;
        }
    if (root == kUnmatched) return out;
    // Alternating BFS from a free left vertex: the reached left vertices have
    // all their neighbours reached, and every reached right vertex is matched.
    std::vector<char> seen_l(g.left, 0), seen_r(g.right, 0);
    std::queue<std::size_t> q;
    q.push(root);
    seen_l[root] = 1;
    while (!q.empty()) {
        const auto l = q.front();
        q.pop();
        for (auto r : g.adj[l]) {
            if (seen_r[r]) continue;
            seen_r[r] = 1;
            const auto next = m.right_to_left[r];
            if (next != kUnmatched && !seen_l[next]) {
                seen_l[next] = 1;
                q.push(next);
            }
        }
    }
    for (std::size_t l = 0; l < g.left; ++l)
        if (seen_l[l]) out.left_set.push_back(l);
    for (std::size_t r = 0; r < g.right; ++r)
        if (seen_r[r]) out.neighbourhood.push_back(r);
    return out;
}

}  // namespace wellsep
