#include <cstdint>
#include <queue>
#include <random>

#include "dqm/error.hpp"
#include "dqm/graph.hpp"

namespace dqm {
namespace {

struct Adjacent {
  size_t node;
  size_t edge;
};

std::vector<std::vector<Adjacent>> adjacency(const QuestionGraph& g) {
  std::vector<std::vector<Adjacent>> adj(g.nodes.size());
  for (size_t e = 0; e < g.edges.size(); ++e) {
    size_t a = g.index_of(g.edges[e].a), b = g.index_of(g.edges[e].b);
    adj[a].push_back({b, e});
    adj[b].push_back({a, e});
  }
  return adj;
}

// Farthest node from `src` and its distance in edges.
std::pair<size_t, size_t> farthest(const std::vector<std::vector<Adjacent>>& adj, size_t src,
                                   std::vector<size_t>* parent = nullptr) {
  const size_t n = adj.size();
  std::vector<size_t> dist(n, n), par(n, n);
  std::queue<size_t> q;
  dist[src] = 0;
  q.push(src);
  size_t far = src;
  while (!q.empty()) {
    size_t u = q.front();
    q.pop();
    if (dist[u] > dist[far]) far = u;
    for (const auto& [v, e] : adj[u]) {
      if (dist[v] == n) {
        dist[v] = dist[u] + 1;
        par[v] = u;
        q.push(v);
      }
    }
  }
  if (parent) *parent = std::move(par);
  return {far, dist[far]};
}

// Unbiased integer in [0, bound) by rejection.
uint64_t draw(std::mt19937_64& rng, uint64_t bound) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

size_t tree_diameter(const QuestionGraph& tree) {
  if (tree.nodes.empty()) return 0;
  if (!is_spanning_tree(tree)) throw ValidationError("path queries need a spanning tree");
  auto adj = adjacency(tree);
  auto [end1, d0] = farthest(adj, 0);
  auto [end2, d] = farthest(adj, end1);
  (void)d0;
  (void)end2;
  return d + 1;
}

std::vector<PathStep> sample_path(const QuestionGraph& tree, size_t k, uint64_t seed) {
  if (k < 2) throw ValidationError("path length must be >= 2");
  const size_t diameter = tree_diameter(tree);
  if (diameter < k) {
    throw ValidationError("no path of " + std::to_string(k) + " nodes: tree diameter is " +
                          std::to_string(diameter) + " nodes");
  }
  auto adj = adjacency(tree);
  const size_t n = tree.nodes.size();
  std::vector<size_t> leaves;
  for (size_t i = 0; i < n; ++i) {
    if (adj[i].size() == 1) leaves.push_back(i);
  }

  std::mt19937_64 rng(seed);
  std::vector<size_t> path, via;
  constexpr int kBudget = 10000;
  bool found = false;
  for (int attempt = 0; attempt < kBudget && !found; ++attempt) {
    path.assign(1, leaves[draw(rng, leaves.size())]);
    via.clear();
    while (path.size() < k) {
      size_t u = path.back();
      std::vector<Adjacent> options;
      for (const auto& a : adj[u]) {
        if (path.size() < 2 || a.node != path[path.size() - 2]) options.push_back(a);
      }
      if (options.empty()) break;
      const auto& pick = options[draw(rng, options.size())];
      path.push_back(pick.node);
      via.push_back(pick.edge);
    }
    found = path.size() == k;
  }
  if (!found) {
    // Budget exhausted: fall back to a prefix of a diameter path.
    std::vector<size_t> parent;
    auto [end1, d0] = farthest(adj, 0);
    (void)d0;
    auto [end2, d] = farthest(adj, end1, &parent);
    (void)d;
    path.assign(1, end2);
    via.clear();
    while (path.size() < k) {
      size_t u = path.back(), p = parent[u];
      for (const auto& a : adj[u]) {
        if (a.node == p) via.push_back(a.edge);
      }
      path.push_back(p);
    }
  }

  std::vector<PathStep> out;
  for (size_t i = 0; i < path.size(); ++i) {
    const auto& node = tree.nodes[path[i]];
    PathStep step{node.node_id, node.question, ""};
    if (i + 1 < path.size()) {
      const auto& e = tree.edges[via[i]];
      if (e.direction == EdgeDirection::kUndirected) {
        step.to_next = "undirected";
      } else {
        const std::string& general = e.direction == EdgeDirection::kAToB ? e.a : e.b;
        step.to_next = general == node.node_id ? "down" : "up";
      }
    }
    out.push_back(std::move(step));
  }
  return out;
}

}  // namespace dqm
