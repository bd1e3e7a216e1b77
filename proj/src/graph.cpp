#include "dqm/graph.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "dqm/error.hpp"

namespace dqm {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), size_t{0});
  }

  size_t find(size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

 private:
  std::vector<size_t> parent_;
  std::vector<size_t> size_;
};

using PairKey = std::pair<std::string_view, std::string_view>;

PairKey pair_key(std::string_view x, std::string_view y) {
  return x < y ? PairKey{x, y} : PairKey{y, x};
}

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(std::string(name) + " = " + std::to_string(v) + " is outside [0, 1]");
  }
}

int section_depth(const QuestionNode& n) { return n.section_id ? n.section_id->depth() : INT_MAX; }

PairQuery make_query(const QuestionNode& a, const QuestionNode& b) {
  return {a.question, a.context, b.question, b.context, a.section_id, b.section_id, a.node_id, b.node_id};
}

void check_embedded(std::span<const QuestionNode> nodes) {
  for (const auto& n : nodes) {
    if (n.embedding.dim() == 0) throw ValidationError("node " + n.node_id + " has no embedding");
    if (n.embedding.dim() != nodes.front().embedding.dim()) {
      throw ValidationError("node " + n.node_id + " has a mismatched embedding dimension");
    }
  }
}

void check_unique_ids(std::span<const QuestionNode> nodes) {
  std::set<std::string_view> ids;
  for (const auto& n : nodes) {
    if (!ids.insert(n.node_id).second) throw ValidationError("duplicate node_id " + n.node_id);
  }
}

std::unordered_map<std::string_view, size_t> index_map(const QuestionGraph& g) {
  std::unordered_map<std::string_view, size_t> m;
  for (size_t i = 0; i < g.nodes.size(); ++i) m.emplace(g.nodes[i].node_id, i);
  return m;
}

size_t lookup(const std::unordered_map<std::string_view, size_t>& m, const std::string& id) {
  auto it = m.find(id);
  if (it == m.end()) throw ValidationError("edge references unknown node_id " + id);
  return it->second;
}

}  // namespace

std::string_view to_string(EdgeDirection d) noexcept {
  switch (d) {
    case EdgeDirection::kAToB: return "a_to_b";
    case EdgeDirection::kBToA: return "b_to_a";
    case EdgeDirection::kUndirected: return "undirected";
  }
  return "undirected";
}

EdgeDirection parse_direction(std::string_view s) {
  if (s == "a_to_b") return EdgeDirection::kAToB;
  if (s == "b_to_a") return EdgeDirection::kBToA;
  if (s == "undirected") return EdgeDirection::kUndirected;
  throw ValidationError("unknown edge direction '" + std::string(s) + "'");
}

const QuestionNode* QuestionGraph::find(std::string_view node_id) const {
  for (const auto& n : nodes) {
    if (n.node_id == node_id) return &n;
  }
  return nullptr;
}

size_t QuestionGraph::index_of(std::string_view node_id) const {
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].node_id == node_id) return i;
  }
  throw ValidationError("unknown node_id " + std::string(node_id));
}

double edge_weight(double eta, double xi, double lambda) {
  check_unit(eta, "eta");
  check_unit(xi, "xi");
  check_unit(lambda, "lambda");
  return lambda * eta + (1.0 - lambda) * xi;
}

void embed_nodes(std::span<QuestionNode> nodes, const Embedder& embedder) {
  std::vector<std::string> texts;
  texts.reserve(nodes.size());
  for (const auto& n : nodes) texts.push_back(question_context_text(n.question, n.context));
  auto vecs = embedder.embed(texts);
  if (vecs.size() != nodes.size()) throw BackendError("embedder returned wrong batch size");
  for (size_t i = 0; i < nodes.size(); ++i) nodes[i].embedding = std::move(vecs[i]);
}

double node_similarity(const QuestionNode& a, const QuestionNode& b) {
  return clamp_similarity(cosine_similarity(a.embedding, b.embedding));
}

ReduceResult reduce_nodes(std::vector<QuestionNode> nodes, size_t target,
                          const SpecificityClassifier& classifier) {
  const size_t n = nodes.size();
  if (target < 1) throw ValidationError("target node count must be >= 1");
  if (target > n) {
    throw ValidationError("target node count " + std::to_string(target) + " exceeds " +
                          std::to_string(n) + " nodes");
  }
  ReduceResult out;
  if (target == n) {
    out.nodes = std::move(nodes);
    return out;
  }
  check_unique_ids(nodes);
  check_embedded(nodes);

  // Condensed upper-triangular similarity matrix. Survivors keep their own
  // embedding, so entries never change; merging only retires rows.
  auto tri = [n](size_t i, size_t j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  };
  std::vector<double> sim(n * (n - 1) / 2);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) sim[tri(i, j)] = node_similarity(nodes[i], nodes[j]);
  }

  // Strictly better: higher similarity, then smaller (id, id) key.
  auto better = [&](size_t i1, size_t j1, size_t i2, size_t j2) {
    double s1 = sim[tri(i1, j1)], s2 = sim[tri(i2, j2)];
    if (s1 != s2) return s1 > s2;
    return pair_key(nodes[i1].node_id, nodes[j1].node_id) < pair_key(nodes[i2].node_id, nodes[j2].node_id);
  };

  std::vector<bool> alive(n, true);
  std::vector<size_t> best(n, n);
  auto refresh = [&](size_t i) {
    best[i] = n;
    for (size_t j = 0; j < n; ++j) {
      if (j == i || !alive[j]) continue;
      if (best[i] == n || better(i, j, i, best[i])) best[i] = j;
    }
  };
  for (size_t i = 0; i < n; ++i) refresh(i);

  for (size_t step = 0; step < n - target; ++step) {
    size_t bi = n;
    for (size_t i = 0; i < n; ++i) {
      if (!alive[i] || best[i] == n) continue;
      if (bi == n || better(i, best[i], bi, best[bi])) bi = i;
    }
    size_t x = bi, y = best[bi];
    if (nodes[y].node_id < nodes[x].node_id) std::swap(x, y);

    const SpecificityDistribution dist = classify_specificity(make_query(nodes[x], nodes[y]), classifier);
    dist.validate(1e-3);
    Relation verdict = dist.argmax();
    size_t survivor, loser;
    if (verdict == Relation::kGeneral) {
      survivor = x, loser = y;
    } else if (verdict == Relation::kSpecific) {
      survivor = y, loser = x;
    } else {
      survivor = section_depth(nodes[y]) < section_depth(nodes[x]) ? y : x;
      loser = survivor == x ? y : x;
    }
    Relation label = verdict;
    if (survivor == y && verdict != Relation::kOther) label = Relation::kGeneral;

    out.merge_log.push_back({nodes[survivor].node_id, nodes[loser].node_id, sim[tri(x, y)], label});
    auto& absorbed = nodes[survivor].absorbed;
    absorbed.push_back(nodes[loser].node_id);
    absorbed.insert(absorbed.end(), nodes[loser].absorbed.begin(), nodes[loser].absorbed.end());
    alive[loser] = false;
    for (size_t i = 0; i < n; ++i) {
      if (alive[i] && (best[i] == loser || i == survivor)) refresh(i);
    }
  }

  for (size_t i = 0; i < n; ++i) {
    if (alive[i]) out.nodes.push_back(std::move(nodes[i]));
  }
  return out;
}

QuestionGraph build_weighted_graph(std::vector<QuestionNode> nodes,
                                   const SpecificityClassifier& classifier, double lambda) {
  check_unit(lambda, "lambda");
  if (nodes.size() < 2) throw ValidationError("a weighted graph needs at least 2 nodes");
  check_unique_ids(nodes);
  check_embedded(nodes);

  QuestionGraph g;
  g.lambda = lambda;
  g.nodes = std::move(nodes);
  const size_t n = g.nodes.size();

  std::vector<PairQuery> queries;
  queries.reserve(n * (n - 1) / 2);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) queries.push_back(make_query(g.nodes[i], g.nodes[j]));
  }
  std::vector<SpecificityDistribution> dists;
  try {
    dists = classifier.classify(queries);
  } catch (const BackendError& e) {
    throw BackendError(std::string("scoring complete graph: ") + e.what());
  }
  if (dists.size() != queries.size()) throw BackendError("classifier returned wrong batch size");

  g.edges.reserve(queries.size());
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j, ++k) {
      const auto& d = dists[k];
      try {
        d.validate(1e-3);
      } catch (const ValidationError& e) {
        throw ValidationError("pair (" + g.nodes[i].node_id + ", " + g.nodes[j].node_id + "): " + e.what());
      }
      WeightedEdge e;
      e.a = g.nodes[i].node_id;
      e.b = g.nodes[j].node_id;
      e.eta = specificity_confidence(d);
      e.xi = node_similarity(g.nodes[i], g.nodes[j]);
      e.weight = edge_weight(e.eta, e.xi, lambda);
      switch (d.argmax()) {
        case Relation::kGeneral: e.direction = EdgeDirection::kAToB; break;
        case Relation::kSpecific: e.direction = EdgeDirection::kBToA; break;
        case Relation::kOther: e.direction = EdgeDirection::kUndirected; break;
      }
      g.edges.push_back(std::move(e));
    }
  }
  return g;
}

std::vector<size_t> connected_components(const QuestionGraph& graph, std::span<const size_t> edge_indices) {
  const size_t n = graph.nodes.size();
  const auto idx = index_map(graph);
  DisjointSets ds(n);
  for (size_t e : edge_indices) {
    ds.unite(lookup(idx, graph.edges[e].a), lookup(idx, graph.edges[e].b));
  }
  std::vector<size_t> label(n), root_label(n, n);
  size_t next = 0;
  for (size_t i = 0; i < n; ++i) {
    size_t r = ds.find(i);
    if (root_label[r] == n) root_label[r] = next++;
    label[i] = root_label[r];
  }
  return label;
}

nlohmann::ordered_json ThresholdReport::to_json() const {
  return {{"tau", tau},
          {"n_nodes", n_nodes},
          {"n_edges", n_edges},
          {"n_components", n_components},
          {"has_cycle", has_cycle},
          {"density", density}};
}

ThresholdReport threshold_filter(const QuestionGraph& graph, double tau) {
  ThresholdReport r;
  r.tau = tau;
  r.n_nodes = graph.nodes.size();
  for (size_t i = 0; i < graph.edges.size(); ++i) {
    if (graph.edges[i].weight >= tau) r.kept.push_back(i);
  }
  r.n_edges = r.kept.size();
  auto labels = connected_components(graph, r.kept);
  r.n_components = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  // A forest has exactly |V| - components edges; anything more closes a cycle.
  r.has_cycle = r.n_edges + r.n_components > r.n_nodes;
  const double possible = static_cast<double>(r.n_nodes) * static_cast<double>(r.n_nodes - 1) / 2.0;
  r.density = possible > 0 ? static_cast<double>(r.n_edges) / possible : 0.0;
  return r;
}

QuestionGraph max_spanning_tree(const QuestionGraph& graph) {
  QuestionGraph tree;
  tree.nodes = graph.nodes;
  tree.lambda = graph.lambda;
  tree.merge_log = graph.merge_log;
  const size_t n = graph.nodes.size();
  if (n == 0) return tree;

  std::vector<size_t> order(graph.edges.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<double> cost(graph.edges.size());
  for (size_t i = 0; i < cost.size(); ++i) cost[i] = -graph.edges[i].weight;
  std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    if (cost[x] != cost[y]) return cost[x] < cost[y];
    return pair_key(graph.edges[x].a, graph.edges[x].b) < pair_key(graph.edges[y].a, graph.edges[y].b);
  });

  const auto idx = index_map(graph);
  DisjointSets ds(n);
  std::vector<size_t> chosen;
  for (size_t e : order) {
    if (chosen.size() + 1 == n) break;
    if (ds.unite(lookup(idx, graph.edges[e].a), lookup(idx, graph.edges[e].b))) chosen.push_back(e);
  }
  if (chosen.size() + 1 != n) {
    auto labels = connected_components(graph, chosen);
    size_t comps = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::vector<std::string>> groups(comps);
    for (size_t i = 0; i < n; ++i) groups[labels[i]].push_back(graph.nodes[i].node_id);
    std::string msg = "graph is disconnected (" + std::to_string(comps) + " components):";
    for (const auto& g : groups) {
      msg += " {";
      for (size_t i = 0; i < g.size(); ++i) msg += (i ? "," : "") + g[i];
      msg += "}";
    }
    throw ValidationError(msg);
  }
  std::sort(chosen.begin(), chosen.end());
  for (size_t e : chosen) tree.edges.push_back(graph.edges[e]);
  return tree;
}

bool is_spanning_tree(const QuestionGraph& graph) {
  const size_t n = graph.nodes.size();
  if (n == 0) return graph.edges.empty();
  if (graph.edges.size() != n - 1) return false;
  const auto idx = index_map(graph);
  DisjointSets ds(n);
  for (const auto& e : graph.edges) {
    if (!ds.unite(lookup(idx, e.a), lookup(idx, e.b))) return false;
  }
  return true;
}

double total_weight(const QuestionGraph& graph) {
  double s = 0.0;
  for (const auto& e : graph.edges) s += e.weight;
  return s;
}

}  // namespace dqm
