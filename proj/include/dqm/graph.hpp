#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dqm/scoring.hpp"

namespace dqm {

inline constexpr double kDefaultLambda = 0.3;
inline constexpr double kDefaultTau = 0.7;
inline constexpr size_t kDefaultTargetNodes = 300;

struct QuestionNode {
  std::string node_id;
  std::string question;
  std::string context;
  std::string chunk_id;
  // Section of the source chunk; used by the oracle classifier and the
  // shallower-section survivor fallback.
  std::optional<SectionId> section_id;
  EmbeddingVector embedding;
  // Nodes merged into this one, in merge order.
  std::vector<std::string> absorbed;
};

enum class EdgeDirection { kAToB, kBToA, kUndirected };

std::string_view to_string(EdgeDirection d) noexcept;
EdgeDirection parse_direction(std::string_view s);

// a_to_b means a is the more general question.
struct WeightedEdge {
  std::string a, b;
  double eta = 0.0;
  double xi = 0.0;
  double weight = 0.0;
  EdgeDirection direction = EdgeDirection::kUndirected;
};

struct MergeRecord {
  std::string survivor;
  std::string absorbed;
  double similarity = 0.0;
  // Classifier verdict for (survivor, absorbed); other means the
  // shallower-section / smaller-id fallback picked the survivor.
  Relation label = Relation::kOther;
};

struct QuestionGraph {
  std::vector<QuestionNode> nodes;
  std::vector<WeightedEdge> edges;
  double lambda = kDefaultLambda;
  std::vector<MergeRecord> merge_log;

  const QuestionNode* find(std::string_view node_id) const;
  size_t index_of(std::string_view node_id) const;  // throws ValidationError if absent
};

// w = lambda * eta + (1 - lambda) * xi. Throws ValidationError when any
// argument is outside [0, 1].
double edge_weight(double eta, double xi, double lambda);

// Sets every node's embedding to embed(question + " " + context).
void embed_nodes(std::span<QuestionNode> nodes, const Embedder& embedder);

// xi for two embedded nodes: clamped cosine of their embeddings.
double node_similarity(const QuestionNode& a, const QuestionNode& b);

struct ReduceResult {
  std::vector<QuestionNode> nodes;
  std::vector<MergeRecord> merge_log;
};

// Merges the currently most similar pair (by xi) exactly N - target times.
// The question the classifier calls more general survives and absorbs the
// other. Ties on xi go to the lexicographically smaller (id, id) pair; when
// the classifier answers other, the shallower source section survives, then
// the smaller node_id. Survivors keep their own embedding. Input order of the
// remaining nodes is preserved.
ReduceResult reduce_nodes(std::vector<QuestionNode> nodes, size_t target,
                          const SpecificityClassifier& classifier);

// Complete graph over the (embedded) nodes: one edge per unordered pair,
// a = earlier node in `nodes`. eta from the classifier, xi from embeddings,
// direction from the classifier's argmax.
QuestionGraph build_weighted_graph(std::vector<QuestionNode> nodes,
                                   const SpecificityClassifier& classifier, double lambda);

struct ThresholdReport {
  double tau = kDefaultTau;
  size_t n_nodes = 0;
  size_t n_edges = 0;
  size_t n_components = 0;
  bool has_cycle = false;
  double density = 0.0;  // kept edges / (|V| (|V| - 1) / 2)
  std::vector<size_t> kept;  // indices into graph.edges

  nlohmann::ordered_json to_json() const;
};

// Diagnostic subgraph keeping edges with weight >= tau.
ThresholdReport threshold_filter(const QuestionGraph& graph, double tau);

// Component labels (0-based, in order of first node) for the given edge set.
std::vector<size_t> connected_components(const QuestionGraph& graph, std::span<const size_t> edge_indices);

// Maximum spanning tree by Kruskal's algorithm on negated weights. Equal
// weights are taken in lexicographic (id, id) order. Throws ValidationError
// listing the components when the graph is disconnected.
QuestionGraph max_spanning_tree(const QuestionGraph& graph);

// |E| = |V| - 1, connected, acyclic (ignoring direction).
bool is_spanning_tree(const QuestionGraph& graph);

double total_weight(const QuestionGraph& graph);

struct PathStep {
  std::string node_id;
  std::string question;
  // Orientation of the edge to the next step: "down" when this node is the
  // more general end, "up" when the next node is, "undirected" otherwise.
  // Empty on the last step.
  std::string to_next;
};

// Number of nodes on the longest simple path of a tree.
size_t tree_diameter(const QuestionGraph& tree);

// Seeded random simple path of exactly k nodes: walks from a random leaf,
// never revisiting, retried until one reaches k nodes. Throws ValidationError
// when k < 2 or the tree's diameter is below k.
std::vector<PathStep> sample_path(const QuestionGraph& tree, size_t k, uint64_t seed);

}  // namespace dqm
