#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "dqm/error.hpp"
#include "dqm/graph.hpp"
#include "dqm/tfidf.hpp"
#include "oracles.hpp"

namespace dqm {
namespace {

QuestionNode node(std::string id, std::vector<double> emb, std::vector<int> section = {}) {
  QuestionNode n;
  n.node_id = id;
  n.question = "question " + id;
  n.context = "context " + id;
  n.chunk_id = id;
  if (!section.empty()) n.section_id = SectionId::from_path(section);
  n.embedding.values = std::move(emb);
  return n;
}

// Fixed classifier answering the same distribution for every pair.
class ConstantClassifier final : public SpecificityClassifier {
 public:
  explicit ConstantClassifier(SpecificityDistribution d) : d_(d) {}
  std::vector<SpecificityDistribution> classify(std::span<const PairQuery> pairs) const override {
    return std::vector<SpecificityDistribution>(pairs.size(), d_);
  }

 private:
  SpecificityDistribution d_;
};

QuestionGraph graph_from_weights(std::vector<std::string> ids,
                                 std::vector<std::tuple<int, int, double>> edges) {
  QuestionGraph g;
  for (auto& id : ids) g.nodes.push_back(node(id, {1.0}));
  for (auto [a, b, w] : edges) g.edges.push_back({ids[a], ids[b], w, w, w, EdgeDirection::kAToB});
  return g;
}

std::set<std::pair<std::string, std::string>> edge_set(const QuestionGraph& g) {
  std::set<std::pair<std::string, std::string>> s;
  for (const auto& e : g.edges) s.insert({e.a, e.b});
  return s;
}

TEST(EdgeWeightTest, ConvexCombination) {
  EXPECT_DOUBLE_EQ(edge_weight(1.0, 0.0, 0.3), 0.3);
  EXPECT_DOUBLE_EQ(edge_weight(0.0, 1.0, 0.3), 0.7);
  EXPECT_DOUBLE_EQ(edge_weight(0.5, 0.5, 0.9), 0.5);
  EXPECT_THROW(edge_weight(1.1, 0.0, 0.3), ValidationError);
  EXPECT_THROW(edge_weight(0.5, -0.1, 0.3), ValidationError);
  EXPECT_THROW(edge_weight(0.5, 0.5, 1.5), ValidationError);
}

TEST(EdgeWeightTest, LawHoldsOnRandomTriples) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    double eta = u(rng), xi = u(rng), lambda = u(rng);
    double w = edge_weight(eta, xi, lambda);
    EXPECT_NEAR(w, lambda * eta + (1 - lambda) * xi, 1e-12);
    EXPECT_GE(w, std::min(eta, xi) - 1e-12);
    EXPECT_LE(w, std::max(eta, xi) + 1e-12);
  }
}

TEST(ReduceTest, MergeCountAndParentSurvives) {
  // q2 (child) is nearly identical to q1 (parent); q0 is far away.
  std::vector<QuestionNode> nodes{node("q0", {0, 1}, {2}), node("q1", {1, 0.01}, {1}), node("q2", {1, 0}, {1, 1})};
  HierarchyOracle oracle;
  auto r = reduce_nodes(nodes, 2, oracle);
  ASSERT_EQ(r.nodes.size(), 2u);
  ASSERT_EQ(r.merge_log.size(), 1u);
  EXPECT_EQ(r.merge_log[0].survivor, "q1");
  EXPECT_EQ(r.merge_log[0].absorbed, "q2");
  EXPECT_EQ(r.merge_log[0].label, Relation::kGeneral);
  EXPECT_EQ(r.nodes[1].absorbed, (std::vector<std::string>{"q2"}));
  EXPECT_EQ(r.nodes[0].node_id, "q0");
}

TEST(ReduceTest, ParentSurvivesWhenItHasTheLargerId) {
  std::vector<QuestionNode> nodes{node("a", {1, 0}, {1, 1}), node("b", {1, 0}, {1}), node("c", {0, 1}, {2})};
  HierarchyOracle oracle;
  auto r = reduce_nodes(nodes, 2, oracle);
  EXPECT_EQ(r.merge_log[0].survivor, "b");
  EXPECT_EQ(r.merge_log[0].label, Relation::kGeneral);
}

TEST(ReduceTest, ThreeIdenticalQuestionsCollapse) {
  std::vector<QuestionNode> nodes{node("q2", {1, 1}, {3}), node("q0", {1, 1}, {1}), node("q1", {1, 1}, {2})};
  HierarchyOracle oracle;
  auto r = reduce_nodes(nodes, 1, oracle);
  ASSERT_EQ(r.nodes.size(), 1u);
  EXPECT_EQ(r.nodes[0].node_id, "q0");
  EXPECT_EQ(r.nodes[0].absorbed, (std::vector<std::string>{"q1", "q2"}));
  EXPECT_EQ(r.merge_log.size(), 2u);
}

TEST(ReduceTest, OtherVerdictPrefersShallowerSection) {
  std::vector<QuestionNode> nodes{node("a", {1, 0}, {1, 2, 1}), node("b", {1, 0}, {2, 1})};
  HierarchyOracle oracle;
  auto r = reduce_nodes(nodes, 1, oracle);
  EXPECT_EQ(r.nodes[0].node_id, "b");
  EXPECT_EQ(r.merge_log[0].label, Relation::kOther);
}

TEST(ReduceTest, AbsorbedListsAreInherited) {
  // (a,b) merge first, then (c, a) with c general.
  std::vector<QuestionNode> nodes{node("a", {1, 0}), node("b", {1, 0}), node("c", {1, 0.5})};
  ConstantClassifier general({0.8, 0.1, 0.1});
  auto r = reduce_nodes(nodes, 1, general);
  ASSERT_EQ(r.nodes.size(), 1u);
  EXPECT_EQ(r.nodes[0].node_id, "a");
  EXPECT_EQ(r.nodes[0].absorbed, (std::vector<std::string>{"b", "c"}));
  ConstantClassifier specific({0.1, 0.8, 0.1});
  auto s = reduce_nodes(nodes, 1, specific);
  EXPECT_EQ(s.nodes[0].node_id, "c");
  EXPECT_EQ(s.nodes[0].absorbed, (std::vector<std::string>{"b", "a"}));
}

TEST(ReduceTest, TargetValidation) {
  std::vector<QuestionNode> nodes{node("a", {1, 0}), node("b", {0, 1})};
  HierarchyOracle oracle;
  EXPECT_THROW(reduce_nodes(nodes, 0, oracle), ValidationError);
  EXPECT_THROW(reduce_nodes(nodes, 3, oracle), ValidationError);
  EXPECT_EQ(reduce_nodes(nodes, 2, oracle).nodes.size(), 2u);
  std::vector<QuestionNode> dup{node("a", {1, 0}), node("a", {0, 1})};
  EXPECT_THROW(reduce_nodes(dup, 1, oracle), ValidationError);
}

TEST(BuildGraphTest, CompleteGraphWeightsAndDirections) {
  std::vector<QuestionNode> nodes{node("p", {1, 0}, {1}), node("c", {1, 1}, {1, 1}), node("o", {0, 1}, {2})};
  HierarchyOracle oracle;
  auto g = build_weighted_graph(nodes, oracle, 0.3);
  ASSERT_EQ(g.edges.size(), 3u);
  const auto& pc = g.edges[0];
  EXPECT_EQ(pc.a, "p");
  EXPECT_EQ(pc.b, "c");
  EXPECT_EQ(pc.direction, EdgeDirection::kAToB);
  EXPECT_NEAR(pc.eta, 0.99, 1e-12);
  EXPECT_NEAR(pc.xi, std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(pc.weight, 0.3 * 0.99 + 0.7 * std::sqrt(0.5), 1e-12);
  EXPECT_EQ(g.edges[1].direction, EdgeDirection::kUndirected);  // p-o
  EXPECT_NEAR(g.edges[1].xi, 0.0, 1e-12);
  EXPECT_NEAR(g.edges[1].eta, 0.02, 1e-12);
  EXPECT_EQ(g.edges[2].direction, EdgeDirection::kUndirected);

  std::vector<QuestionNode> reversed{nodes[1], nodes[0]};
  auto h = build_weighted_graph(reversed, oracle, 0.3);
  EXPECT_EQ(h.edges[0].a, "c");
  EXPECT_EQ(h.edges[0].direction, EdgeDirection::kBToA);
  EXPECT_DOUBLE_EQ(h.edges[0].weight, pc.weight);
}

TEST(BuildGraphTest, EdgeCountForLargeGraph) {
  std::vector<QuestionNode> nodes;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 1);
  for (int i = 0; i < 300; ++i) nodes.push_back(node("n" + std::to_string(1000 + i), {u(rng), u(rng), u(rng)}));
  ConstantClassifier c({0.2, 0.3, 0.5});
  auto g = build_weighted_graph(nodes, c, 0.3);
  EXPECT_EQ(g.edges.size(), 44850u);
}

TEST(MaxSpanningTreeTest, Triangle) {
  auto g = graph_from_weights({"a", "b", "c"}, {{0, 1, 0.9}, {1, 2, 0.5}, {0, 2, 0.7}});
  auto t = max_spanning_tree(g);
  EXPECT_TRUE(is_spanning_tree(t));
  EXPECT_DOUBLE_EQ(total_weight(t), 1.6);
  EXPECT_EQ(edge_set(t), (std::set<std::pair<std::string, std::string>>{{"a", "b"}, {"a", "c"}}));
}

TEST(MaxSpanningTreeTest, MatchesBruteForce) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    size_t n = 3 + trial % 4;
    auto g = testing::random_complete_graph(n, rng);
    auto t = max_spanning_tree(g);
    ASSERT_TRUE(is_spanning_tree(t));
    EXPECT_EQ(total_weight(t), testing::brute_force_max_spanning_weight(g)) << "trial " << trial;
  }
}

TEST(MaxSpanningTreeTest, CayleyCount) { EXPECT_EQ(testing::count_spanning_trees(6), 1296u); }

TEST(MaxSpanningTreeTest, InvariantUnderPositiveScaling) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = testing::random_complete_graph(6, rng);
    auto scaled = g;
    for (auto& e : scaled.edges) e.weight = e.weight * 0.5 + 0.25;
    EXPECT_EQ(edge_set(max_spanning_tree(g)), edge_set(max_spanning_tree(scaled)));
  }
}

TEST(MaxSpanningTreeTest, TiesAreDeterministic) {
  auto g = graph_from_weights({"a", "b", "c"}, {{1, 2, 0.5}, {0, 2, 0.5}, {0, 1, 0.5}});
  auto t = max_spanning_tree(g);
  EXPECT_EQ(edge_set(t), (std::set<std::pair<std::string, std::string>>{{"a", "b"}, {"a", "c"}}));
}

TEST(MaxSpanningTreeTest, DisconnectedGraphNamesComponents) {
  auto g = graph_from_weights({"a", "b", "c", "d"}, {{0, 1, 0.5}, {2, 3, 0.5}});
  try {
    max_spanning_tree(g);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("{a,b} {c,d}"), std::string::npos) << e.what();
  }
}

TEST(ThresholdTest, ReportsCycle) {
  auto g = graph_from_weights({"a", "b", "c"}, {{0, 1, 0.8}, {1, 2, 0.8}, {0, 2, 0.9}});
  auto r = threshold_filter(g, 0.7);
  EXPECT_EQ(r.n_edges, 3u);
  EXPECT_EQ(r.n_components, 1u);
  EXPECT_TRUE(r.has_cycle);
  EXPECT_DOUBLE_EQ(r.density, 1.0);
}

TEST(ThresholdTest, ReportsDisconnection) {
  auto g = graph_from_weights({"a", "b", "c", "d"},
                              {{0, 1, 0.9}, {0, 2, 0.1}, {0, 3, 0.2}, {1, 2, 0.3}, {1, 3, 0.4}, {2, 3, 0.7}});
  auto r = threshold_filter(g, 0.7);
  EXPECT_EQ(r.n_edges, 2u);
  EXPECT_EQ(r.n_components, 2u);
  EXPECT_FALSE(r.has_cycle);
  EXPECT_EQ(r.to_json()["n_components"], 2);
}

QuestionGraph star() {
  QuestionGraph g;
  g.nodes = {node("c", {1}), node("l1", {1}), node("l2", {1}), node("l3", {1}), node("l4", {1})};
  for (int i = 1; i <= 4; ++i) g.edges.push_back({"c", "l" + std::to_string(i), 0.5, 0.5, 0.5, EdgeDirection::kAToB});
  return g;
}

TEST(PathTest, StarPathOfThree) {
  auto t = star();
  EXPECT_EQ(tree_diameter(t), 3u);
  std::set<std::string> ends;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    auto p = sample_path(t, 3, seed);
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(p[1].node_id, "c");
    EXPECT_NE(p[0].node_id, p[2].node_id);
    EXPECT_EQ(p[0].to_next, "up");
    EXPECT_EQ(p[1].to_next, "down");
    EXPECT_EQ(p[2].to_next, "");
    ends.insert(p[0].node_id);
  }
  EXPECT_EQ(ends.size(), 4u);
  EXPECT_EQ(sample_path(t, 3, 17)[0].node_id, sample_path(t, 3, 17)[0].node_id);
}

TEST(PathTest, DiameterTooShort) {
  auto t = star();
  try {
    sample_path(t, 4, 0);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("diameter is 3"), std::string::npos);
  }
  EXPECT_THROW(sample_path(t, 1, 0), ValidationError);
}

TEST(PathTest, UndirectedEdgesAnnotated) {
  auto g = graph_from_weights({"a", "b"}, {{0, 1, 0.5}});
  g.edges[0].direction = EdgeDirection::kUndirected;
  auto p = sample_path(g, 2, 3);
  EXPECT_EQ(p[0].to_next, "undirected");
}

TEST(PathTest, LongChainIsWalkedFully) {
  std::vector<std::string> ids;
  std::vector<std::tuple<int, int, double>> edges;
  for (int i = 0; i < 12; ++i) ids.push_back("n" + std::to_string(10 + i));
  for (int i = 0; i + 1 < 12; ++i) edges.emplace_back(i, i + 1, 0.5);
  auto g = graph_from_weights(ids, edges);
  EXPECT_EQ(tree_diameter(g), 12u);
  auto p = sample_path(g, 12, 5);
  ASSERT_EQ(p.size(), 12u);
}

TEST(EdgeWeightTest, WorkedValues) {
  EXPECT_NEAR(edge_weight(1.0, 0.5, 0.3), 0.65, 1e-12);
  EXPECT_EQ(edge_weight(0.8, 0.25, 0.0), 0.25);
  EXPECT_EQ(edge_weight(0.8, 0.25, 1.0), 0.8);
}

TEST(ReduceTest, FiveToThree) {
  std::vector<QuestionNode> nodes;
  for (int i = 0; i < 5; ++i) nodes.push_back(node("q" + std::to_string(i), {1.0, 0.3 * i}, {i + 1}));
  HierarchyOracle oracle;
  auto r = reduce_nodes(nodes, 3, oracle);
  EXPECT_EQ(r.merge_log.size(), 2u);
  EXPECT_EQ(r.nodes.size(), 3u);
  EXPECT_TRUE(reduce_nodes(nodes, 5, oracle).merge_log.empty());
}

TEST(ReduceTest, IdenticalQuestionsWithTfidfBackend) {
  std::vector<QuestionNode> nodes;
  for (std::string id : {"q1", "q0", "q2"}) {
    QuestionNode n;
    n.node_id = id;
    n.question = "What is an inverted index?";
    n.context = "An inverted index maps terms to postings.";
    n.section_id = SectionId::from_path({2, 1});
    nodes.push_back(n);
  }
  std::vector<std::string> corpus{nodes[0].context};
  TfidfEmbedder emb(corpus);
  embed_nodes(nodes, emb);
  EXPECT_NEAR(node_similarity(nodes[0], nodes[1]), 1.0, 1e-12);
  HierarchyOracle oracle;
  auto r = reduce_nodes(nodes, 1, oracle);
  ASSERT_EQ(r.nodes.size(), 1u);
  EXPECT_EQ(r.nodes[0].node_id, "q0");
  EXPECT_EQ(r.nodes[0].absorbed, (std::vector<std::string>{"q1", "q2"}));
}

TEST(MaxSpanningTreeTest, WorkedTriangle) {
  auto g = graph_from_weights({"A", "B", "C"}, {{0, 1, 0.9}, {1, 2, 0.8}, {0, 2, 0.2}});
  auto t = max_spanning_tree(g);
  EXPECT_EQ(edge_set(t), (std::set<std::pair<std::string, std::string>>{{"A", "B"}, {"B", "C"}}));
  EXPECT_NEAR(total_weight(t), 1.7, 1e-12);
}

TEST(MaxSpanningTreeTest, PathGraphUnchanged) {
  auto g = graph_from_weights({"a", "b", "c", "d"}, {{0, 1, 0.1}, {1, 2, 0.9}, {2, 3, 0.4}});
  EXPECT_EQ(edge_set(max_spanning_tree(g)), edge_set(g));
}

TEST(ThresholdTest, Extremes) {
  auto g = graph_from_weights({"a", "b", "c", "d"},
                              {{0, 1, 0.9}, {0, 2, 0.1}, {0, 3, 0.2}, {1, 2, 0.3}, {1, 3, 0.4}, {2, 3, 0.7}});
  auto all = threshold_filter(g, 0.0);
  EXPECT_EQ(all.n_edges, 6u);
  EXPECT_EQ(all.n_components, 1u);
  auto none = threshold_filter(g, 0.95);
  EXPECT_EQ(none.n_edges, 0u);
  EXPECT_EQ(none.n_components, 4u);
}

TEST(PathTest, TwoNodePathIsOneEdge) {
  auto t = star();
  auto p = sample_path(t, 2, 11);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_TRUE(p[0].node_id == "c" || p[1].node_id == "c");
  EXPECT_EQ(p[0].question, t.find(p[0].node_id)->question);
}

}  // namespace
}  // namespace dqm
