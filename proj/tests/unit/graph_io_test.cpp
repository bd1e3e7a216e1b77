#include <gtest/gtest.h>

#include "dqm/error.hpp"
#include "dqm/graph_io.hpp"

namespace dqm {
namespace {

QuestionGraph two_node_graph(EdgeDirection dir) {
  QuestionGraph g;
  g.lambda = 0.3;
  QuestionNode a{"q000000", "What is \"retrieval\"?", "ctx a", "000000", SectionId::from_path({1}), {}, {"q000004"}};
  QuestionNode b{"q000001", "What is an index?", "ctx b\nline 2", "000001", SectionId::from_path({1, 1}), {}, {}};
  g.nodes = {a, b};
  g.edges.push_back({"q000000", "q000001", 0.99, 0.5, 0.3 * 0.99 + 0.7 * 0.5, dir});
  g.merge_log.push_back({"q000000", "q000004", 0.875, Relation::kGeneral});
  return g;
}

TEST(GraphIoTest, JsonRoundTrip) {
  auto g = two_node_graph(EdgeDirection::kAToB);
  std::string text = export_graph(g, GraphFormat::kJson);
  auto back = import_graph_json(text);
  ASSERT_EQ(back.nodes.size(), 2u);
  EXPECT_EQ(back.nodes[0].question, g.nodes[0].question);
  EXPECT_EQ(back.nodes[1].context, "ctx b\nline 2");
  EXPECT_EQ(*back.nodes[1].section_id, SectionId::from_path({1, 1}));
  EXPECT_EQ(back.nodes[0].absorbed, (std::vector<std::string>{"q000004"}));
  ASSERT_EQ(back.edges.size(), 1u);
  EXPECT_EQ(back.edges[0].weight, g.edges[0].weight);
  EXPECT_EQ(back.edges[0].direction, EdgeDirection::kAToB);
  EXPECT_EQ(back.merge_log[0].similarity, 0.875);
  EXPECT_EQ(export_graph(back, GraphFormat::kJson), text);
}

TEST(GraphIoTest, DotSingleDirectedEdge) {
  std::string dot = export_graph(two_node_graph(EdgeDirection::kBToA), GraphFormat::kDot);
  EXPECT_EQ(dot.rfind("digraph dqm {", 0), 0u);
  EXPECT_NE(dot.find("\"q000001\" -> \"q000000\" [label=\"0.647\""), std::string::npos) << dot;
  EXPECT_NE(dot.find("label=\"What is \\\"retrieval\\\"?\""), std::string::npos) << dot;
  EXPECT_EQ(dot.find("dir=none"), std::string::npos);
}

TEST(GraphIoTest, DotUndirectedEdgeHasNoArrowhead) {
  std::string dot = export_graph(two_node_graph(EdgeDirection::kUndirected), GraphFormat::kDot);
  EXPECT_NE(dot.find("\"q000000\" -> \"q000001\""), std::string::npos);
  EXPECT_NE(dot.find("dir=none"), std::string::npos);
}

TEST(GraphIoTest, GraphmlIsEscaped) {
  std::string xml = export_graph(two_node_graph(EdgeDirection::kAToB), GraphFormat::kGraphml);
  EXPECT_NE(xml.find("What is &quot;retrieval&quot;?"), std::string::npos);
  EXPECT_NE(xml.find("source=\"q000000\" target=\"q000001\" directed=\"true\""), std::string::npos);
}

TEST(GraphIoTest, UnknownFormatAndMalformedInput) {
  EXPECT_EQ(parse_graph_format("dot"), GraphFormat::kDot);
  EXPECT_THROW(parse_graph_format("gexf"), ValidationError);
  EXPECT_THROW(import_graph_json("{not json"), ValidationError);
  EXPECT_THROW(import_graph_json(R"({"lambda":0.3,"nodes":[],"edges":[{"a":"x"}]})"), ValidationError);
}

}  // namespace
}  // namespace dqm
