#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dqm/graph.hpp"

namespace dqm {

enum class GraphFormat { kJson, kDot, kGraphml };

// Throws ValidationError on anything but "json", "dot", "graphml".
GraphFormat parse_graph_format(std::string_view name);

// JSON is the canonical, round-trippable form:
//   {"lambda", "nodes":[{"node_id","question","context","chunk_id","section_id","absorbed"}],
//    "edges":[{"a","b","eta","xi","weight","direction"}],
//    "merge_log":[{"survivor","absorbed","similarity","label"}]}
// Embeddings are not exported. DOT and GraphML are view-only renderings with
// the same attributes.
std::string export_graph(const QuestionGraph& graph, GraphFormat format);

nlohmann::ordered_json graph_to_json(const QuestionGraph& graph);
QuestionGraph graph_from_json(const nlohmann::json& j);
QuestionGraph import_graph_json(std::string_view text);

// QuestionNode rows as written by the questions stage (no embeddings).
nlohmann::ordered_json node_to_json(const QuestionNode& node);
QuestionNode node_from_json(const nlohmann::json& j);

}  // namespace dqm
