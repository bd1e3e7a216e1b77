#include "dqm/graph_io.hpp"

#include <cstdio>

#include "dqm/error.hpp"
#include "dqm/jsonl.hpp"

namespace dqm {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string escape_dot(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out.push_back('\\');
      out.push_back(c);
    } else if (c == '\n') {
      out += "\\n";
    } else if (c != '\r') {
      out.push_back(c);
    }
  }
  return out;
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string repr(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& v, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::string to_dot(const QuestionGraph& g) {
  std::string out = "digraph dqm {\n  node [shape=box];\n";
  for (const auto& n : g.nodes) {
    out += "  \"" + escape_dot(n.node_id) + "\" [label=\"" + escape_dot(n.question) + "\", chunk_id=\"" +
           escape_dot(n.chunk_id) + "\", absorbed=\"" + escape_dot(join(n.absorbed, ",")) + "\"];\n";
  }
  for (const auto& e : g.edges) {
    const bool flip = e.direction == EdgeDirection::kBToA;
    const std::string& from = flip ? e.b : e.a;
    const std::string& to = flip ? e.a : e.b;
    out += "  \"" + escape_dot(from) + "\" -> \"" + escape_dot(to) + "\" [label=\"" + fixed3(e.weight) +
           "\", weight=" + repr(e.weight) + ", eta=" + repr(e.eta) + ", xi=" + repr(e.xi) +
           ", direction=\"" + std::string(to_string(e.direction)) + "\"";
    if (e.direction == EdgeDirection::kUndirected) out += ", dir=none";
    out += "];\n";
  }
  out += "}\n";
  return out;
}

std::string to_graphml(const QuestionGraph& g) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"question\" for=\"node\" attr.name=\"question\" attr.type=\"string\"/>\n"
      "  <key id=\"chunk_id\" for=\"node\" attr.name=\"chunk_id\" attr.type=\"string\"/>\n"
      "  <key id=\"absorbed\" for=\"node\" attr.name=\"absorbed\" attr.type=\"string\"/>\n"
      "  <key id=\"eta\" for=\"edge\" attr.name=\"eta\" attr.type=\"double\"/>\n"
      "  <key id=\"xi\" for=\"edge\" attr.name=\"xi\" attr.type=\"double\"/>\n"
      "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
      "  <key id=\"direction\" for=\"edge\" attr.name=\"direction\" attr.type=\"string\"/>\n"
      "  <graph id=\"dqm\" edgedefault=\"undirected\">\n";
  for (const auto& n : g.nodes) {
    out += "    <node id=\"" + escape_xml(n.node_id) + "\">\n";
    out += "      <data key=\"question\">" + escape_xml(n.question) + "</data>\n";
    out += "      <data key=\"chunk_id\">" + escape_xml(n.chunk_id) + "</data>\n";
    out += "      <data key=\"absorbed\">" + escape_xml(join(n.absorbed, ",")) + "</data>\n";
    out += "    </node>\n";
  }
  size_t i = 0;
  for (const auto& e : g.edges) {
    const bool flip = e.direction == EdgeDirection::kBToA;
    const bool directed = e.direction != EdgeDirection::kUndirected;
    out += "    <edge id=\"e" + std::to_string(i++) + "\" source=\"" + escape_xml(flip ? e.b : e.a) +
           "\" target=\"" + escape_xml(flip ? e.a : e.b) + "\" directed=\"" + (directed ? "true" : "false") +
           "\">\n";
    out += "      <data key=\"eta\">" + repr(e.eta) + "</data>\n";
    out += "      <data key=\"xi\">" + repr(e.xi) + "</data>\n";
    out += "      <data key=\"weight\">" + repr(e.weight) + "</data>\n";
    out += "      <data key=\"direction\">" + std::string(to_string(e.direction)) + "</data>\n";
    out += "    </edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

}  // namespace

GraphFormat parse_graph_format(std::string_view name) {
  if (name == "json") return GraphFormat::kJson;
  if (name == "dot") return GraphFormat::kDot;
  if (name == "graphml") return GraphFormat::kGraphml;
  throw ValidationError("unknown graph format '" + std::string(name) + "' (json, dot, graphml)");
}

ordered_json node_to_json(const QuestionNode& n) {
  return {{"node_id", n.node_id},
          {"question", n.question},
          {"context", n.context},
          {"chunk_id", n.chunk_id},
          {"section_id", n.section_id ? json(n.section_id->code()) : json(nullptr)},
          {"absorbed", n.absorbed}};
}

QuestionNode node_from_json(const json& j) {
  QuestionNode n;
  n.node_id = j.at("node_id").get<std::string>();
  n.question = j.at("question").get<std::string>();
  n.context = j.at("context").get<std::string>();
  n.chunk_id = j.at("chunk_id").get<std::string>();
  if (j.contains("section_id") && !j["section_id"].is_null()) {
    n.section_id = SectionId::parse(j["section_id"].get<std::string>());
  }
  if (j.contains("absorbed")) n.absorbed = j["absorbed"].get<std::vector<std::string>>();
  return n;
}

ordered_json graph_to_json(const QuestionGraph& g) {
  ordered_json nodes = ordered_json::array(), edges = ordered_json::array(), log = ordered_json::array();
  for (const auto& n : g.nodes) nodes.push_back(node_to_json(n));
  for (const auto& e : g.edges) {
    edges.push_back({{"a", e.a},
                     {"b", e.b},
                     {"eta", e.eta},
                     {"xi", e.xi},
                     {"weight", e.weight},
                     {"direction", to_string(e.direction)}});
  }
  for (const auto& m : g.merge_log) {
    log.push_back({{"survivor", m.survivor},
                   {"absorbed", m.absorbed},
                   {"similarity", m.similarity},
                   {"label", to_string(m.label)}});
  }
  return {{"lambda", g.lambda}, {"nodes", nodes}, {"edges", edges}, {"merge_log", log}};
}

QuestionGraph graph_from_json(const json& j) {
  try {
    QuestionGraph g;
    g.lambda = j.at("lambda").get<double>();
    for (const auto& n : j.at("nodes")) g.nodes.push_back(node_from_json(n));
    for (const auto& e : j.at("edges")) {
      g.edges.push_back({e.at("a").get<std::string>(), e.at("b").get<std::string>(),
                         e.at("eta").get<double>(), e.at("xi").get<double>(), e.at("weight").get<double>(),
                         parse_direction(e.at("direction").get<std::string>())});
    }
    if (j.contains("merge_log")) {
      for (const auto& m : j["merge_log"]) {
        g.merge_log.push_back({m.at("survivor").get<std::string>(), m.at("absorbed").get<std::string>(),
                               m.at("similarity").get<double>(),
                               parse_relation(m.at("label").get<std::string>())});
      }
    }
    return g;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed graph JSON: ") + e.what());
  }
}

QuestionGraph import_graph_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("graph JSON does not parse: ") + e.what());
  }
  return graph_from_json(j);
}

std::string export_graph(const QuestionGraph& graph, GraphFormat format) {
  switch (format) {
    case GraphFormat::kJson: return graph_to_json(graph).dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
    case GraphFormat::kDot: return to_dot(graph);
    case GraphFormat::kGraphml: return to_graphml(graph);
  }
  throw ValidationError("unknown graph format");
}

}  // namespace dqm
