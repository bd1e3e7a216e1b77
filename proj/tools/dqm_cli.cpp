// dqm: build a domain question map from a Markdown textbook.
#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "dqm/error.hpp"
#include "dqm/graph_io.hpp"
#include "dqm/jsonl.hpp"
#include "dqm/pipeline.hpp"

namespace {

struct Flags {
  std::string config;
  std::string input;
  std::string out;
  std::optional<double> lambda;
  std::optional<double> tau;
  std::optional<size_t> target_nodes;
  std::optional<uint64_t> seed;
  std::string backend;
  std::string endpoint;
  std::string stages = "all";
  bool force = false;
  std::optional<double> percentile;
  std::optional<size_t> max_chars;
  std::string scores;
  std::string references;
  std::string qg;
  std::optional<size_t> length;
  std::string format;
};

dqm::PipelineConfig resolve(const Flags& f) {
  dqm::PipelineConfig cfg;
  if (!f.config.empty()) {
    try {
      cfg = dqm::PipelineConfig::from_json(nlohmann::json::parse(dqm::read_file(f.config)));
    } catch (const nlohmann::json::exception& e) {
      throw dqm::ValidationError(f.config + ": " + e.what());
    }
  }
  if (const char* env = std::getenv("DQM_ENDPOINT"); env && *env) cfg.backend.remote.endpoint = env;
  if (!f.input.empty()) cfg.input = f.input;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.lambda) cfg.lambda = *f.lambda;
  if (f.tau) cfg.tau = *f.tau;
  if (f.target_nodes) cfg.target_nodes = *f.target_nodes;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.backend.empty()) cfg.backend.kind = dqm::parse_backend_kind(f.backend);
  if (!f.endpoint.empty()) cfg.backend.remote.endpoint = f.endpoint;
  if (f.percentile) cfg.chunking.percentile = *f.percentile;
  if (f.max_chars) cfg.chunking.max_chars = *f.max_chars;
  if (!f.scores.empty()) cfg.backend.precomputed_scores = f.scores;
  if (!f.references.empty()) cfg.qg_references = f.references;
  if (!f.qg.empty()) cfg.backend.question_generator = f.qg;
  if (f.length) cfg.path_length = *f.length;
  return cfg;
}

void report(const dqm::RunResult& r) {
  for (const auto& s : r.stages) {
    std::cout << s.stage << ": " << (s.skipped ? "skipped (unchanged)" : "done");
    if (!s.skipped) std::cout << " in " << static_cast<long>(s.duration_ms) << " ms";
    std::cout << "\n";
  }
  std::cout << "manifest: " << r.manifest_path.string() << "\n";
}

int run_path(const dqm::PipelineConfig& cfg) {
  auto tree_path = cfg.output_dir / std::string(dqm::artifacts::kTree);
  if (!std::filesystem::exists(tree_path)) throw dqm::MissingArtifactError("build");
  auto tree = dqm::import_graph_json(dqm::read_file(tree_path));
  auto steps = dqm::sample_path(tree, cfg.path_length, dqm::stage_seed(cfg.seed, "path"));
  for (const auto& s : steps) {
    nlohmann::ordered_json row{{"node_id", s.node_id}, {"question", s.question}};
    if (!s.to_next.empty()) row["to_next"] = s.to_next;
    std::cout << dqm::dump_json(row) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build a domain question map (DQM) from a Markdown textbook"};
  app.require_subcommand(1);
  Flags f;

  app.add_option("--config", f.config, "JSON config file");
  app.add_option("--input", f.input, "Markdown textbook");
  app.add_option("--out", f.out, "Output directory for artifacts");
  app.add_option("--lambda", f.lambda, "Edge weight mix: lambda*eta + (1-lambda)*xi (default 0.3)");
  app.add_option("--tau", f.tau, "Diagnostic weight threshold (default 0.7)");
  app.add_option("--target-nodes", f.target_nodes, "Question count after merging (default 300)");
  app.add_option("--seed", f.seed, "Root seed; stages derive their own");
  app.add_option("--backend", f.backend, "tfidf | oracle | remote")->check(CLI::IsMember({"tfidf", "oracle", "remote"}));
  app.add_option("--endpoint", f.endpoint, "Scorer service URL (overrides DQM_ENDPOINT)");
  app.add_option("--percentile", f.percentile, "Chunk breakpoint percentile (default 25)");
  app.add_option("--max-chars", f.max_chars, "Maximum chunk size in bytes (default 2000)");
  app.add_option("--scores", f.scores, "Precomputed specificity scores (JSONL)");
  app.add_option("--references", f.references, "QG references for eval (JSONL)");
  app.add_option("--qg", f.qg, "Question generator: template | remote")->check(CLI::IsMember({"template", "remote"}));
  app.add_flag("--force", f.force, "Rerun stages even when inputs are unchanged");

  std::optional<dqm::Stage> single;
  auto stage_cmd = [&](dqm::Stage s, const std::string& help) {
    auto* sub = app.add_subcommand(std::string(dqm::to_string(s)), help);
    sub->fallthrough();
    sub->callback([&single, s] { single = s; });
    return sub;
  };
  stage_cmd(dqm::Stage::kIngest, "Parse the outline and chunk the textbook");
  stage_cmd(dqm::Stage::kPairs, "Build the labeled context-pair dataset");
  stage_cmd(dqm::Stage::kQuestions, "Generate one question per chunk");
  stage_cmd(dqm::Stage::kScore, "Embed question+context texts");
  stage_cmd(dqm::Stage::kBuild, "Merge, score the complete graph and prune to a spanning tree");
  auto* export_cmd = stage_cmd(dqm::Stage::kExport, "Write the tree as JSON, DOT and GraphML");
  export_cmd->add_option("--format", f.format, "Also print this format to stdout")
      ->check(CLI::IsMember({"json", "dot", "graphml"}));
  stage_cmd(dqm::Stage::kEval, "Classification (and optional QG) metrics");

  auto* run_cmd = app.add_subcommand("run", "Run several stages in order");
  run_cmd->fallthrough();
  run_cmd->add_option("--stages", f.stages, "Comma-separated stages or 'all'");

  auto* path_cmd = app.add_subcommand("path", "Sample a path from the built tree");
  path_cmd->fallthrough();
  path_cmd->add_option("--length", f.length, "Number of questions on the path (default 4)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(dqm::ExitCode::kValidation);
  }

  try {
    dqm::PipelineConfig cfg = resolve(f);
    if (path_cmd->parsed()) return run_path(cfg);
    std::vector<dqm::Stage> stages = single ? std::vector<dqm::Stage>{*single} : dqm::parse_stages(f.stages);
    report(dqm::run_pipeline(cfg, stages, f.force));
    if (export_cmd->parsed() && !f.format.empty()) {
      auto tree = dqm::import_graph_json(
          dqm::read_file(cfg.output_dir / std::string(dqm::artifacts::kTree)));
      std::cout << dqm::export_graph(tree, dqm::parse_graph_format(f.format));
    }
    return 0;
  } catch (const dqm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(dqm::ExitCode::kValidation);
  }
}
