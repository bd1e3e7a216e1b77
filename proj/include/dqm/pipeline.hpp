#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dqm/chunker.hpp"
#include "dqm/graph.hpp"
#include "dqm/remote_scorer.hpp"

namespace dqm {

enum class BackendKind { kTfidf, kOracle, kRemote };

std::string_view to_string(BackendKind k) noexcept;
BackendKind parse_backend_kind(std::string_view s);

struct BackendConfig {
  // tfidf and oracle are both offline: tf-idf embeddings, template questions
  // and the section-hierarchy oracle as classifier. remote uses the HTTP
  // scorer for all three roles.
  BackendKind kind = BackendKind::kTfidf;
  RemoteConfig remote;
  // "template" or "remote"; empty picks by kind.
  std::string question_generator;
  // Optional JSONL of precomputed specificity scores; replaces the classifier.
  std::filesystem::path precomputed_scores;
};

struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path output_dir = "dqm_out";
  BackendConfig backend;
  double lambda = kDefaultLambda;
  double tau = kDefaultTau;
  size_t target_nodes = kDefaultTargetNodes;
  ChunkingConfig chunking;
  uint64_t seed = 0;
  size_t path_length = 4;
  // Pair split ratios; no split files are written when both are zero.
  double split_train = 0.0;
  double split_validation = 0.0;
  // Optional JSONL {"context": str, "references": [str]} for QG evaluation.
  std::filesystem::path qg_references;

  void validate() const;
  // Reads the JSON config format (keys mirror the CLI flags).
  static PipelineConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

enum class Stage { kIngest, kPairs, kQuestions, kScore, kBuild, kExport, kEval };

inline constexpr Stage kAllStages[] = {Stage::kIngest, Stage::kPairs,  Stage::kQuestions, Stage::kScore,
                                       Stage::kBuild,  Stage::kExport, Stage::kEval};

std::string_view to_string(Stage s) noexcept;
Stage parse_stage(std::string_view s);
// Comma-separated list; "all" selects every stage.
std::vector<Stage> parse_stages(std::string_view list);

// Seed for one stage, derived from the config seed and the stage name.
uint64_t stage_seed(uint64_t seed, std::string_view stage);

struct StageRecord {
  std::string stage;
  bool skipped = false;
  std::string config_hash;
  nlohmann::ordered_json inputs;   // file -> sha256
  nlohmann::ordered_json outputs;  // file -> sha256
  double duration_ms = 0.0;
};

struct RunResult {
  std::vector<StageRecord> stages;
  std::filesystem::path manifest_path;
};

// Runs the requested stages in pipeline order. A stage whose inputs, config
// and outputs match its manifest entry is skipped unless `force`. Throws
// MissingArtifactError naming the stage that produces a missing input.
RunResult run_pipeline(const PipelineConfig& config, std::span<const Stage> stages, bool force = false);

// Artifact file names inside the output directory.
namespace artifacts {
inline constexpr std::string_view kOutline = "outline.json";
inline constexpr std::string_view kChunks = "chunks.jsonl";
inline constexpr std::string_view kPairs = "pairs.jsonl";
inline constexpr std::string_view kPairStats = "pair_stats.json";
inline constexpr std::string_view kQuestions = "questions.jsonl";
inline constexpr std::string_view kEmbeddings = "embeddings.jsonl";
inline constexpr std::string_view kCompleteGraph = "complete_graph.json";
inline constexpr std::string_view kThreshold = "threshold_report.json";
inline constexpr std::string_view kTree = "tree.json";
inline constexpr std::string_view kDqmJson = "dqm.json";
inline constexpr std::string_view kDqmDot = "dqm.dot";
inline constexpr std::string_view kDqmGraphml = "dqm.graphml";
inline constexpr std::string_view kReport = "eval_report.json";
inline constexpr std::string_view kReportTable = "eval_report.txt";
inline constexpr std::string_view kManifest = "manifest.json";
}  // namespace artifacts

// Chunk rows: {"chunk_id","section_id","text","span"} in that order.
nlohmann::ordered_json chunk_to_json(const Chunk& c);
Chunk chunk_from_json(const nlohmann::json& j);

// Backend construction. Offline embedders are fitted on `corpus`.
std::unique_ptr<Embedder> make_embedder(const BackendConfig& cfg, std::span<const std::string> corpus);
std::unique_ptr<SpecificityClassifier> make_classifier(const BackendConfig& cfg);
std::unique_ptr<QuestionGenerator> make_generator(const BackendConfig& cfg);

}  // namespace dqm
