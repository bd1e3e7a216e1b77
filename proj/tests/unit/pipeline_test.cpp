#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include <gtest/gtest.h>

#include "dqm/error.hpp"
#include "dqm/graph_io.hpp"
#include "dqm/jsonl.hpp"
#include "dqm/pipeline.hpp"

namespace dqm {
namespace {

namespace fs = std::filesystem;

const fs::path kTextbook = fs::path(DQM_DATA_DIR) / "mini_textbook.md";

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("dqm_pipeline_" + name);
  fs::remove_all(dir);
  return dir;
}

PipelineConfig small_config(const fs::path& out) {
  PipelineConfig c;
  c.input = kTextbook;
  c.output_dir = out;
  c.target_nodes = 20;
  c.seed = 7;
  return c;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(DQM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(StageTest, ParsingAndSeeds) {
  EXPECT_EQ(parse_stages("all").size(), 7u);
  EXPECT_EQ(parse_stages("pairs,ingest"), (std::vector<Stage>{Stage::kIngest, Stage::kPairs}));
  EXPECT_THROW(parse_stages("ingest,bogus"), ValidationError);
  EXPECT_EQ(stage_seed(7, "pairs"), stage_seed(7, "pairs"));
  EXPECT_NE(stage_seed(7, "pairs"), stage_seed(7, "build"));
  EXPECT_NE(stage_seed(7, "pairs"), stage_seed(8, "pairs"));
  // First 16 hex digits of sha256("0:pairs").
  EXPECT_EQ(stage_seed(0, "pairs"), std::stoull(sha256_hex("0:pairs").substr(0, 16), nullptr, 16));
}

TEST(ConfigTest, JsonRoundTripAndUnknownKeys) {
  auto c = small_config("out");
  c.lambda = 0.4;
  auto back = PipelineConfig::from_json(nlohmann::json::parse(c.to_json().dump()));
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_THROW(PipelineConfig::from_json(nlohmann::json{{"lamda", 0.3}}), ValidationError);
  c.lambda = 1.5;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(PipelineTest, FullRunThenSkipsEverything) {
  auto out = fresh_dir("rerun");
  auto cfg = small_config(out);
  auto first = run_pipeline(cfg, kAllStages);
  ASSERT_EQ(first.stages.size(), 7u);
  for (const auto& s : first.stages) EXPECT_FALSE(s.skipped) << s.stage;
  for (auto name : {artifacts::kOutline, artifacts::kChunks, artifacts::kPairs, artifacts::kQuestions,
                    artifacts::kCompleteGraph, artifacts::kThreshold, artifacts::kTree, artifacts::kDqmJson,
                    artifacts::kDqmDot, artifacts::kDqmGraphml, artifacts::kReport, artifacts::kManifest}) {
    EXPECT_TRUE(fs::exists(out / std::string(name))) << name;
  }
  auto tree = import_graph_json(read_file(out / std::string(artifacts::kTree)));
  EXPECT_EQ(tree.nodes.size(), 20u);
  EXPECT_TRUE(is_spanning_tree(tree));

  auto second = run_pipeline(cfg, kAllStages);
  for (const auto& s : second.stages) EXPECT_TRUE(s.skipped) << s.stage;
  auto forced = run_pipeline(cfg, std::vector<Stage>{Stage::kExport}, true);
  EXPECT_FALSE(forced.stages[0].skipped);
  fs::remove_all(out);
}

TEST(PipelineTest, ConfigChangeRerunsDownstream) {
  auto out = fresh_dir("change");
  auto cfg = small_config(out);
  run_pipeline(cfg, kAllStages);
  cfg.lambda = 0.5;
  auto r = run_pipeline(cfg, kAllStages);
  for (const auto& s : r.stages) {
    // Only the graph build reads lambda; export follows from the new tree.
    bool reruns = s.stage == "build" || s.stage == "export";
    EXPECT_EQ(s.skipped, !reruns) << s.stage;
  }
  fs::remove_all(out);
}

TEST(PipelineTest, MissingInputNamesProducer) {
  auto out = fresh_dir("missing");
  auto cfg = small_config(out);
  run_pipeline(cfg, std::vector<Stage>{Stage::kIngest});
  try {
    run_pipeline(cfg, std::vector<Stage>{Stage::kScore});
    FAIL();
  } catch (const MissingArtifactError& e) {
    EXPECT_EQ(std::string(e.what()), "requires: questions");
    EXPECT_EQ(e.exit_code(), ExitCode::kMissingArtifact);
  }
  fs::remove_all(out);
}

TEST(PipelineTest, ExportIsByteIdenticalAcrossRuns) {
  auto a = fresh_dir("ident_a"), b = fresh_dir("ident_b");
  run_pipeline(small_config(a), kAllStages);
  run_pipeline(small_config(b), kAllStages);
  for (auto name : {artifacts::kPairs, artifacts::kDqmJson, artifacts::kDqmDot, artifacts::kDqmGraphml}) {
    EXPECT_EQ(read_file(a / std::string(name)), read_file(b / std::string(name))) << name;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(PipelineTest, PairFileHeaderAndCounts) {
  auto out = fresh_dir("pairs");
  auto cfg = small_config(out);
  run_pipeline(cfg, std::vector<Stage>{Stage::kIngest, Stage::kPairs});
  auto rows = read_jsonl(out / std::string(artifacts::kPairs));
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows[0]["prng"], "mt19937_64/selection-sampling-S");
  EXPECT_EQ(rows[0]["n_pairs"].get<size_t>(), rows.size() - 1);
  EXPECT_EQ((rows.size() - 1) % 3, 0u);
  fs::remove_all(out);
}

TEST(PipelineTest, UnreachableRemoteBackendFailsBeforeWork) {
  auto out = fresh_dir("remote");
  auto cfg = small_config(out);
  cfg.backend.kind = BackendKind::kRemote;
  cfg.backend.remote.endpoint = "http://127.0.0.1:1";
  cfg.backend.remote.timeout = std::chrono::milliseconds(500);
  EXPECT_THROW(run_pipeline(cfg, kAllStages), BackendError);
  fs::remove_all(out);
}

TEST(PipelineTest, MatchesCommittedGoldenRun) {
  auto out = fresh_dir("golden");
  run_pipeline(small_config(out), kAllStages);
  const fs::path golden(DQM_GOLDEN_DIR);
  EXPECT_EQ(read_file(out / std::string(artifacts::kDqmJson)), read_file(golden / "mini_textbook_dqm.json"));
  EXPECT_EQ(read_file(out / std::string(artifacts::kPairStats)),
            read_file(golden / "mini_textbook_pair_stats.json"));
  auto manifest = nlohmann::json::parse(read_file(out / std::string(artifacts::kManifest)));
  EXPECT_EQ(manifest["stages"].size(), 7u);
  fs::remove_all(out);
}

TEST(PipelineTest, BuildWithoutQuestionsNamesQuestionsStage) {
  auto out = fresh_dir("build_missing");
  auto cfg = small_config(out);
  try {
    run_pipeline(cfg, std::vector<Stage>{Stage::kBuild});
    FAIL();
  } catch (const MissingArtifactError& e) {
    EXPECT_EQ(std::string(e.what()), "requires: questions");
  }
  fs::remove_all(out);
}

TEST(CliTest, ExitCodes) {
  auto out = fresh_dir("cli");
  std::string base = "--input " + kTextbook.string() + " --out " + out.string() + " --target-nodes 20 --seed 7";
  EXPECT_EQ(run_cli("score " + base), 3);
  EXPECT_EQ(run_cli("ingest " + base), 0);
  EXPECT_EQ(run_cli("ingest " + base + " --lambda 2"), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("run " + base + " --backend remote --endpoint http://127.0.0.1:1"), 2);
  EXPECT_EQ(run_cli("run " + base + " --stages all"), 0);
  EXPECT_EQ(run_cli("path " + base + " --length 3"), 0);
  EXPECT_EQ(run_cli("export " + base + " --format gexf"), 1);
  fs::remove_all(out);
}

}  // namespace
}  // namespace dqm
