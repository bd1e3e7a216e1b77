#include "dqm/pipeline.hpp"

#include <chrono>
#include <cstring>
#include <iostream>
#include <map>
#include <set>

#include "dqm/error.hpp"
#include "dqm/graph_io.hpp"
#include "dqm/jsonl.hpp"
#include "dqm/metrics.hpp"
#include "dqm/outline.hpp"
#include "dqm/pair_dataset.hpp"
#include "dqm/precomputed.hpp"
#include "dqm/tfidf.hpp"

namespace dqm {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(BackendKind k) noexcept {
  switch (k) {
    case BackendKind::kTfidf: return "tfidf";
    case BackendKind::kOracle: return "oracle";
    case BackendKind::kRemote: return "remote";
  }
  return "tfidf";
}

BackendKind parse_backend_kind(std::string_view s) {
  if (s == "tfidf") return BackendKind::kTfidf;
  if (s == "oracle") return BackendKind::kOracle;
  if (s == "remote") return BackendKind::kRemote;
  throw ValidationError("unknown backend '" + std::string(s) + "' (tfidf, oracle, remote)");
}

std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::kIngest: return "ingest";
    case Stage::kPairs: return "pairs";
    case Stage::kQuestions: return "questions";
    case Stage::kScore: return "score";
    case Stage::kBuild: return "build";
    case Stage::kExport: return "export";
    case Stage::kEval: return "eval";
  }
  return "ingest";
}

Stage parse_stage(std::string_view s) {
  for (Stage st : kAllStages) {
    if (to_string(st) == s) return st;
  }
  throw ValidationError("unknown stage '" + std::string(s) + "'");
}

std::vector<Stage> parse_stages(std::string_view list) {
  if (list == "all") return {std::begin(kAllStages), std::end(kAllStages)};
  std::set<Stage> picked;
  size_t pos = 0;
  while (pos <= list.size()) {
    size_t comma = list.find(',', pos);
    std::string_view item = list.substr(pos, comma == std::string_view::npos ? list.npos : comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) picked.insert(parse_stage(item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (picked.empty()) throw ValidationError("no stages selected");
  return {picked.begin(), picked.end()};
}

uint64_t stage_seed(uint64_t seed, std::string_view stage) {
  std::string digest = sha256_hex(std::to_string(seed) + ":" + std::string(stage));
  return std::stoull(digest.substr(0, 16), nullptr, 16);
}

// ---------------------------------------------------------------------------
// Configuration

void PipelineConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("lambda must be in [0, 1]");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("tau must be in [0, 1]");
  if (target_nodes < 1) throw ValidationError("target_nodes must be >= 1");
  if (path_length < 2) throw ValidationError("path_length must be >= 2");
  chunking.validate();
  if (backend.kind == BackendKind::kRemote) backend.remote.validate();
  if (!backend.question_generator.empty() && backend.question_generator != "template" &&
      backend.question_generator != "remote") {
    throw ValidationError("question_generator must be 'template' or 'remote'");
  }
  if (backend.question_generator == "remote" && backend.remote.endpoint.empty()) {
    throw ValidationError("remote question generation requires an endpoint");
  }
  if (split_train < 0 || split_validation < 0 || split_train + split_validation > 1.0) {
    throw ValidationError("split ratios must be non-negative and sum to at most 1");
  }
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  static const std::set<std::string> kKeys = {
      "input",       "output_dir",      "backend",   "endpoint",       "batch_size",      "timeout_ms",
      "max_in_flight", "retries",       "question_generator", "precomputed_scores", "lambda", "tau",
      "target_nodes", "percentile",     "max_chars", "seed",           "path_length",     "split_train",
      "split_validation", "qg_references"};
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!kKeys.count(k)) throw ValidationError("unknown config key '" + k + "'");
  }
  PipelineConfig c;
  try {
    if (j.contains("input")) c.input = j["input"].get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("backend")) c.backend.kind = parse_backend_kind(j["backend"].get<std::string>());
    if (j.contains("endpoint")) c.backend.remote.endpoint = j["endpoint"].get<std::string>();
    if (j.contains("batch_size")) c.backend.remote.batch_size = j["batch_size"].get<int>();
    if (j.contains("timeout_ms")) c.backend.remote.timeout = std::chrono::milliseconds(j["timeout_ms"].get<int>());
    if (j.contains("max_in_flight")) c.backend.remote.max_in_flight = j["max_in_flight"].get<int>();
    if (j.contains("retries")) c.backend.remote.retries = j["retries"].get<int>();
    if (j.contains("question_generator")) c.backend.question_generator = j["question_generator"].get<std::string>();
    if (j.contains("precomputed_scores")) c.backend.precomputed_scores = j["precomputed_scores"].get<std::string>();
    if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
    if (j.contains("tau")) c.tau = j["tau"].get<double>();
    if (j.contains("target_nodes")) c.target_nodes = j["target_nodes"].get<size_t>();
    if (j.contains("percentile")) c.chunking.percentile = j["percentile"].get<double>();
    if (j.contains("max_chars")) c.chunking.max_chars = j["max_chars"].get<size_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("path_length")) c.path_length = j["path_length"].get<size_t>();
    if (j.contains("split_train")) c.split_train = j["split_train"].get<double>();
    if (j.contains("split_validation")) c.split_validation = j["split_validation"].get<double>();
    if (j.contains("qg_references")) c.qg_references = j["qg_references"].get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

ordered_json PipelineConfig::to_json() const {
  return {{"input", input.string()},
          {"output_dir", output_dir.string()},
          {"backend", to_string(backend.kind)},
          {"endpoint", backend.remote.endpoint},
          {"batch_size", backend.remote.batch_size},
          {"timeout_ms", backend.remote.timeout.count()},
          {"max_in_flight", backend.remote.max_in_flight},
          {"retries", backend.remote.retries},
          {"question_generator", backend.question_generator},
          {"precomputed_scores", backend.precomputed_scores.string()},
          {"lambda", lambda},
          {"tau", tau},
          {"target_nodes", target_nodes},
          {"percentile", chunking.percentile},
          {"max_chars", chunking.max_chars},
          {"seed", seed},
          {"path_length", path_length},
          {"split_train", split_train},
          {"split_validation", split_validation},
          {"qg_references", qg_references.string()}};
}

// ---------------------------------------------------------------------------
// Backends

namespace {

bool uses_remote_generator(const BackendConfig& cfg) {
  if (!cfg.question_generator.empty()) return cfg.question_generator == "remote";
  return cfg.kind == BackendKind::kRemote;
}

}  // namespace

std::unique_ptr<Embedder> make_embedder(const BackendConfig& cfg, std::span<const std::string> corpus) {
  if (cfg.kind == BackendKind::kRemote) return std::make_unique<RemoteScorer>(cfg.remote);
  return std::make_unique<TfidfEmbedder>(corpus);
}

std::unique_ptr<SpecificityClassifier> make_classifier(const BackendConfig& cfg) {
  if (!cfg.precomputed_scores.empty()) {
    return std::make_unique<PrecomputedClassifier>(PrecomputedClassifier::load(cfg.precomputed_scores));
  }
  if (cfg.kind == BackendKind::kRemote) return std::make_unique<RemoteScorer>(cfg.remote);
  return std::make_unique<HierarchyOracle>();
}

std::unique_ptr<QuestionGenerator> make_generator(const BackendConfig& cfg) {
  if (uses_remote_generator(cfg)) return std::make_unique<RemoteScorer>(cfg.remote);
  return std::make_unique<TemplateQuestionGenerator>();
}

// ---------------------------------------------------------------------------
// Artifact rows

ordered_json chunk_to_json(const Chunk& c) {
  return {{"chunk_id", c.chunk_id},
          {"section_id", c.section_id.code()},
          {"text", c.text},
          {"span", {c.span.start, c.span.end}}};
}

Chunk chunk_from_json(const json& j) {
  try {
    Chunk c;
    c.chunk_id = j.at("chunk_id").get<std::string>();
    c.section_id = SectionId::parse(j.at("section_id").get<std::string>());
    c.text = j.at("text").get<std::string>();
    c.span = {j.at("span").at(0).get<size_t>(), j.at("span").at(1).get<size_t>()};
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed chunk row: ") + e.what());
  }
}

namespace {

ordered_json span_json(const Span& s) { return ordered_json::array({s.start, s.end}); }

ordered_json outline_to_json(const Outline& o) {
  ordered_json secs = ordered_json::array();
  for (const auto& s : o.sections) {
    secs.push_back({{"section_id", s.id.code()},
                    {"path", s.id.dotted()},
                    {"title", s.title},
                    {"parent", s.parent ? json(s.parent->code()) : json(nullptr)},
                    {"char_span", span_json(s.char_span)},
                    {"body_span", span_json(s.body_span)},
                    {"synthesized", s.synthesized}});
  }
  return {{"sections", secs},
          {"front_matter", o.front_matter ? span_json(*o.front_matter) : ordered_json(nullptr)},
          {"warnings", o.warnings}};
}

std::vector<Chunk> load_chunks(const fs::path& p) {
  std::vector<Chunk> out;
  for (const auto& row : read_jsonl(p)) out.push_back(chunk_from_json(row));
  return out;
}

std::vector<QuestionNode> load_questions(const fs::path& p) {
  std::vector<QuestionNode> out;
  for (const auto& row : read_jsonl(p)) {
    try {
      out.push_back(node_from_json(row));
    } catch (const json::exception& e) {
      throw ValidationError(p.string() + ": malformed question row: " + e.what());
    }
  }
  return out;
}

void attach_embeddings(std::vector<QuestionNode>& nodes, const fs::path& p) {
  std::map<std::string, EmbeddingVector> by_id;
  for (const auto& row : read_jsonl(p)) {
    EmbeddingVector v;
    v.values = row.at("vector").get<std::vector<double>>();
    by_id[row.at("node_id").get<std::string>()] = std::move(v);
  }
  for (auto& n : nodes) {
    auto it = by_id.find(n.node_id);
    if (it == by_id.end()) throw ValidationError("no embedding for node " + n.node_id + " in " + p.string());
    n.embedding = it->second;
  }
}

struct PairRow {
  std::string context_a, context_b;
  SectionId section_a, section_b;
  Relation label;
};

std::vector<PairRow> load_pairs(const fs::path& p) {
  std::vector<PairRow> out;
  auto rows = read_jsonl(p);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i == 0 && rows[i].contains("prng")) continue;
    const auto& r = rows[i];
    out.push_back({r.at("context_a").get<std::string>(), r.at("context_b").get<std::string>(),
                   SectionId::parse(r.at("section_a").get<std::string>()),
                   SectionId::parse(r.at("section_b").get<std::string>()),
                   parse_relation(r.at("label").get<std::string>())});
  }
  return out;
}

void warn(const std::string& stage, const std::string& msg) {
  std::cerr << "[" << stage << "] warning: " << msg << "\n";
}

// ---------------------------------------------------------------------------
// Stage plumbing

struct StagePlan {
  Stage stage;
  // (artifact file, stage producing it); the raw input file is handled separately.
  std::vector<std::pair<std::string, Stage>> inputs;
  std::vector<std::string> extra_inputs;  // external files (input markdown, score tables)
  ordered_json config;
};

StagePlan plan_for(Stage s, const PipelineConfig& c) {
  const std::string kind(to_string(c.backend.kind));
  const ordered_json remote = c.backend.kind == BackendKind::kRemote
                                  ? ordered_json(c.backend.remote.endpoint)
                                  : ordered_json(nullptr);
  StagePlan p{s, {}, {}, {}};
  switch (s) {
    case Stage::kIngest:
      p.extra_inputs.push_back(c.input.string());
      p.config = {{"backend", kind}, {"endpoint", remote},
                  {"percentile", c.chunking.percentile}, {"max_chars", c.chunking.max_chars}};
      break;
    case Stage::kPairs:
      p.inputs = {{std::string(artifacts::kChunks), Stage::kIngest}};
      p.config = {{"seed", c.seed}, {"split_train", c.split_train}, {"split_validation", c.split_validation}};
      break;
    case Stage::kQuestions:
      p.inputs = {{std::string(artifacts::kChunks), Stage::kIngest}};
      p.config = {{"generator", uses_remote_generator(c.backend) ? "remote" : "template"},
                  {"endpoint", uses_remote_generator(c.backend) ? ordered_json(c.backend.remote.endpoint)
                                                                : ordered_json(nullptr)},
                  {"max_context_chars", c.backend.remote.max_context_chars}};
      break;
    case Stage::kScore:
      p.inputs = {{std::string(artifacts::kQuestions), Stage::kQuestions}};
      p.config = {{"backend", kind}, {"endpoint", remote}};
      break;
    case Stage::kBuild:
      p.inputs = {{std::string(artifacts::kQuestions), Stage::kQuestions},
                  {std::string(artifacts::kEmbeddings), Stage::kScore}};
      if (!c.backend.precomputed_scores.empty()) p.extra_inputs.push_back(c.backend.precomputed_scores.string());
      p.config = {{"backend", kind}, {"endpoint", remote}, {"lambda", c.lambda}, {"tau", c.tau},
                  {"target_nodes", c.target_nodes}};
      break;
    case Stage::kExport:
      p.inputs = {{std::string(artifacts::kTree), Stage::kBuild}};
      p.config = ordered_json::object();
      break;
    case Stage::kEval:
      p.inputs = {{std::string(artifacts::kPairs), Stage::kPairs}};
      if (!c.backend.precomputed_scores.empty()) p.extra_inputs.push_back(c.backend.precomputed_scores.string());
      if (!c.qg_references.empty()) p.extra_inputs.push_back(c.qg_references.string());
      p.config = {{"backend", kind}, {"endpoint", remote},
                  {"generator", uses_remote_generator(c.backend) ? "remote" : "template"}};
      break;
  }
  return p;
}

bool needs_backend(Stage s) {
  return s == Stage::kIngest || s == Stage::kQuestions || s == Stage::kScore || s == Stage::kBuild ||
         s == Stage::kEval;
}

class Runner {
 public:
  Runner(const PipelineConfig& c) : cfg_(c), dir_(c.output_dir) {}

  fs::path at(std::string_view name) const { return dir_ / std::string(name); }

  // Writes an artifact and records it for the manifest.
  void put(std::string_view name, const std::string& bytes) {
    write_file(at(name), bytes);
    outputs_[std::string(name)] = sha256_hex(bytes);
  }
  void put_jsonl(std::string_view name, const std::vector<ordered_json>& rows) {
    std::string out;
    for (const auto& r : rows) out += dump_json(r) + "\n";
    put(name, out);
  }
  void put_json(std::string_view name, const ordered_json& j) {
    put(name, j.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n");
  }

  ordered_json take_outputs() {
    ordered_json o = std::move(outputs_);
    outputs_ = ordered_json::object();
    return o;
  }

  void run(Stage s);

 private:
  void ingest();
  void pairs();
  void questions();
  void score();
  void build();
  void export_graphs();
  void eval();

  const PipelineConfig& cfg_;
  fs::path dir_;
  ordered_json outputs_ = ordered_json::object();
};

void Runner::run(Stage s) {
  switch (s) {
    case Stage::kIngest: return ingest();
    case Stage::kPairs: return pairs();
    case Stage::kQuestions: return questions();
    case Stage::kScore: return score();
    case Stage::kBuild: return build();
    case Stage::kExport: return export_graphs();
    case Stage::kEval: return eval();
  }
}

void Runner::ingest() {
  const std::string doc = read_file(cfg_.input);
  Outline outline = parse_outline(doc);
  for (const auto& w : outline.warnings) warn("ingest", w);

  std::vector<std::string> corpus;
  for (const auto& sec : outline.sections) {
    for (Span u : paragraph_units(doc, sec.body_span, cfg_.chunking.max_chars)) {
      corpus.emplace_back(doc.substr(u.start, u.size()));
    }
  }
  auto embedder = make_embedder(cfg_.backend, corpus);
  auto chunks = chunk_sections(outline, doc, *embedder, cfg_.chunking);

  put_json(artifacts::kOutline, outline_to_json(outline));
  std::vector<ordered_json> rows;
  for (const auto& c : chunks) rows.push_back(chunk_to_json(c));
  put_jsonl(artifacts::kChunks, rows);
}

void Runner::pairs() {
  auto chunks = load_chunks(at(artifacts::kChunks));
  const uint64_t seed = stage_seed(cfg_.seed, "pairs");
  PairDataset ds = build_pair_dataset(chunks, seed);
  put_jsonl(artifacts::kPairs, ds.to_jsonl());
  ordered_json stats = ds.stats.to_json();
  stats["table"] = ds.stats.to_table();
  put_json(artifacts::kPairStats, stats);

  if (cfg_.split_train > 0 || cfg_.split_validation > 0) {
    PairSplit split = split_pairs(ds.pairs, cfg_.split_train, cfg_.split_validation, seed ^ 0x5bd1e995u);
    auto rows = [&](const std::vector<PairExample>& v) {
      PairDataset part{seed, v, dataset_stats(chunks, v)};
      return part.to_jsonl();
    };
    put_jsonl("pairs_train.jsonl", rows(split.train));
    put_jsonl("pairs_validation.jsonl", rows(split.validation));
    put_jsonl("pairs_test.jsonl", rows(split.test));
  }
}

void Runner::questions() {
  auto chunks = load_chunks(at(artifacts::kChunks));
  if (chunks.empty()) throw ValidationError("no chunks to generate questions from");
  std::vector<std::string> contexts;
  for (const auto& c : chunks) contexts.push_back(c.text);
  auto generator = make_generator(cfg_.backend);
  auto generated = generator->generate(contexts);
  if (generated.size() != chunks.size()) throw BackendError("generator returned wrong batch size");

  std::vector<ordered_json> rows;
  for (size_t i = 0; i < chunks.size(); ++i) {
    QuestionNode n;
    n.node_id = "q" + chunks[i].chunk_id;
    n.question = generated[i].text;
    n.context = chunks[i].text;
    n.chunk_id = chunks[i].chunk_id;
    n.section_id = chunks[i].section_id;
    ordered_json row = node_to_json(n);
    row["truncated"] = generated[i].truncated;
    if (generated[i].truncated) warn("questions", "context of chunk " + n.chunk_id + " truncated");
    rows.push_back(std::move(row));
  }
  put_jsonl(artifacts::kQuestions, rows);
}

void Runner::score() {
  auto nodes = load_questions(at(artifacts::kQuestions));
  std::vector<std::string> corpus;
  for (const auto& n : nodes) corpus.push_back(question_context_text(n.question, n.context));
  auto embedder = make_embedder(cfg_.backend, corpus);
  embed_nodes(nodes, *embedder);
  std::vector<ordered_json> rows;
  for (const auto& n : nodes) rows.push_back({{"node_id", n.node_id}, {"vector", n.embedding.values}});
  put_jsonl(artifacts::kEmbeddings, rows);
}

void Runner::build() {
  auto nodes = load_questions(at(artifacts::kQuestions));
  attach_embeddings(nodes, at(artifacts::kEmbeddings));
  auto classifier = make_classifier(cfg_.backend);

  ReduceResult reduced = reduce_nodes(std::move(nodes), cfg_.target_nodes, *classifier);
  QuestionGraph complete = build_weighted_graph(std::move(reduced.nodes), *classifier, cfg_.lambda);
  complete.merge_log = std::move(reduced.merge_log);
  put_json(artifacts::kCompleteGraph, graph_to_json(complete));

  ThresholdReport tr = threshold_filter(complete, cfg_.tau);
  put_json(artifacts::kThreshold, tr.to_json());

  QuestionGraph tree = max_spanning_tree(complete);
  put_json(artifacts::kTree, graph_to_json(tree));
}

void Runner::export_graphs() {
  QuestionGraph tree = import_graph_json(read_file(at(artifacts::kTree)));
  put(artifacts::kDqmJson, export_graph(tree, GraphFormat::kJson));
  put(artifacts::kDqmDot, export_graph(tree, GraphFormat::kDot));
  put(artifacts::kDqmGraphml, export_graph(tree, GraphFormat::kGraphml));
}

void Runner::eval() {
  auto rows = load_pairs(at(artifacts::kPairs));
  auto classifier = make_classifier(cfg_.backend);
  std::vector<PairQuery> queries;
  std::vector<Relation> gold, predicted;
  for (const auto& r : rows) {
    queries.push_back({"", r.context_a, "", r.context_b, r.section_a, r.section_b, "", ""});
    gold.push_back(r.label);
  }
  auto dists = classifier->classify(queries);
  if (dists.size() != queries.size()) throw BackendError("classifier returned wrong batch size");
  for (const auto& d : dists) predicted.push_back(d.argmax());
  MetricReport report = classification_report(gold, predicted);

  if (!cfg_.qg_references.empty()) {
    std::vector<std::string> contexts;
    std::vector<std::vector<std::string>> refs;
    for (const auto& row : read_jsonl(cfg_.qg_references)) {
      contexts.push_back(row.at("context").get<std::string>());
      refs.push_back(row.at("references").get<std::vector<std::string>>());
    }
    auto generator = make_generator(cfg_.backend);
    std::vector<std::string> candidates;
    for (auto& g : generator->generate(contexts)) candidates.push_back(std::move(g.text));
    attach_generation_metrics(report, candidates, refs);
  }
  put_json(artifacts::kReport, report.to_json());
  put(artifacts::kReportTable, report.to_table());
}

ordered_json load_manifest(const fs::path& p) {
  if (!fs::exists(p)) return ordered_json::object();
  try {
    return ordered_json::parse(read_file(p));
  } catch (const json::exception&) {
    return ordered_json::object();
  }
}

bool outputs_intact(const fs::path& dir, const ordered_json& outputs) {
  for (const auto& [name, hash] : outputs.items()) {
    if (!fs::exists(dir / name)) return false;
    if (sha256_hex(read_file(dir / name)) != hash.get<std::string>()) return false;
  }
  return true;
}

}  // namespace

RunResult run_pipeline(const PipelineConfig& config, std::span<const Stage> requested, bool force) {
  config.validate();
  std::set<Stage> wanted(requested.begin(), requested.end());
  fs::create_directories(config.output_dir);
  Runner runner(config);
  RunResult result;
  result.manifest_path = config.output_dir / std::string(artifacts::kManifest);

  ordered_json manifest = load_manifest(result.manifest_path);
  if (!manifest.contains("stages") || !manifest["stages"].is_object()) manifest["stages"] = ordered_json::object();

  bool backend_checked = false;
  for (Stage s : kAllStages) {
    if (!wanted.count(s)) continue;
    const std::string name(to_string(s));
    StagePlan plan = plan_for(s, config);

    // Input hashes; a missing artifact names the stage that produces it.
    ordered_json inputs = ordered_json::object();
    for (const auto& [file, producer] : plan.inputs) {
      fs::path p = config.output_dir / file;
      if (!fs::exists(p)) throw MissingArtifactError(std::string(to_string(producer)));
      inputs[file] = sha256_hex(read_file(p));
    }
    for (const auto& ext : plan.extra_inputs) {
      if (ext.empty()) throw ValidationError("stage " + name + " needs an input file (--input)");
      if (!fs::exists(ext)) throw ValidationError("input file not found: " + ext);
      inputs[ext] = sha256_hex(read_file(ext));
    }
    const std::string config_hash = sha256_hex(dump_json(plan.config));

    StageRecord rec;
    rec.stage = name;
    rec.config_hash = config_hash;
    rec.inputs = inputs;

    const auto& prev = manifest["stages"].contains(name) ? manifest["stages"][name] : ordered_json(nullptr);
    if (!force && prev.is_object() && prev.value("config_hash", "") == config_hash &&
        prev.contains("inputs") && prev["inputs"] == inputs && prev.contains("outputs") &&
        outputs_intact(config.output_dir, prev["outputs"])) {
      rec.skipped = true;
      rec.outputs = prev["outputs"];
      rec.duration_ms = 0.0;
      result.stages.push_back(std::move(rec));
      continue;
    }

    if (config.backend.kind == BackendKind::kRemote && needs_backend(s) && !backend_checked) {
      try {
        RemoteScorer(config.backend.remote).health();
      } catch (const BackendError& e) {
        throw BackendError(std::string("backend unreachable: ") + e.what());
      }
      backend_checked = true;
    }

    auto t0 = std::chrono::steady_clock::now();
    runner.run(s);
    auto t1 = std::chrono::steady_clock::now();
    rec.outputs = runner.take_outputs();
    rec.duration_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    manifest["stages"][name] = {{"stage", name},
                                {"seed", stage_seed(config.seed, name)},
                                {"config_hash", rec.config_hash},
                                {"inputs", rec.inputs},
                                {"outputs", rec.outputs},
                                {"duration_ms", rec.duration_ms}};
    manifest["config"] = config.to_json();
    write_file(result.manifest_path, manifest.dump(2) + "\n");
    result.stages.push_back(std::move(rec));
  }
  return result;
}

}  // namespace dqm
