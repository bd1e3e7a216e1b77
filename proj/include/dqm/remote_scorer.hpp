#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <json.hpp>

#include "dqm/scoring.hpp"

namespace dqm {

struct RemoteConfig {
  std::string endpoint;  // e.g. "http://127.0.0.1:8080"
  int batch_size = 16;
  std::chrono::milliseconds timeout{30000};
  int max_in_flight = 4;
  int retries = 2;
  std::chrono::milliseconds backoff{200};  // doubled per retry
  size_t max_context_chars = 4000;         // longer contexts are truncated for /v1/generate
  double sum_tolerance = 1e-3;

  void validate() const;
};

// Client for the scorer wire protocol:
//   POST /v1/embed       {"texts":[str]}                       -> {"vectors":[[num]]}
//   POST /v1/specificity {"pairs":[{"q_a","c_a","q_b","c_b"}]} -> {"distributions":[{"general","specific","other"}]}
//   POST /v1/generate    {"contexts":[str]}                    -> {"questions":[str]}
//   GET  /health                                               -> {"status":"ok","model_ids":{...}}
// Requests are split into batches of batch_size and dispatched on at most
// max_in_flight concurrent connections; results keep request order.
class RemoteScorer final : public Embedder, public SpecificityClassifier, public QuestionGenerator {
 public:
  explicit RemoteScorer(RemoteConfig config);

  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;
  std::vector<SpecificityDistribution> classify(std::span<const PairQuery> pairs) const override;
  std::vector<GeneratedQuestion> generate(std::span<const std::string> contexts) const override;

  // Throws BackendError unless the service reports status "ok".
  nlohmann::json health() const;

  const RemoteConfig& config() const noexcept { return config_; }

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body) const;

  RemoteConfig config_;
};

}  // namespace dqm
