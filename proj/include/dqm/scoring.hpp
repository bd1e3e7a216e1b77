#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dqm/section_id.hpp"

namespace dqm {

// Dense fixed-length embedding. Backends return unit-norm vectors.
struct EmbeddingVector {
  std::vector<double> values;

  size_t dim() const noexcept { return values.size(); }
  double norm() const noexcept;
  // Scales to unit L2 norm. Throws BackendError on a zero vector.
  void normalize();
};

// Throws ValidationError on dimension mismatch or a zero vector.
double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

// Softmax output of the specificity classifier for an ordered pair (a, b):
// general means a is more general than b.
struct SpecificityDistribution {
  double p_general = 0.0;
  double p_specific = 0.0;
  double p_other = 0.0;

  // Throws ValidationError when a value leaves [0,1] or the sum leaves 1 +- tol.
  void validate(double tol = 1e-6) const;
  // Ties resolve general, then specific, then other.
  Relation argmax() const noexcept;
  // Distribution for the reversed pair (b, a).
  SpecificityDistribution swapped() const noexcept { return {p_specific, p_general, p_other}; }
};

// eta = 1 - p_other.
double specificity_confidence(const SpecificityDistribution& dist) noexcept;

// Text the embedder sees for a question bound to its context: q + " " + c.
std::string question_context_text(std::string_view question, std::string_view context);

// One (q_a, c_a) vs (q_b, c_b) classification request. Section ids and node
// ids are optional metadata used by the offline oracle and precomputed scores.
struct PairQuery {
  std::string q_a, c_a, q_b, c_b;
  std::optional<SectionId> section_a, section_b;
  std::string id_a, id_b;
};

struct GeneratedQuestion {
  std::string text;
  // Context was cut to the backend limit before generation.
  bool truncated = false;
};

// Backend interfaces. Implementations must tolerate concurrent calls.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const = 0;
};

class SpecificityClassifier {
 public:
  virtual ~SpecificityClassifier() = default;
  virtual std::vector<SpecificityDistribution> classify(std::span<const PairQuery> pairs) const = 0;
};

class QuestionGenerator {
 public:
  virtual ~QuestionGenerator() = default;
  virtual std::vector<GeneratedQuestion> generate(std::span<const std::string> contexts) const = 0;
};

// xi = max(0, cos(embed(q_i + " " + c_i), embed(q_j + " " + c_j))).
double question_similarity(std::string_view q_i, std::string_view c_i, std::string_view q_j,
                           std::string_view c_j, const Embedder& embedder);

// Clamp used for xi: negative cosines become 0.
double clamp_similarity(double cosine) noexcept;

SpecificityDistribution classify_specificity(const PairQuery& pair,
                                             const SpecificityClassifier& classifier);

std::string generate_question(const std::string& context, const QuestionGenerator& generator);

// Test-only classifier: reads the section relationship of the two source
// chunks and answers 0.98 on the true class, 0.01 on the others.
class HierarchyOracle final : public SpecificityClassifier {
 public:
  static constexpr double kTrueMass = 0.98;
  static constexpr double kOtherMass = 0.01;
  std::vector<SpecificityDistribution> classify(std::span<const PairQuery> pairs) const override;
};

// "What does the following describe: <first 8 words of the context>?"
class TemplateQuestionGenerator final : public QuestionGenerator {
 public:
  static constexpr int kWords = 8;
  std::vector<GeneratedQuestion> generate(std::span<const std::string> contexts) const override;
};

}  // namespace dqm
