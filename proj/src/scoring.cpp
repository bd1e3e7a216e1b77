#include "dqm/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "dqm/error.hpp"

namespace dqm {

double EmbeddingVector::norm() const noexcept {
  double s = 0.0;
  for (double x : values) s += x * x;
  return std::sqrt(s);
}

void EmbeddingVector::normalize() {
  double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw BackendError("zero or non-finite embedding vector");
  for (double& x : values) x /= n;
}

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim()) {
    throw ValidationError("cosine of vectors with dims " + std::to_string(u.dim()) + " and " +
                          std::to_string(v.dim()));
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (size_t i = 0; i < u.dim(); ++i) {
    dot += u.values[i] * v.values[i];
    nu += u.values[i] * u.values[i];
    nv += v.values[i] * v.values[i];
  }
  if (nu == 0.0 || nv == 0.0) throw ValidationError("cosine similarity undefined for a zero vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

void SpecificityDistribution::validate(double tol) const {
  for (double p : {p_general, p_specific, p_other}) {
    if (!std::isfinite(p) || p < -tol || p > 1.0 + tol) {
      throw ValidationError("specificity probability " + std::to_string(p) + " outside [0,1]");
    }
  }
  double sum = p_general + p_specific + p_other;
  if (std::abs(sum - 1.0) > tol) {
    throw ValidationError("specificity distribution sums to " + std::to_string(sum));
  }
}

Relation SpecificityDistribution::argmax() const noexcept {
  if (p_general >= p_specific && p_general >= p_other) return Relation::kGeneral;
  if (p_specific >= p_other) return Relation::kSpecific;
  return Relation::kOther;
}

double specificity_confidence(const SpecificityDistribution& dist) noexcept {
  return std::clamp(1.0 - dist.p_other, 0.0, 1.0);
}

std::string question_context_text(std::string_view question, std::string_view context) {
  std::string s;
  s.reserve(question.size() + 1 + context.size());
  s.append(question);
  s.push_back(' ');
  s.append(context);
  return s;
}

double clamp_similarity(double cosine) noexcept { return std::clamp(cosine, 0.0, 1.0); }

double question_similarity(std::string_view q_i, std::string_view c_i, std::string_view q_j,
                           std::string_view c_j, const Embedder& embedder) {
  std::vector<std::string> texts{question_context_text(q_i, c_i), question_context_text(q_j, c_j)};
  auto vecs = embedder.embed(texts);
  if (vecs.size() != 2) throw BackendError("embedder returned wrong batch size");
  return clamp_similarity(cosine_similarity(vecs[0], vecs[1]));
}

SpecificityDistribution classify_specificity(const PairQuery& pair,
                                             const SpecificityClassifier& classifier) {
  auto out = classifier.classify(std::span<const PairQuery>(&pair, 1));
  if (out.size() != 1) throw BackendError("classifier returned wrong batch size");
  return out.front();
}

std::string generate_question(const std::string& context, const QuestionGenerator& generator) {
  auto out = generator.generate(std::span<const std::string>(&context, 1));
  if (out.size() != 1) throw BackendError("generator returned wrong batch size");
  return out.front().text;
}

std::vector<SpecificityDistribution> HierarchyOracle::classify(
    std::span<const PairQuery> pairs) const {
  std::vector<SpecificityDistribution> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (!p.section_a || !p.section_b) {
      throw BackendError("hierarchy oracle needs section metadata for both contexts");
    }
    SpecificityDistribution d{kOtherMass, kOtherMass, kOtherMass};
    switch (section_relationship(*p.section_a, *p.section_b)) {
      case Relation::kGeneral: d.p_general = kTrueMass; break;
      case Relation::kSpecific: d.p_specific = kTrueMass; break;
      case Relation::kOther: d.p_other = kTrueMass; break;
    }
    out.push_back(d);
  }
  return out;
}

namespace {

bool word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

std::vector<GeneratedQuestion> TemplateQuestionGenerator::generate(
    std::span<const std::string> contexts) const {
  std::vector<GeneratedQuestion> out;
  out.reserve(contexts.size());
  for (const auto& ctx : contexts) {
    std::istringstream in(ctx);
    std::string tok, words;
    int taken = 0;
    while (taken < kWords && in >> tok) {
      size_t b = 0, e = tok.size();
      while (b < e && !word_byte(static_cast<unsigned char>(tok[b]))) ++b;
      while (e > b && !word_byte(static_cast<unsigned char>(tok[e - 1]))) --e;
      if (b == e) continue;
      if (taken++) words.push_back(' ');
      words.append(tok, b, e - b);
    }
    if (taken == 0) throw ValidationError("cannot generate a question from an empty context");
    out.push_back({"What does the following describe: " + words + "?", false});
  }
  return out;
}

}  // namespace dqm
