#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dqm/section_id.hpp"

namespace dqm {

// Lowercased; runs of letters/digits form tokens, every other non-space
// character is a token of its own.
std::vector<std::string> metric_tokens(std::string_view text);

inline constexpr std::string_view kMetricTokenizer = "lowercase-whitespace-punctuation";

struct BleuOptions {
  int max_n = 4;
  // Add-one on numerator and denominator of the n >= 2 precisions.
  bool smooth = true;
};

struct BleuResult {
  double score = 0.0;
  std::vector<double> precisions;
  double brevity_penalty = 0.0;
  size_t candidate_length = 0;
  size_t reference_length = 0;
  std::vector<std::string> warnings;
};

// Geometric mean of clipped n-gram precisions times the brevity penalty. The
// effective reference length is the closest one (shorter on ties).
BleuResult bleu(std::string_view candidate, std::span<const std::string> references,
                const BleuOptions& options = {});

// Counts pooled over all segments before the precisions are formed.
BleuResult corpus_bleu(std::span<const std::string> candidates,
                       std::span<const std::vector<std::string>> references, const BleuOptions& options = {});

struct RougeL {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  double beta = 1.2;
  std::vector<std::string> warnings;
};

// LCS-based: P = LCS/|cand|, R = LCS/|ref|, F = (1 + b^2) P R / (R + b^2 P).
RougeL rouge_l(std::string_view candidate, std::string_view reference, double beta = 1.2);

size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

struct ClassMetrics {
  Relation label = Relation::kGeneral;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  size_t support = 0;
};

inline constexpr std::array<Relation, 3> kRelations{Relation::kGeneral, Relation::kSpecific, Relation::kOther};

struct MetricReport {
  std::array<ClassMetrics, 3> per_class{};  // general, specific, other
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  // confusion[gold][predicted], indices in kRelations order.
  std::array<std::array<size_t, 3>, 3> confusion{};
  size_t total = 0;

  // Generation metrics, filled when a QG evaluation is attached.
  bool has_generation = false;
  double corpus_bleu = 0.0;
  double mean_rouge_l = 0.0;
  BleuOptions bleu_options;
  double rouge_beta = 1.2;

  nlohmann::ordered_json to_json() const;
  // Precision / Recall / F1-Score table, one row per class plus the macro average.
  std::string to_table() const;
};

MetricReport classification_report(std::span<const Relation> gold, std::span<const Relation> predicted);
// Labels as text; throws ValidationError on an unknown label.
MetricReport classification_report(std::span<const std::string> gold, std::span<const std::string> predicted);

// Corpus BLEU and mean ROUGE-L F over (candidate, references) items.
void attach_generation_metrics(MetricReport& report, std::span<const std::string> candidates,
                               std::span<const std::vector<std::string>> references,
                               const BleuOptions& options = {}, double beta = 1.2);

}  // namespace dqm
