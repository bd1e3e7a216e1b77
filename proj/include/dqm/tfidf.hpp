#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dqm/scoring.hpp"

namespace dqm {

// Lowercased word-unigram tf-idf, fitted once on a corpus:
//   weight(t, d) = count(t, d) * (ln((1 + N) / (1 + df(t))) + 1)
// followed by L2 normalization. Terms outside the fitted vocabulary are
// ignored. The vector dimension is the vocabulary size, in sorted term order.
class TfidfEmbedder final : public Embedder {
 public:
  explicit TfidfEmbedder(std::span<const std::string> corpus);

  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;

  size_t vocabulary_size() const noexcept { return index_.size(); }
  double idf(std::string_view term) const;

 private:
  std::map<std::string, size_t, std::less<>> index_;
  std::vector<double> idf_;
};

// Lowercased runs of letters/digits (bytes >= 0x80 count as letters).
std::vector<std::string> word_tokens(std::string_view text);

}  // namespace dqm
