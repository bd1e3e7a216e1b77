#include "dqm/tfidf.hpp"

#include <cctype>
#include <cmath>
#include <set>

#include "dqm/error.hpp"

namespace dqm {

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

TfidfEmbedder::TfidfEmbedder(std::span<const std::string> corpus) {
  std::map<std::string, size_t, std::less<>> df;
  for (const auto& doc : corpus) {
    auto toks = word_tokens(doc);
    std::set<std::string> uniq(toks.begin(), toks.end());
    for (const auto& t : uniq) ++df[t];
  }
  const double n = static_cast<double>(corpus.size());
  idf_.reserve(df.size());
  for (const auto& [term, count] : df) {
    index_.emplace(term, idf_.size());
    idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
}

double TfidfEmbedder::idf(std::string_view term) const {
  auto it = index_.find(term);
  return it == index_.end() ? 0.0 : idf_[it->second];
}

std::vector<EmbeddingVector> TfidfEmbedder::embed(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    if (text.empty()) throw BackendError("tfidf: empty text has a zero vector");
    EmbeddingVector v;
    v.values.assign(idf_.size(), 0.0);
    for (const auto& tok : word_tokens(text)) {
      auto it = index_.find(tok);
      if (it != index_.end()) v.values[it->second] += 1.0;
    }
    for (size_t i = 0; i < v.values.size(); ++i) v.values[i] *= idf_[i];
    if (v.norm() == 0.0) {
      throw BackendError("tfidf: text has no in-vocabulary terms (zero vector): '" +
                         text.substr(0, 40) + "'");
    }
    v.normalize();
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace dqm
