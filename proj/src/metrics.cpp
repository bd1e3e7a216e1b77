#include "dqm/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

#include "dqm/error.hpp"

namespace dqm {
namespace {

using NgramCounts = std::map<std::vector<std::string>, size_t>;

NgramCounts ngrams(const std::vector<std::string>& toks, int n) {
  NgramCounts out;
  if (toks.size() < static_cast<size_t>(n)) return out;
  for (size_t i = 0; i + n <= toks.size(); ++i) {
    ++out[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
  }
  return out;
}

struct BleuStats {
  std::vector<size_t> matches, totals;
  size_t cand_len = 0, ref_len = 0;
};

void accumulate(BleuStats& s, const std::vector<std::string>& cand,
                const std::vector<std::vector<std::string>>& refs, int max_n) {
  s.cand_len += cand.size();
  size_t best = refs.front().size();
  for (const auto& r : refs) {
    auto d = [&](size_t len) { return len > cand.size() ? len - cand.size() : cand.size() - len; };
    if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) best = r.size();
  }
  s.ref_len += best;
  for (int n = 1; n <= max_n; ++n) {
    auto c = ngrams(cand, n);
    NgramCounts max_ref;
    for (const auto& r : refs) {
      for (const auto& [g, cnt] : ngrams(r, n)) max_ref[g] = std::max(max_ref[g], cnt);
    }
    size_t m = 0, t = 0;
    for (const auto& [g, cnt] : c) {
      t += cnt;
      auto it = max_ref.find(g);
      if (it != max_ref.end()) m += std::min(cnt, it->second);
    }
    s.matches[n - 1] += m;
    s.totals[n - 1] += t;
  }
}

BleuResult finish(const BleuStats& s, const BleuOptions& o) {
  BleuResult r;
  r.candidate_length = s.cand_len;
  r.reference_length = s.ref_len;
  if (s.cand_len == 0) {
    r.warnings.push_back("empty candidate; BLEU is 0");
    return r;
  }
  double log_sum = 0.0;
  bool zero = false;
  for (int n = 1; n <= o.max_n; ++n) {
    double m = static_cast<double>(s.matches[n - 1]), t = static_cast<double>(s.totals[n - 1]);
    if (o.smooth && n >= 2) {
      m += 1.0;
      t += 1.0;
    }
    double p = t > 0 ? m / t : 0.0;
    r.precisions.push_back(p);
    if (p <= 0.0) {
      zero = true;
    } else {
      log_sum += std::log(p);
    }
  }
  r.brevity_penalty = s.cand_len >= s.ref_len
                          ? 1.0
                          : std::exp(1.0 - static_cast<double>(s.ref_len) / static_cast<double>(s.cand_len));
  r.score = zero ? 0.0 : r.brevity_penalty * std::exp(log_sum / o.max_n);
  r.score = std::clamp(r.score, 0.0, 1.0);
  return r;
}

std::vector<std::vector<std::string>> tokenize_all(std::span<const std::string> texts) {
  std::vector<std::vector<std::string>> out;
  for (const auto& t : texts) out.push_back(metric_tokens(t));
  return out;
}

void check_options(const BleuOptions& o) {
  if (o.max_n < 1) throw ValidationError("BLEU max_n must be >= 1");
}

size_t index(Relation r) { return static_cast<size_t>(r); }

}  // namespace

std::vector<std::string> metric_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
      continue;
    }
    if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
    if (!std::isspace(c)) out.emplace_back(1, ch);
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

BleuResult bleu(std::string_view candidate, std::span<const std::string> references, const BleuOptions& options) {
  check_options(options);
  if (references.empty()) throw ValidationError("BLEU needs at least one reference");
  BleuStats s{std::vector<size_t>(options.max_n), std::vector<size_t>(options.max_n)};
  accumulate(s, metric_tokens(candidate), tokenize_all(references), options.max_n);
  return finish(s, options);
}

BleuResult corpus_bleu(std::span<const std::string> candidates,
                       std::span<const std::vector<std::string>> references, const BleuOptions& options) {
  check_options(options);
  if (candidates.size() != references.size()) {
    throw ValidationError("corpus BLEU: candidate and reference counts differ");
  }
  BleuStats s{std::vector<size_t>(options.max_n), std::vector<size_t>(options.max_n)};
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (references[i].empty()) throw ValidationError("corpus BLEU: item " + std::to_string(i) + " has no reference");
    accumulate(s, metric_tokens(candidates[i]), tokenize_all(references[i]), options.max_n);
  }
  return finish(s, options);
}

size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeL rouge_l(std::string_view candidate, std::string_view reference, double beta) {
  RougeL r;
  r.beta = beta;
  auto c = metric_tokens(candidate), ref = metric_tokens(reference);
  if (c.empty() || ref.empty()) {
    r.warnings.push_back("empty candidate or reference; ROUGE-L is 0");
    return r;
  }
  double lcs = static_cast<double>(lcs_length(c, ref));
  r.precision = lcs / static_cast<double>(c.size());
  r.recall = lcs / static_cast<double>(ref.size());
  if (lcs > 0) {
    double b2 = beta * beta;
    r.f = (1.0 + b2) * r.precision * r.recall / (r.recall + b2 * r.precision);
  }
  return r;
}

MetricReport classification_report(std::span<const Relation> gold, std::span<const Relation> predicted) {
  if (gold.size() != predicted.size()) {
    throw ValidationError("gold and predicted label lists differ in length (" + std::to_string(gold.size()) +
                          " vs " + std::to_string(predicted.size()) + ")");
  }
  MetricReport rep;
  rep.total = gold.size();
  size_t correct = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    ++rep.confusion[index(gold[i])][index(predicted[i])];
    correct += gold[i] == predicted[i];
  }
  for (size_t k = 0; k < 3; ++k) {
    auto& m = rep.per_class[k];
    m.label = kRelations[k];
    size_t tp = rep.confusion[k][k], pred = 0;
    for (size_t g = 0; g < 3; ++g) pred += rep.confusion[g][k];
    for (size_t p = 0; p < 3; ++p) m.support += rep.confusion[k][p];
    m.precision = pred ? static_cast<double>(tp) / static_cast<double>(pred) : 0.0;
    m.recall = m.support ? static_cast<double>(tp) / static_cast<double>(m.support) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    rep.macro_precision += m.precision / 3.0;
    rep.macro_recall += m.recall / 3.0;
    rep.macro_f1 += m.f1 / 3.0;
  }
  rep.accuracy = rep.total ? static_cast<double>(correct) / static_cast<double>(rep.total) : 0.0;
  return rep;
}

MetricReport classification_report(std::span<const std::string> gold, std::span<const std::string> predicted) {
  std::vector<Relation> g, p;
  for (const auto& s : gold) g.push_back(parse_relation(s));
  for (const auto& s : predicted) p.push_back(parse_relation(s));
  return classification_report(g, p);
}

void attach_generation_metrics(MetricReport& report, std::span<const std::string> candidates,
                               std::span<const std::vector<std::string>> references, const BleuOptions& options,
                               double beta) {
  report.has_generation = true;
  report.bleu_options = options;
  report.rouge_beta = beta;
  report.corpus_bleu = corpus_bleu(candidates, references, options).score;
  double sum = 0.0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    double best = 0.0;
    for (const auto& ref : references[i]) best = std::max(best, rouge_l(candidates[i], ref, beta).f);
    sum += best;
  }
  report.mean_rouge_l = candidates.empty() ? 0.0 : sum / static_cast<double>(candidates.size());
}

nlohmann::ordered_json MetricReport::to_json() const {
  nlohmann::ordered_json classes = nlohmann::ordered_json::object();
  for (const auto& m : per_class) {
    classes[std::string(to_string(m.label))] = {
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
  }
  nlohmann::ordered_json cm = nlohmann::ordered_json::array();
  for (const auto& row : confusion) cm.push_back(row);
  nlohmann::ordered_json j{{"classes", classes},
                           {"macro", {{"precision", macro_precision}, {"recall", macro_recall}, {"f1", macro_f1}}},
                           {"accuracy", accuracy},
                           {"total", total},
                           {"confusion_matrix", {{"labels", {"general", "specific", "other"}}, {"rows", cm}}}};
  if (has_generation) {
    j["generation"] = {{"corpus_bleu", corpus_bleu},
                       {"mean_rouge_l", mean_rouge_l},
                       {"bleu_max_n", bleu_options.max_n},
                       {"bleu_smoothing", bleu_options.smooth ? "add-one for n>=2" : "none"},
                       {"rouge_beta", rouge_beta}};
  }
  j["tokenizer"] = kMetricTokenizer;
  return j;
}

std::string MetricReport::to_table() const {
  auto row = [](const std::string& name, double p, double r, double f) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-10s %9.3f %9.3f %9.3f\n", name.c_str(), p, r, f);
    return std::string(buf);
  };
  char head[128];
  std::snprintf(head, sizeof head, "%-10s %9s %9s %9s\n", "", "Precision", "Recall", "F1-Score");
  std::string rule(40, '-');
  std::string out = head + rule + "\n";
  for (const auto& m : per_class) {
    std::string name(to_string(m.label));
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    out += row(name, m.precision, m.recall, m.f1);
  }
  out += rule + "\n";
  out += row("Average", macro_precision, macro_recall, macro_f1);
  return out;
}

}  // namespace dqm
