#include "dqm/chunker.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "dqm/error.hpp"

namespace dqm {
namespace {

bool space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

bool has_word(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char ch) {
    auto c = static_cast<unsigned char>(ch);
    return std::isalnum(c) || c >= 0x80;
  });
}

Span trim_span(std::string_view text, Span s) {
  while (s.start < s.end && space(text[s.start])) ++s.start;
  while (s.end > s.start && space(text[s.end - 1])) --s.end;
  return s;
}

// Cuts an oversized span at the last whitespace that keeps each piece within
// max_chars; hard cut (on a UTF-8 boundary) when a piece has no whitespace.
void split_long(std::string_view text, Span s, size_t max_chars, std::vector<Span>& out) {
  while (s.size() > max_chars) {
    size_t limit = s.start + max_chars;
    size_t cut = limit;
    while (cut > s.start && !space(text[cut])) --cut;
    if (cut == s.start) {
      cut = limit;
      while (cut > s.start + 1 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
    }
    Span head = trim_span(text, {s.start, cut});
    if (!head.empty()) out.push_back(head);
    s = trim_span(text, {cut, s.end});
  }
  if (!s.empty()) out.push_back(s);
}

std::string chunk_id(size_t ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06zu", ordinal);
  return buf;
}

}  // namespace

void ChunkingConfig::validate() const {
  if (!(percentile >= 0.0 && percentile <= 100.0)) throw ValidationError("percentile must be in [0, 100]");
  if (max_chars < 1) throw ValidationError("max_chars must be >= 1");
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw ValidationError("percentile of an empty list");
  std::sort(values.begin(), values.end());
  double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  auto lo = static_cast<size_t>(std::floor(pos));
  size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<Span> paragraph_units(std::string_view text, Span range, size_t max_chars) {
  // Blank-line separated raw paragraphs.
  std::vector<Span> raw;
  size_t pos = range.start, para_start = range.start;
  bool in_para = false;
  while (pos < range.end) {
    size_t nl = text.find('\n', pos);
    size_t line_end = (nl == std::string_view::npos || nl >= range.end) ? range.end : nl;
    size_t next = line_end < range.end ? line_end + 1 : range.end;
    bool blank = trim_span(text, {pos, line_end}).empty();
    if (blank) {
      if (in_para) raw.push_back(trim_span(text, {para_start, pos}));
      in_para = false;
    } else if (!in_para) {
      in_para = true;
      para_start = pos;
    }
    pos = next;
  }
  if (in_para) raw.push_back(trim_span(text, {para_start, range.end}));

  // Fold word-less paragraphs (rules, stray markup) into a neighbour.
  std::vector<Span> merged;
  bool pending = false;
  Span carry{};
  for (Span p : raw) {
    bool words = has_word(text.substr(p.start, p.size()));
    if (!words) {
      if (!merged.empty()) {
        merged.back().end = p.end;
      } else if (pending) {
        carry.end = p.end;
      } else {
        carry = p;
        pending = true;
      }
      continue;
    }
    if (pending) {
      p.start = carry.start;
      pending = false;
    }
    merged.push_back(p);
  }
  if (pending) merged.push_back(carry);

  std::vector<Span> units;
  for (Span p : merged) split_long(text, p, max_chars, units);
  return units;
}

std::vector<Chunk> chunk_sections(const Outline& outline, std::string_view document,
                                  const Embedder& embedder, const ChunkingConfig& config) {
  config.validate();
  struct SectionUnits {
    const SectionNode* section;
    std::vector<Span> units;
    size_t first_text = 0;  // index into the batched embedding request
  };
  std::vector<SectionUnits> work;
  std::vector<std::string> texts;
  for (const auto& sec : outline.sections) {
    SectionUnits su{&sec, paragraph_units(document, sec.body_span, config.max_chars)};
    if (su.units.size() >= 2) {
      su.first_text = texts.size();
      for (Span u : su.units) texts.emplace_back(document.substr(u.start, u.size()));
    }
    work.push_back(std::move(su));
  }
  std::vector<EmbeddingVector> vecs;
  if (!texts.empty()) {
    vecs = embedder.embed(texts);
    if (vecs.size() != texts.size()) throw BackendError("embedder returned wrong batch size");
  }

  std::vector<Chunk> chunks;
  auto emit = [&](const SectionNode& sec, Span s) {
    chunks.push_back({chunk_id(chunks.size()), sec.id, std::string(document.substr(s.start, s.size())), s});
  };
  for (const auto& su : work) {
    const auto& units = su.units;
    if (units.empty()) continue;
    if (units.size() == 1) {
      emit(*su.section, units.front());
      continue;
    }
    std::vector<double> sims;
    for (size_t i = 0; i + 1 < units.size(); ++i) {
      sims.push_back(cosine_similarity(vecs[su.first_text + i], vecs[su.first_text + i + 1]));
    }
    const double threshold = percentile(sims, config.percentile);
    Span cur = units.front();
    for (size_t i = 0; i + 1 < units.size(); ++i) {
      const Span next = units[i + 1];
      bool semantic_break = sims[i] < threshold;
      bool too_long = next.end - cur.start > config.max_chars;
      if (semantic_break || too_long) {
        emit(*su.section, cur);
        cur = next;
      } else {
        cur.end = next.end;
      }
    }
    emit(*su.section, cur);
  }
  return chunks;
}

}  // namespace dqm
