#include "dqm/pair_dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>

#include "dqm/error.hpp"

namespace dqm {
namespace {

// Uniform double in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

PairExample make_pair(const Chunk& a, const Chunk& b, Relation label) {
  return {a.chunk_id, b.chunk_id, a.text, b.text, a.section_id, b.section_id, label};
}

}  // namespace

PairDataset build_pair_dataset(std::span<const Chunk> chunks, uint64_t seed) {
  const size_t n = chunks.size();
  PairDataset ds;
  ds.seed = seed;

  std::vector<PairExample> general;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (chunks[i].section_id.is_parent_of(chunks[j].section_id)) {
        general.push_back(make_pair(chunks[i], chunks[j], Relation::kGeneral));
      }
    }
  }
  const size_t p = general.size();
  if (p == 0) throw ValidationError("degenerate hierarchy: no parent-child chunk pairs");

  // Candidates for `other`: ordered pairs of distinct chunks related neither
  // parent->child nor child->parent.
  auto eligible = [&](size_t i, size_t j) {
    return i != j && section_relationship(chunks[i].section_id, chunks[j].section_id) == Relation::kOther;
  };
  size_t candidates = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) candidates += eligible(i, j);
  }
  if (candidates < p) {
    throw ValidationError("only " + std::to_string(candidates) + " other candidates for " +
                          std::to_string(p) + " required pairs (shortfall " +
                          std::to_string(p - candidates) + ")");
  }

  // Knuth's selection sampling (Algorithm S) over candidates in (i, j) order.
  std::mt19937_64 rng(seed);
  std::vector<PairExample> other;
  other.reserve(p);
  size_t seen = 0;
  for (size_t i = 0; i < n && other.size() < p; ++i) {
    for (size_t j = 0; j < n && other.size() < p; ++j) {
      if (!eligible(i, j)) continue;
      double remaining = static_cast<double>(candidates - seen);
      double needed = static_cast<double>(p - other.size());
      if (remaining * unit_draw(rng) < needed) {
        other.push_back(make_pair(chunks[i], chunks[j], Relation::kOther));
      }
      ++seen;
    }
  }

  ds.pairs.reserve(3 * p);
  ds.pairs.insert(ds.pairs.end(), general.begin(), general.end());
  for (const auto& g : general) {
    ds.pairs.push_back({g.chunk_b, g.chunk_a, g.context_b, g.context_a, g.section_b, g.section_a,
                        Relation::kSpecific});
  }
  ds.pairs.insert(ds.pairs.end(), other.begin(), other.end());
  ds.stats = dataset_stats(chunks, ds.pairs);
  return ds;
}

PairDatasetStats dataset_stats(std::span<const Chunk> chunks, std::span<const PairExample> pairs) {
  PairDatasetStats s;
  s.n_chunks = chunks.size();
  s.n_pairs = pairs.size();
  for (const auto& p : pairs) {
    switch (p.label) {
      case Relation::kGeneral: ++s.n_general; break;
      case Relation::kSpecific: ++s.n_specific; break;
      case Relation::kOther: ++s.n_other; break;
    }
  }
  std::set<int> chapters;
  std::set<SectionId> sections;
  double depth_sum = 0.0;
  for (const auto& c : chunks) {
    chapters.insert(c.section_id.segments().front());
    sections.insert(c.section_id);
    depth_sum += c.section_id.depth();
    s.depth_max = std::max(s.depth_max, c.section_id.depth());
  }
  s.n_chapters = chapters.size();
  s.n_sections = sections.size();
  if (!chunks.empty()) s.depth_avg = depth_sum / static_cast<double>(chunks.size());
  return s;
}

nlohmann::ordered_json PairDatasetStats::to_json() const {
  return {{"n_chunks", n_chunks},     {"n_pairs", n_pairs},       {"n_general", n_general},
          {"n_specific", n_specific}, {"n_other", n_other},       {"n_chapters", n_chapters},
          {"n_sections", n_sections}, {"depth_avg", depth_avg},   {"depth_max", depth_max}};
}

namespace {

std::string thousands(size_t v) {
  std::string digits = std::to_string(v), out;
  for (size_t i = 0; i < digits.size(); ++i) {
    if (i && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

}  // namespace

std::string PairDatasetStats::to_table() const {
  char depth[64];
  std::snprintf(depth, sizeof depth, "%.1f / %d", depth_avg, depth_max);
  const std::pair<std::string, std::string> rows[] = {
      {"# of chunks", thousands(n_chunks)},
      {"# of pair examples", thousands(n_pairs)},
      {"# of chapters / sections", thousands(n_chapters) + " / " + thousands(n_sections)},
      {"depth (avg / max)", depth},
  };
  size_t w1 = std::string("Description").size(), w2 = std::string("Value").size();
  for (const auto& [k, v] : rows) {
    w1 = std::max(w1, k.size());
    w2 = std::max(w2, v.size());
  }
  auto line = [&](const std::string& k, const std::string& v) {
    return k + std::string(w1 - k.size() + 2, ' ') + std::string(w2 - v.size(), ' ') + v + "\n";
  };
  std::string rule(w1 + 2 + w2, '-');
  std::string out = line("Description", "Value") + rule + "\n";
  for (const auto& [k, v] : rows) out += line(k, v);
  return out;
}

std::vector<nlohmann::ordered_json> PairDataset::to_jsonl() const {
  std::vector<nlohmann::ordered_json> rows;
  rows.reserve(pairs.size() + 1);
  rows.push_back({{"seed", seed}, {"prng", kPairSamplerId}, {"n_pairs", pairs.size()}});
  for (const auto& p : pairs) {
    rows.push_back({{"context_a", p.context_a},
                    {"context_b", p.context_b},
                    {"section_a", p.section_a.code()},
                    {"section_b", p.section_b.code()},
                    {"label", to_string(p.label)}});
  }
  return rows;
}

PairSplit split_pairs(std::span<const PairExample> pairs, double train_ratio, double validation_ratio,
                      uint64_t seed) {
  if (train_ratio < 0 || validation_ratio < 0 || train_ratio + validation_ratio > 1.0) {
    throw ValidationError("split ratios must be non-negative and sum to at most 1");
  }
  std::vector<size_t> order(pairs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Fisher-Yates with the same 53-bit draw as the sampler.
  std::mt19937_64 rng(seed);
  for (size_t i = order.size(); i > 1; --i) {
    auto j = static_cast<size_t>(unit_draw(rng) * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }
  const auto n_train = static_cast<size_t>(train_ratio * static_cast<double>(pairs.size()));
  const auto n_val = static_cast<size_t>(validation_ratio * static_cast<double>(pairs.size()));
  PairSplit out;
  for (size_t k = 0; k < order.size(); ++k) {
    auto& dst = k < n_train ? out.train : k < n_train + n_val ? out.validation : out.test;
    dst.push_back(pairs[order[k]]);
  }
  return out;
}

}  // namespace dqm
