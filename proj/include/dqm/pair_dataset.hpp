#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dqm/chunker.hpp"

namespace dqm {

struct PairExample {
  std::string chunk_a, chunk_b;
  std::string context_a, context_b;
  SectionId section_a, section_b;
  Relation label = Relation::kOther;
};

struct PairDatasetStats {
  size_t n_chunks = 0;
  size_t n_pairs = 0;
  size_t n_general = 0;
  size_t n_specific = 0;
  size_t n_other = 0;
  size_t n_chapters = 0;  // distinct top-level sections among chunks
  size_t n_sections = 0;  // distinct section ids among chunks
  double depth_avg = 0.0; // mean section depth over chunks
  int depth_max = 0;

  nlohmann::ordered_json to_json() const;
  // Two-column "Description / Value" table.
  std::string to_table() const;
};

// Identifies the sampling procedure recorded in the JSONL header.
inline constexpr std::string_view kPairSamplerId = "mt19937_64/selection-sampling-S";

struct PairDataset {
  uint64_t seed = 0;
  std::vector<PairExample> pairs;
  PairDatasetStats stats;

  // Header line followed by one object per pair.
  std::vector<nlohmann::ordered_json> to_jsonl() const;
};

// Builds P general pairs (every ordered chunk pair whose sections are in a
// direct parent -> child relation), the same P pairs swapped as specific, and
// P other pairs drawn uniformly without replacement from the remaining
// ordered pairs of distinct chunks. Throws ValidationError for a degenerate
// hierarchy or too few other candidates.
PairDataset build_pair_dataset(std::span<const Chunk> chunks, uint64_t seed);

PairDatasetStats dataset_stats(std::span<const Chunk> chunks, std::span<const PairExample> pairs);

struct PairSplit {
  std::vector<PairExample> train, validation, test;
};

// Seeded shuffle, then train / validation / test by ratio; test takes the rest.
PairSplit split_pairs(std::span<const PairExample> pairs, double train_ratio, double validation_ratio,
                      uint64_t seed);

}  // namespace dqm
