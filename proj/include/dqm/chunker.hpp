#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dqm/outline.hpp"
#include "dqm/scoring.hpp"

namespace dqm {

struct ChunkingConfig {
  // Break where adjacent-paragraph similarity is below this percentile of the
  // section's adjacent similarities.
  double percentile = 25.0;
  size_t max_chars = 2000;

  void validate() const;
};

struct Chunk {
  std::string chunk_id;
  SectionId section_id;
  std::string text;
  Span span;
};

// Linear-interpolation percentile (numpy's default), p in [0, 100].
double percentile(std::vector<double> values, double p);

// Paragraph spans of `text` inside `range`: blank-line separated, trimmed of
// surrounding whitespace. Paragraphs without any letter or digit are folded
// into a neighbour; paragraphs longer than max_chars are split at whitespace.
std::vector<Span> paragraph_units(std::string_view text, Span range, size_t max_chars);

// Splits every section's own body into chunks. Section boundaries are always
// breakpoints; front matter is not chunked. Chunk ids are six-digit ordinals
// in document order.
std::vector<Chunk> chunk_sections(const Outline& outline, std::string_view document,
                                  const Embedder& embedder, const ChunkingConfig& config = {});

}  // namespace dqm
