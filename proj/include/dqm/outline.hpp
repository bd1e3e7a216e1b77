#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dqm/section_id.hpp"

namespace dqm {

// Half-open byte range [start, end) into the source document.
struct Span {
  size_t start = 0;
  size_t end = 0;

  size_t size() const noexcept { return end - start; }
  bool empty() const noexcept { return end <= start; }
  bool contains(const Span& o) const noexcept { return start <= o.start && o.end <= end; }
  friend bool operator==(const Span&, const Span&) = default;
};

struct SectionNode {
  SectionId id;
  std::string title;
  std::optional<SectionId> parent;
  // Heading line through the end of the last descendant.
  Span char_span;
  // Text owned directly by this section: after its heading line, up to the
  // next heading of any level.
  Span body_span;
  // True when the level was inserted to fill a heading-depth jump.
  bool synthesized = false;
};

struct Outline {
  // Sections in document order.
  std::vector<SectionNode> sections;
  // Text before the first heading, if any. Never chunked.
  std::optional<Span> front_matter;
  std::vector<std::string> warnings;

  const SectionNode* find(const SectionId& id) const;
};

// Parses ATX headings ('#' .. '#####') into a section forest. Numbering is
// ordinal by appearance per level. Heading markers inside fenced code blocks
// are ignored; '######' lines are treated as body text.
Outline parse_outline(std::string_view markdown);

}  // namespace dqm
