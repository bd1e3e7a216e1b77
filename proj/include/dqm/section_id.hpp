#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dqm {

// Hierarchical section path, e.g. [1,4,3] for Section 1.4.3.
//
// The canonical textual form is "SECTION" followed by five zero-padded
// two-digit segments, unused trailing levels written as "00":
//   [1,4,3] <-> "SECTION0104030000"
class SectionId {
 public:
  static constexpr int kMaxDepth = 5;
  static constexpr int kMaxSegment = 99;
  static constexpr std::string_view kPrefix = "SECTION";

  SectionId() = default;

  // Throws ValidationError on depth outside [1,5] or a segment outside [1,99].
  static SectionId from_path(std::span<const int> path);
  static SectionId from_path(std::initializer_list<int> path) {
    return from_path(std::span<const int>(path.begin(), path.size()));
  }

  // Accepts "SECTION" plus 2..10 digits (even count); shorter codes are
  // zero-padded on the right. Throws ValidationError naming the offending
  // segment on an interior zero or a malformed code.
  static SectionId parse(std::string_view code);

  std::string code() const;
  const std::vector<int>& segments() const noexcept { return segments_; }
  int depth() const noexcept { return static_cast<int>(segments_.size()); }
  bool empty() const noexcept { return segments_.empty(); }

  // The id with the last segment dropped; empty for a top-level section.
  SectionId parent() const;
  // True iff `child` is exactly one level below *this with *this as prefix.
  bool is_parent_of(const SectionId& child) const noexcept;
  // Dotted form, "1.4.3".
  std::string dotted() const;

  friend bool operator==(const SectionId&, const SectionId&) = default;
  friend auto operator<=>(const SectionId& a, const SectionId& b) {
    return a.segments_ <=> b.segments_;
  }

 private:
  std::vector<int> segments_;
};

enum class Relation { kGeneral, kSpecific, kOther };

std::string_view to_string(Relation r) noexcept;
// Throws ValidationError on anything but "general", "specific", "other".
Relation parse_relation(std::string_view s);

// general iff a is the direct parent of b, specific iff b is the direct
// parent of a, other for everything else (equal, grandparent, sibling, ...).
Relation section_relationship(const SectionId& a, const SectionId& b) noexcept;

}  // namespace dqm
