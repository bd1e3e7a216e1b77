#include "dqm/section_id.hpp"

#include <cctype>

#include "dqm/error.hpp"

namespace dqm {

SectionId SectionId::from_path(std::span<const int> path) {
  if (path.empty()) throw ValidationError("section path is empty");
  if (path.size() > static_cast<size_t>(kMaxDepth)) {
    throw ValidationError("section path depth " + std::to_string(path.size()) +
                          " exceeds " + std::to_string(kMaxDepth));
  }
  SectionId id;
  for (size_t i = 0; i < path.size(); ++i) {
    if (path[i] < 1 || path[i] > kMaxSegment) {
      throw ValidationError("section segment " + std::to_string(i + 1) + " = " +
                            std::to_string(path[i]) + " is outside [1, 99]");
    }
    id.segments_.push_back(path[i]);
  }
  return id;
}

SectionId SectionId::parse(std::string_view code) {
  if (code.substr(0, kPrefix.size()) != kPrefix) {
    throw ValidationError("section code '" + std::string(code) + "' lacks the SECTION prefix");
  }
  std::string_view digits = code.substr(kPrefix.size());
  if (digits.empty() || digits.size() % 2 != 0 || digits.size() > 2 * kMaxDepth) {
    throw ValidationError("section code '" + std::string(code) +
                          "' must carry an even number of digits, at most 10");
  }
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw ValidationError("section code '" + std::string(code) + "' has a non-digit");
    }
  }
  SectionId id;
  bool seen_zero = false;
  for (size_t i = 0; i < digits.size(); i += 2) {
    int seg = (digits[i] - '0') * 10 + (digits[i + 1] - '0');
    size_t level = i / 2 + 1;
    if (seg == 0) {
      seen_zero = true;
      continue;
    }
    if (seen_zero) {
      throw ValidationError("section code '" + std::string(code) + "': segment " +
                            std::to_string(level) + " follows a zero segment");
    }
    id.segments_.push_back(seg);
  }
  if (id.segments_.empty()) {
    throw ValidationError("section code '" + std::string(code) + "': segment 1 is zero");
  }
  return id;
}

std::string SectionId::code() const {
  std::string out(kPrefix);
  for (int level = 0; level < kMaxDepth; ++level) {
    int seg = level < depth() ? segments_[level] : 0;
    out.push_back(static_cast<char>('0' + seg / 10));
    out.push_back(static_cast<char>('0' + seg % 10));
  }
  return out;
}

SectionId SectionId::parent() const {
  SectionId p;
  if (segments_.size() > 1) p.segments_.assign(segments_.begin(), segments_.end() - 1);
  return p;
}

bool SectionId::is_parent_of(const SectionId& child) const noexcept {
  if (empty() || child.segments_.size() != segments_.size() + 1) return false;
  for (size_t i = 0; i < segments_.size(); ++i) {
    if (segments_[i] != child.segments_[i]) return false;
  }
  return true;
}

std::string SectionId::dotted() const {
  std::string out;
  for (size_t i = 0; i < segments_.size(); ++i) {
    if (i) out.push_back('.');
    out += std::to_string(segments_[i]);
  }
  return out;
}

std::string_view to_string(Relation r) noexcept {
  switch (r) {
    case Relation::kGeneral: return "general";
    case Relation::kSpecific: return "specific";
    case Relation::kOther: return "other";
  }
  return "other";
}

Relation parse_relation(std::string_view s) {
  if (s == "general") return Relation::kGeneral;
  if (s == "specific") return Relation::kSpecific;
  if (s == "other") return Relation::kOther;
  throw ValidationError("unknown relation label '" + std::string(s) + "'");
}

Relation section_relationship(const SectionId& a, const SectionId& b) noexcept {
  if (a.is_parent_of(b)) return Relation::kGeneral;
  if (b.is_parent_of(a)) return Relation::kSpecific;
  return Relation::kOther;
}

}  // namespace dqm
