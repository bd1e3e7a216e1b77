#include "dqm/outline.hpp"

#include <algorithm>
#include <array>

#include "dqm/error.hpp"

namespace dqm {
namespace {

struct Line {
  size_t start;     // offset of first byte
  size_t end;       // offset of '\n' or document end
  size_t next;      // offset of the following line
};

std::vector<Line> split_lines(std::string_view doc) {
  std::vector<Line> lines;
  size_t pos = 0;
  while (pos < doc.size()) {
    size_t nl = doc.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back({pos, doc.size(), doc.size()});
      break;
    }
    lines.push_back({pos, nl, nl + 1});
    pos = nl + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

// Up to three spaces of indentation, as CommonMark allows for headings and fences.
std::string_view strip_indent(std::string_view line) {
  size_t i = 0;
  while (i < 3 && i < line.size() && line[i] == ' ') ++i;
  return line.substr(i);
}

struct Fence {
  char ch = 0;
  size_t len = 0;
};

std::optional<Fence> fence_marker(std::string_view line) {
  line = strip_indent(line);
  if (line.empty() || (line[0] != '`' && line[0] != '~')) return std::nullopt;
  size_t n = 0;
  while (n < line.size() && line[n] == line[0]) ++n;
  if (n < 3) return std::nullopt;
  return Fence{line[0], n};
}

struct Heading {
  int level;
  std::string title;
};

std::optional<Heading> atx_heading(std::string_view line) {
  line = strip_indent(line);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  size_t n = 0;
  while (n < line.size() && line[n] == '#') ++n;
  if (n == 0 || n > 6) return std::nullopt;
  if (n < line.size() && line[n] != ' ' && line[n] != '\t') return std::nullopt;
  std::string_view text = trim(line.substr(n));
  // Optional closing sequence: spaces then only '#'.
  size_t e = text.size();
  while (e > 0 && text[e - 1] == '#') --e;
  if (e == 0) {
    text = {};
  } else if (e < text.size() && (text[e - 1] == ' ' || text[e - 1] == '\t')) {
    text = trim(text.substr(0, e));
  }
  return Heading{static_cast<int>(n), std::string(text)};
}

bool is_blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

}  // namespace

const SectionNode* Outline::find(const SectionId& id) const {
  for (const auto& s : sections) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

Outline parse_outline(std::string_view doc) {
  Outline out;
  std::array<int, SectionId::kMaxDepth> counters{};
  int current_depth = 0;
  std::optional<Fence> open_fence;

  auto push_node = [&](int level, std::string title, size_t line_start, size_t body_start,
                       bool synthesized) {
    ++counters[level - 1];
    for (int d = level; d < SectionId::kMaxDepth; ++d) counters[d] = 0;
    if (counters[level - 1] > SectionId::kMaxSegment) {
      throw ValidationError("more than 99 sections at level " + std::to_string(level) +
                            " (heading at byte " + std::to_string(line_start) + ")");
    }
    SectionNode node;
    node.id = SectionId::from_path(std::span<const int>(counters.data(), level));
    if (level > 1) node.parent = node.id.parent();
    node.title = std::move(title);
    node.char_span = {line_start, doc.size()};
    node.body_span = {body_start, body_start};
    node.synthesized = synthesized;
    out.sections.push_back(std::move(node));
    current_depth = level;
  };

  for (const Line& line : split_lines(doc)) {
    std::string_view text = doc.substr(line.start, line.end - line.start);
    if (auto f = fence_marker(text)) {
      if (!open_fence) {
        open_fence = f;
      } else if (f->ch == open_fence->ch && f->len >= open_fence->len &&
                 trim(strip_indent(text)).size() == f->len) {
        open_fence.reset();
      }
      continue;
    }
    if (open_fence) continue;
    auto h = atx_heading(text);
    if (!h) continue;
    if (h->level > SectionId::kMaxDepth) {
      out.warnings.push_back("level-" + std::to_string(h->level) + " heading at byte " +
                             std::to_string(line.start) + " treated as body text");
      continue;
    }
    if (h->level > current_depth + 1) {
      out.warnings.push_back("heading depth jumps from " + std::to_string(current_depth) +
                             " to " + std::to_string(h->level) + " at byte " +
                             std::to_string(line.start) + "; synthesized intermediate level(s)");
      for (int lvl = current_depth + 1; lvl < h->level; ++lvl) {
        push_node(lvl, "", line.start, line.start, true);
      }
    }
    push_node(h->level, std::move(h->title), line.start, line.next, false);
  }

  if (out.sections.empty()) {
    SectionNode root;
    root.id = SectionId::from_path({1});
    root.char_span = {0, doc.size()};
    root.body_span = {0, doc.size()};
    out.sections.push_back(std::move(root));
    if (!doc.empty()) out.warnings.push_back("no headings found; whole document is section 1");
    return out;
  }

  // Body ends at the next heading line of any level; the full span ends at the
  // next section of the same or shallower depth.
  auto& secs = out.sections;
  for (size_t i = 0; i < secs.size(); ++i) {
    size_t body_end = doc.size();
    for (size_t j = i + 1; j < secs.size(); ++j) {
      if (secs[j].char_span.start >= secs[i].body_span.start) {
        body_end = secs[j].char_span.start;
        break;
      }
    }
    if (!secs[i].synthesized) secs[i].body_span.end = std::max(body_end, secs[i].body_span.start);
    for (size_t j = i + 1; j < secs.size(); ++j) {
      if (secs[j].id.depth() <= secs[i].id.depth()) {
        secs[i].char_span.end = secs[j].char_span.start;
        break;
      }
    }
  }

  size_t first = secs.front().char_span.start;
  if (first > 0 && !is_blank(doc.substr(0, first))) {
    out.front_matter = Span{0, first};
    out.warnings.push_back("front matter [0, " + std::to_string(first) + ") skipped");
  }
  return out;
}

}  // namespace dqm
