// Copyright 2026 The FSMFlow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fsmflow/rfc_parser.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#include "fsmflow/error.h"

namespace fsmflow {
namespace {

bool IsBlankChar(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v';
}

bool IsBlank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), IsBlankChar);
}

std::string_view TrimRight(std::string_view s) {
  while (!s.empty() && IsBlankChar(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view Trim(std::string_view s) {
  s = TrimRight(s);
  while (!s.empty() && IsBlankChar(s.front())) s.remove_prefix(1);
  return s;
}

// A line as a half-open byte range. `end` excludes the newline, `next`
// includes it.
struct LineSpan {
  std::size_t begin;
  std::size_t end;
  std::size_t next;
};

std::vector<LineSpan> SplitLines(std::string_view text) {
  std::vector<LineSpan> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back({pos, text.size(), text.size()});
      break;
    }
    lines.push_back({pos, nl, nl + 1});
    pos = nl + 1;
  }
  return lines;
}

const std::regex& FooterPattern() {
  static const std::regex re(R"(\[Page \d+\]$)");
  return re;
}

const std::regex& HeaderPattern() {
  static const std::regex re(R"(RFC[ \t]*\d+)");
  return re;
}

// Erases the last non-blank line of `page` if it is a running footer.
void EraseFooter(std::string& page) {
  auto lines = SplitLines(page);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    std::string_view line(page.data() + it->begin, it->end - it->begin);
    if (IsBlank(line)) continue;
    if (std::regex_search(std::string(TrimRight(line)), FooterPattern())) {
      page.erase(it->begin, it->next - it->begin);
    }
    return;
  }
}

// Erases the first non-blank line of `page` if it is a running header.
void EraseHeader(std::string& page) {
  for (const LineSpan& span : SplitLines(page)) {
    std::string_view line(page.data() + span.begin, span.end - span.begin);
    if (IsBlank(line)) continue;
    if (std::regex_search(std::string(line), HeaderPattern())) {
      page.erase(span.begin, span.next - span.begin);
    }
    return;
  }
}

std::string CollapseBlankRuns(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool previous_blank = false;
  for (const LineSpan& span : SplitLines(text)) {
    std::string_view line = text.substr(span.begin, span.end - span.begin);
    bool blank = IsBlank(line);
    if (blank && previous_blank) continue;
    previous_blank = blank;
    out.append(text.substr(span.begin, span.next - span.begin));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Heading recognition

enum class HeadingKind { kNumbered, kLettered, kUnnumbered };

struct Heading {
  LineSpan span;
  HeadingKind kind;
  std::vector<std::string> components;
  std::string title;
};

std::vector<std::string> SplitComponents(std::string_view dotted) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t dot = dotted.find('.', pos);
    if (dot == std::string_view::npos) {
      if (pos < dotted.size()) parts.emplace_back(dotted.substr(pos));
      return parts;
    }
    parts.emplace_back(dotted.substr(pos, dot - pos));
    pos = dot + 1;
  }
}

std::optional<Heading> MatchNumbered(const std::string& line) {
  static const std::regex re(R"(^(\d+(?:\.\d+)*)\.?[ \t]+(\S.*)$)");
  std::smatch m;
  if (!std::regex_match(line, m, re)) return std::nullopt;
  Heading h;
  h.kind = HeadingKind::kNumbered;
  h.components = SplitComponents(m[1].str());
  h.title = std::string(TrimRight(m[2].str()));
  return h;
}

std::optional<Heading> MatchLettered(const std::string& line) {
  static const std::regex prefixed(
      R"(^(?:APPENDIX|Appendix)[ \t]+([A-Z])((?:\.\d+)*)\.?(?:[ \t]*[:\-][ \t]*|[ \t]+|$)(.*)$)");
  static const std::regex bare(R"(^([A-Z])((?:\.\d+)*)(\.?)[ \t]+(\S.*)$)");
  std::smatch m;
  Heading h;
  h.kind = HeadingKind::kLettered;
  if (std::regex_match(line, m, prefixed)) {
    h.components = SplitComponents(m[1].str() + m[2].str());
    h.title = std::string(Trim(m[3].str()));
    if (h.title.empty()) h.title = std::string(TrimRight(line));
    return h;
  }
  if (std::regex_match(line, m, bare)) {
    // "A Title" is prose; a heading needs "A." or "A.1".
    if (m[2].length() == 0 && m[3].length() == 0) return std::nullopt;
    h.components = SplitComponents(m[1].str() + m[2].str());
    h.title = std::string(TrimRight(m[4].str()));
    return h;
  }
  return std::nullopt;
}

// Column-0 title-like line: starts with an uppercase letter, short, not a
// sentence, and set off by blank lines.
bool LooksLikeUnnumberedHeading(std::string_view text,
                                const std::vector<LineSpan>& lines,
                                std::size_t index) {
  std::string_view line = TrimRight(
      text.substr(lines[index].begin, lines[index].end - lines[index].begin));
  if (line.empty() || line.size() > 72) return false;
  if (line.front() < 'A' || line.front() > 'Z') return false;
  char last = line.back();
  if (last == '.' || last == ',' || last == ';') return false;
  auto blank_at = [&](std::size_t i) {
    return IsBlank(text.substr(lines[i].begin, lines[i].end - lines[i].begin));
  };
  if (index > 0 && !blank_at(index - 1)) return false;
  if (index + 1 < lines.size() && !blank_at(index + 1)) return false;
  return true;
}

std::string JoinPath(const std::vector<std::string>& components,
                     HeadingKind kind) {
  std::string path = kind == HeadingKind::kLettered ? "APP-" : "";
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i) path += '.';
    path += components[i];
  }
  return path;
}

std::vector<Heading> FindHeadings(std::string_view text,
                                  const std::vector<LineSpan>& lines) {
  std::vector<Heading> headings;
  std::vector<std::size_t> line_index;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const LineSpan& span = lines[i];
    if (span.end == span.begin || IsBlankChar(text[span.begin])) continue;
    std::string line(text.substr(span.begin, span.end - span.begin));
    std::optional<Heading> h = MatchNumbered(line);
    if (!h) h = MatchLettered(line);
    if (!h) continue;
    h->span = span;
    headings.push_back(std::move(*h));
    line_index.push_back(i);
  }

  // Unnumbered headings are only recognized after the last top-level
  // numbered heading.
  std::optional<std::size_t> last_top;
  for (std::size_t k = 0; k < headings.size(); ++k) {
    if (headings[k].kind == HeadingKind::kNumbered &&
        headings[k].components.size() == 1) {
      last_top = line_index[k];
    }
  }
  if (!last_top) return headings;

  std::vector<Heading> merged;
  std::size_t k = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (k < headings.size() && line_index[k] == i) {
      merged.push_back(std::move(headings[k++]));
      continue;
    }
    if (i <= *last_top) continue;
    const LineSpan& span = lines[i];
    if (span.end == span.begin || IsBlankChar(text[span.begin])) continue;
    if (!LooksLikeUnnumberedHeading(text, lines, i)) continue;
    Heading h;
    h.span = span;
    h.kind = HeadingKind::kUnnumbered;
    h.title = std::string(TrimRight(text.substr(span.begin, span.end - span.begin)));
    merged.push_back(std::move(h));
  }
  return merged;
}

class TreeBuilder {
 public:
  TreeBuilder(std::string_view text, std::vector<Heading> headings)
      : text_(text), headings_(std::move(headings)) {}

  SectionNode BuildRoot(std::string title) {
    SectionNode root;
    root.title = std::move(title);
    std::vector<std::size_t> boundaries;
    std::vector<std::string> paths;
    int unnumbered = 0;
    for (std::size_t k = 0; k < headings_.size(); ++k) {
      const Heading& h = headings_[k];
      std::string path;
      if (h.kind == HeadingKind::kUnnumbered) {
        path = "U-" + std::to_string(unnumbered + 1);
      } else if (h.components.size() == 1) {
        path = JoinPath(h.components, h.kind);
      } else {
        continue;
      }
      if (std::find(paths.begin(), paths.end(), path) != paths.end()) continue;
      if (h.kind == HeadingKind::kUnnumbered) ++unnumbered;
      boundaries.push_back(k);
      paths.push_back(std::move(path));
    }
    Populate(root, {}, HeadingKind::kNumbered, 0, headings_.size(), 0,
             text_.size(), &boundaries, &paths);
    return root;
  }

 private:
  // Fills `node` from text [begin, end) whose headings are [first, last).
  // `root_boundaries` short-circuits child selection for the root.
  void Populate(SectionNode& node, const std::vector<std::string>& prefix,
                HeadingKind kind, std::size_t first, std::size_t last,
                std::size_t begin, std::size_t end,
                const std::vector<std::size_t>* root_boundaries = nullptr,
                const std::vector<std::string>* root_paths = nullptr) {
    std::vector<std::size_t> boundaries;
    std::vector<std::string> paths;
    if (root_boundaries) {
      boundaries = *root_boundaries;
      paths = *root_paths;
    } else {
      for (std::size_t k = first; k < last; ++k) {
        const Heading& h = headings_[k];
        if (h.kind != kind || h.components.size() != prefix.size() + 1 ||
            !std::equal(prefix.begin(), prefix.end(), h.components.begin())) {
          continue;
        }
        std::string path = JoinPath(h.components, kind);
        if (std::find(paths.begin(), paths.end(), path) != paths.end()) continue;
        boundaries.push_back(k);
        paths.push_back(std::move(path));
      }
    }

    std::size_t body_end =
        boundaries.empty() ? end : headings_[boundaries.front()].span.begin;
    node.body = std::string(text_.substr(begin, body_end - begin));

    for (std::size_t b = 0; b < boundaries.size(); ++b) {
      const Heading& h = headings_[boundaries[b]];
      std::size_t next_heading =
          b + 1 < boundaries.size() ? boundaries[b + 1] : last;
      std::size_t child_end = b + 1 < boundaries.size()
                                  ? headings_[boundaries[b + 1]].span.begin
                                  : end;
      SectionNode child;
      child.title = h.title;
      child.path = paths[b];
      if (h.kind == HeadingKind::kUnnumbered) {
        child.body = std::string(
            text_.substr(h.span.next, child_end - h.span.next));
      } else {
        Populate(child, h.components, h.kind, boundaries[b] + 1, next_heading,
                 h.span.next, child_end);
      }
      node.subsections.push_back(std::move(child));
    }
  }

  std::string_view text_;
  std::vector<Heading> headings_;
};

// ---------------------------------------------------------------------------
// Chunking

// Greedily packs `pieces` joined by `separator` into strings of at most
// `limit` characters. Every piece must already fit.
std::vector<std::string> Pack(const std::vector<std::string>& pieces,
                              std::string_view separator, std::size_t limit) {
  std::vector<std::string> out;
  std::string current;
  for (const std::string& piece : pieces) {
    if (current.empty()) {
      current = piece;
    } else if (current.size() + separator.size() + piece.size() <= limit) {
      current.append(separator);
      current.append(piece);
    } else {
      out.push_back(std::move(current));
      current = piece;
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

// Splits `text` after every occurrence of a character in `enders` that is
// followed by whitespace; pieces are trimmed and non-empty.
std::vector<std::string> SplitAfter(std::string_view text,
                                    std::string_view enders) {
  std::vector<std::string> pieces;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    bool boundary = enders.find(text[i]) != std::string_view::npos &&
                    (i + 1 == text.size() || IsBlankChar(text[i + 1]) ||
                     text[i + 1] == '\n');
    if (boundary || i + 1 == text.size()) {
      std::string_view piece = text.substr(start, i + 1 - start);
      while (!piece.empty() && std::isspace(static_cast<unsigned char>(piece.front()))) {
        piece.remove_prefix(1);
      }
      while (!piece.empty() && std::isspace(static_cast<unsigned char>(piece.back()))) {
        piece.remove_suffix(1);
      }
      if (!piece.empty()) pieces.emplace_back(piece);
      start = i + 1;
    }
  }
  return pieces;
}

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (IsBlankChar(text[i]) || text[i] == '\n')) ++i;
    std::size_t start = i;
    while (i < text.size() && !IsBlankChar(text[i]) && text[i] != '\n') ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

std::vector<std::string> SplitOversized(const std::string& paragraph,
                                        std::size_t limit) {
  if (paragraph.size() <= limit) return {paragraph};
  std::vector<std::string> fitted;
  for (const std::string& sentence : SplitAfter(paragraph, ".?!")) {
    if (sentence.size() <= limit) {
      fitted.push_back(sentence);
      continue;
    }
    std::vector<std::string> words;
    for (std::string& word : SplitWords(sentence)) {
      for (std::size_t at = 0; at < word.size(); at += limit) {
        words.push_back(word.substr(at, limit));
      }
    }
    for (std::string& part : Pack(words, " ", limit)) {
      fitted.push_back(std::move(part));
    }
  }
  return Pack(fitted, " ", limit);
}

// Drops leading and trailing blank lines.
std::string_view TrimBlankLines(std::string_view body) {
  auto lines = SplitLines(body);
  std::size_t first = 0;
  std::size_t last = lines.size();
  auto blank = [&](std::size_t i) {
    return IsBlank(body.substr(lines[i].begin, lines[i].end - lines[i].begin));
  };
  while (first < last && blank(first)) ++first;
  while (last > first && blank(last - 1)) --last;
  if (first == last) return {};
  return body.substr(lines[first].begin, lines[last - 1].end - lines[first].begin);
}

std::vector<std::string> Paragraphs(std::string_view body) {
  std::vector<std::string> paragraphs;
  std::string current;
  for (const LineSpan& span : SplitLines(body)) {
    std::string_view line = body.substr(span.begin, span.end - span.begin);
    if (IsBlank(line)) {
      if (!current.empty()) paragraphs.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (!current.empty()) current += '\n';
    current.append(line);
  }
  if (!current.empty()) paragraphs.push_back(std::move(current));
  return paragraphs;
}

void VisitPreorder(const SectionNode& node,
                   const std::function<void(const SectionNode&)>& visit) {
  for (const SectionNode& child : node.subsections) {
    visit(child);
    VisitPreorder(child, visit);
  }
}

}  // namespace

RawDocument LoadDocument(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  RawDocument doc{buffer.str(), path.filename().string()};
  if (doc.text.empty()) throw InputError(path.string() + " is empty");
  return doc;
}

std::string AppendixListing::Render() const {
  std::string out;
  for (const AppendixEntry& e : entries) {
    out += e.path;
    out += '\t';
    out += e.title;
    out += '\n';
  }
  return out;
}

std::string StripArtifacts(const RawDocument& doc) {
  const std::string& text = doc.text;
  if (text.find('\f') == std::string::npos) return CollapseBlankRuns(text);

  std::vector<std::string> pages;
  std::size_t pos = 0;
  while (true) {
    std::size_t ff = text.find('\f', pos);
    if (ff == std::string::npos) {
      pages.push_back(text.substr(pos));
      break;
    }
    pages.push_back(text.substr(pos, ff - pos));
    pos = ff + 1;
  }
  std::string joined;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    if (i > 0) EraseHeader(pages[i]);
    EraseFooter(pages[i]);
    joined += pages[i];
  }
  return CollapseBlankRuns(joined);
}

SectionTree ParseTree(std::string_view clean_text, std::string root_title,
                      std::string_view source_name) {
  auto lines = SplitLines(clean_text);
  TreeBuilder builder(clean_text, FindHeadings(clean_text, lines));
  SectionTree root = builder.BuildRoot(std::move(root_title));
  bool numbered = std::any_of(
      root.subsections.begin(), root.subsections.end(),
      [](const SectionNode& n) {
        return !n.path.empty() && n.path.front() >= '0' && n.path.front() <= '9';
      });
  if (!numbered) throw NoSectionsFound(std::string(source_name));
  return root;
}

void ForEachSection(const SectionTree& tree,
                    const std::function<void(const SectionNode&)>& visit) {
  VisitPreorder(tree, visit);
}

std::vector<Chunk> CollectLeafChunks(const SectionTree& tree,
                                     std::size_t max_chunk_chars) {
  max_chunk_chars = std::max(max_chunk_chars, kMinMaxChunkChars);
  std::vector<Chunk> chunks;
  auto emit = [&](const SectionNode& node) {
    if (!node.is_leaf()) return;
    std::string_view body = TrimBlankLines(node.body);
    if (body.empty()) return;
    std::vector<std::string> parts;
    if (body.size() <= max_chunk_chars) {
      parts.emplace_back(body);
    } else {
      std::vector<std::string> pieces;
      for (const std::string& paragraph : Paragraphs(body)) {
        for (std::string& piece : SplitOversized(paragraph, max_chunk_chars)) {
          pieces.push_back(std::move(piece));
        }
      }
      parts = Pack(pieces, "\n\n", max_chunk_chars);
    }
    for (std::size_t p = 0; p < parts.size(); ++p) {
      chunks.push_back({std::move(parts[p]), node.path,
                        static_cast<int>(chunks.size()), static_cast<int>(p)});
    }
  };
  if (tree.is_leaf()) {
    emit(tree);
  } else {
    VisitPreorder(tree, emit);
  }
  return chunks;
}

AppendixListing BuildAppendix(const SectionTree& tree) {
  AppendixListing listing;
  VisitPreorder(tree, [&](const SectionNode& node) {
    listing.entries.push_back({node.path, node.title});
  });
  return listing;
}

nlohmann::ordered_json TreeToJson(const SectionNode& node) {
  nlohmann::ordered_json j;
  j["title"] = node.title;
  j["body"] = node.body;
  j["path"] = node.path;
  j["subsections"] = nlohmann::ordered_json::array();
  for (const SectionNode& child : node.subsections) {
    j["subsections"].push_back(TreeToJson(child));
  }
  return j;
}

nlohmann::ordered_json ChunksToJson(const std::vector<Chunk>& chunks) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const Chunk& c : chunks) {
    out.push_back({{"ordinal", c.ordinal},
                   {"path", c.path},
                   {"part", c.part},
                   {"text", c.text}});
  }
  return out;
}

}  // namespace fsmflow
