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

#ifndef FSMFLOW_RFC_PARSER_H_
#define FSMFLOW_RFC_PARSER_H_

// Plain-text RFC processing: artifact stripping, section tree parsing,
// leaf chunking and the path listing handed to the model as context.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace fsmflow {

struct RawDocument {
  std::string text;
  std::string source_name;
};

/// Reads an RFC file. Throws InputError when the file is unreadable or empty.
RawDocument LoadDocument(const std::filesystem::path& path);

/// A section of the document. `body` holds the text between this section's
/// heading line and the first child heading (or the end of the section);
/// the heading line itself is represented by `path` and `title` only.
struct SectionNode {
  std::string title;
  std::string body;
  std::string path;
  std::vector<SectionNode> subsections;

  bool is_leaf() const { return subsections.empty(); }

  friend bool operator==(const SectionNode&, const SectionNode&) = default;
};

/// The root node carries the document title and an empty path; its body is
/// the preamble before the first heading.
using SectionTree = SectionNode;

struct Chunk {
  std::string text;
  std::string path;
  int ordinal = 0;
  int part = 0;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct AppendixEntry {
  std::string path;
  std::string title;

  friend bool operator==(const AppendixEntry&, const AppendixEntry&) = default;
};

struct AppendixListing {
  std::vector<AppendixEntry> entries;

  /// One `path<TAB>title` line per entry.
  std::string Render() const;
};

inline constexpr std::size_t kDefaultMaxChunkChars = 6000;
inline constexpr std::size_t kMinMaxChunkChars = 256;

/// Removes form feeds, the running footer before each page break, the
/// running header after it, and collapses runs of blank lines to one.
/// Everything else is preserved byte for byte. Idempotent.
std::string StripArtifacts(const RawDocument& doc);

/// Segments artifact-free text into a section tree. Headings are
/// `<digits>(.<digits>)*[.] <title>` at column 0; lettered appendices
/// (`A.`, `A.1`, `Appendix B`) get paths prefixed `APP-`; unnumbered
/// column-0 headings after the last top-level numbered section become
/// trailing root children with paths `U-1`, `U-2`, ...
///
/// Throws NoSectionsFound when no numbered heading exists.
SectionTree ParseTree(std::string_view clean_text, std::string root_title,
                      std::string_view source_name = "<text>");

/// One chunk per non-blank leaf body in preorder. Bodies longer than
/// `max_chunk_chars` are split at paragraph boundaries, falling back to
/// sentence and then word boundaries for single oversized paragraphs.
std::vector<Chunk> CollectLeafChunks(const SectionTree& tree,
                                     std::size_t max_chunk_chars =
                                         kDefaultMaxChunkChars);

/// Preorder (path, title) of every section below the root.
AppendixListing BuildAppendix(const SectionTree& tree);

/// Visits every node below the root in preorder.
void ForEachSection(const SectionTree& tree,
                    const std::function<void(const SectionNode&)>& visit);

nlohmann::ordered_json TreeToJson(const SectionNode& node);
nlohmann::ordered_json ChunksToJson(const std::vector<Chunk>& chunks);

}  // namespace fsmflow

#endif  // FSMFLOW_RFC_PARSER_H_
