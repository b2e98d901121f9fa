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

#ifndef FSMFLOW_PROMPT_CHAIN_H_
#define FSMFLOW_PROMPT_CHAIN_H_

// Three-stage prompt chain run independently over every chunk:
//   1. command extraction      chunk            -> CommandInventory
//   2. transition analysis     inventory+chunk  -> TransitionFacts
//   3. rulebook synthesis      facts            -> CommandRule fragment
// Each stage prompt embeds the serialized output of the previous stage.
// Fragments are merged in chunk order into one Rulebook.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fsmflow/llm_backend.h"
#include "fsmflow/rfc_parser.h"
#include "fsmflow/rulebook.h"
#include "json.hpp"

namespace fsmflow {

/// Fixed category vocabulary for stage-1 commands. Unknown categories map to
/// "other".
inline constexpr std::array<std::string_view, 5> kCommandCategories = {
    "access-control", "transfer-parameter", "service", "session", "other"};

struct InventoryItem {
  std::string name;
  std::string category;
  std::string description;

  friend bool operator==(const InventoryItem&, const InventoryItem&) = default;
};

struct CommandInventory {
  std::vector<InventoryItem> commands;
  int chunk_ordinal = 0;

  bool Contains(std::string_view name) const;
};

struct TransitionFact {
  std::string command;
  std::vector<std::string> preconditions;
  std::vector<std::string> postconditions;
  std::vector<std::string> allowed_before;
  std::vector<std::string> allowed_after;

  friend bool operator==(const TransitionFact&, const TransitionFact&) = default;
};

struct TransitionFacts {
  std::vector<TransitionFact> facts;
  int chunk_ordinal = 0;
};

/// Canonical text embedded into the next stage's prompt.
std::string SerializeInventory(const CommandInventory& inv);
std::string SerializeFacts(const TransitionFacts& facts);

inline constexpr std::string_view kDefaultModelId = "llama-3.3-70b-versatile";

struct ChainConfig {
  std::string protocol;
  std::size_t max_chunk_chars = kDefaultMaxChunkChars;
  std::array<std::string, 3> stage_model_ids = {
      std::string(kDefaultModelId), std::string(kDefaultModelId),
      std::string(kDefaultModelId)};
  int parallelism = 4;
  bool appendix_in_context = true;
  double temperature = 0.0;
  int max_tokens = 4096;
};

inline constexpr int kMaxParallelism = 64;

/// One system prompt and one user template per stage. Templates use the
/// placeholders {CHUNK}, {PATH}, {APPENDIX}, {INVENTORY}, {FACTS} and
/// {PROTOCOL}; substitution is single-pass, so inserted text is never
/// rescanned.
struct PromptTemplates {
  struct Stage {
    std::string system;
    std::string user;
  };
  std::array<Stage, 3> stages;

  /// Reads stage1.txt, stage2.txt and stage3.txt. Each file holds a
  /// `[system]` section followed by a `[user]` section.
  static PromptTemplates LoadFromDirectory(const std::filesystem::path& dir);
  static Stage ParseStage(std::string_view text, std::string_view name);
};

std::string RenderTemplate(std::string_view tmpl,
                           const std::map<std::string, std::string>& values);

/// Appended to the user prompt when a stage answer could not be parsed.
inline constexpr std::string_view kFormatReminder =
    "\n\nFORMAT REMINDER: your previous answer could not be parsed. Reply "
    "with exactly one ```json fenced code block containing only the JSON "
    "value requested above, and no other text.";

/// Returns the first JSON value in a model reply: the first fenced code
/// block if it parses, otherwise the first balanced `[...]` or `{...}`.
std::optional<nlohmann::json> ExtractJsonBlock(std::string_view text);

/// Per-chunk bookkeeping filled in by the stages.
struct ChunkLog {
  std::array<int, 3> calls = {0, 0, 0};
  std::vector<std::string> warnings;
};

struct SkippedChunk {
  int ordinal = 0;
  std::string path;
  int stage = 0;
  std::string reason;
};

struct RunReport {
  int chunks = 0;
  int commands = 0;
  std::array<int, 3> calls_per_stage = {0, 0, 0};
  std::vector<SkippedChunk> skipped_chunks;
  std::vector<std::string> warnings;
  std::vector<std::string> conflicts;
};

nlohmann::ordered_json RunReportToJson(const RunReport& report);

struct ChainResult {
  Rulebook rulebook;
  RunReport report;
};

/// The rules synthesized from one chunk.
struct Fragment {
  int ordinal = 0;
  std::vector<CommandRule> rules;
};

/// Unions rules that share a command name: edges are unioned per chapter
/// by counterpart, purposes from different chunks are concatenated with
/// `[chunk N]` tags, provenance lists are unioned, and a changes_state
/// disagreement resolves to true and is reported in `conflicts`.
/// Fragments are processed in ascending ordinal order.
Rulebook MergeFragments(std::vector<Fragment> fragments, std::string protocol,
                        std::vector<std::string>* conflicts = nullptr);

class PromptChain {
 public:
  PromptChain(ChatBackend& backend, PromptTemplates templates, ChainConfig config);

  /// Throws UnparseableStageOutput after one re-ask.
  CommandInventory ExtractCommands(const Chunk& chunk,
                                   const AppendixListing& appendix,
                                   ChunkLog& log) const;

  /// Facts for commands missing from `inv` are dropped with a warning. An
  /// empty inventory makes no backend call.
  TransitionFacts AnalyzeTransitions(const CommandInventory& inv,
                                     const Chunk& chunk,
                                     const AppendixListing& appendix,
                                     ChunkLog& log) const;

  /// Throws SchemaViolation naming the command when a rule lacks a chapter.
  /// An empty fact list makes no backend call.
  std::vector<CommandRule> SynthesizeRules(const TransitionFacts& facts,
                                           const Chunk& chunk,
                                           const AppendixListing& appendix,
                                           ChunkLog& log) const;

  /// Runs every chunk through the three stages (concurrently, up to
  /// `parallelism` chunks at a time) and merges the fragments. A chunk whose
  /// output cannot be parsed is skipped and listed in the report; backend
  /// failures abort the run.
  ChainResult Run(const std::vector<Chunk>& chunks,
                  const AppendixListing& appendix) const;

  const ChainConfig& config() const { return config_; }

 private:
  nlohmann::json Ask(int stage, const Chunk& chunk,
                     const std::map<std::string, std::string>& values,
                     bool (*acceptable)(const nlohmann::json&),
                     ChunkLog& log) const;

  std::map<std::string, std::string> BaseValues(const Chunk& chunk,
                                                const AppendixListing& appendix) const;

  ChatBackend& backend_;
  PromptTemplates templates_;
  ChainConfig config_;
};

}  // namespace fsmflow

#endif  // FSMFLOW_PROMPT_CHAIN_H_
