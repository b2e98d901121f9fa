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

#ifndef FSMFLOW_RULEBOOK_H_
#define FSMFLOW_RULEBOOK_H_

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace fsmflow {

/// Pseudo-commands usable as edge counterparts. START means "no prior
/// command required", END means the session terminates.
inline constexpr std::string_view kStartToken = "START";
inline constexpr std::string_view kEndToken = "END";

bool IsReservedToken(std::string_view name);

/// Non-empty, uppercase, no whitespace.
bool IsValidCommandName(std::string_view name);

/// Trims and uppercases a model-supplied command name.
std::string NormalizeCommandName(std::string_view name);

struct Edge {
  std::string counterpart;
  std::string system_state;
  bool changes_state = false;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// One command's three chapters: purpose, valid direct preceding commands
/// and valid direct subsequent commands.
struct CommandRule {
  std::string command;
  std::string purpose;
  std::vector<Edge> preceding;
  std::vector<Edge> subsequent;
  std::vector<int> provenance;

  friend bool operator==(const CommandRule&, const CommandRule&) = default;
};

struct Rulebook {
  std::string protocol;
  std::vector<CommandRule> rules;
  std::vector<std::string> warnings;

  const CommandRule* Find(std::string_view command) const;

  friend bool operator==(const Rulebook&, const Rulebook&) = default;
};

inline constexpr std::string_view kRulebookVersion = "rulebook/1";

enum class DiagnosticKind {
  kNonReciprocal,
  kUnknownCounterpart,
  kDuplicateEdge,
  kDuplicateRule,
};

std::string_view ToString(DiagnosticKind kind);

/// For kNonReciprocal, (subject, object) is the directed edge subject ->
/// object that only one endpoint declares. For kUnknownCounterpart and
/// kDuplicateEdge, subject is the rule and object the counterpart.
struct Diagnostic {
  DiagnosticKind kind;
  std::string subject;
  std::string object;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

std::vector<Diagnostic> Validate(const Rulebook& rb);

using CommandPair = std::pair<std::string, std::string>;

/// (A, B) is present iff B lists A as preceding or A lists B as subsequent.
std::set<CommandPair> ToAdjacency(const Rulebook& rb);

nlohmann::ordered_json RulebookToJson(const Rulebook& rb);
std::string SerializeRulebook(const Rulebook& rb);

/// Throws SchemaViolation with the JSON path of the first problem.
Rulebook RulebookFromJson(const nlohmann::json& j);
Rulebook DeserializeRulebook(std::string_view text);

nlohmann::ordered_json EdgeToJson(const Edge& e);
nlohmann::ordered_json DiagnosticsToJson(const std::vector<Diagnostic>& ds);

}  // namespace fsmflow

#endif  // FSMFLOW_RULEBOOK_H_
