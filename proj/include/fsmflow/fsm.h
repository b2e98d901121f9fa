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

#ifndef FSMFLOW_FSM_H_
#define FSMFLOW_FSM_H_

#include <compare>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>

#include "fsmflow/rulebook.h"
#include "json.hpp"

namespace fsmflow {

struct Transition {
  std::string from;
  std::string input;
  std::string to;

  friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// A protocol state machine. Sets keep states and transitions sorted, which
/// makes every export deterministic.
struct Fsm {
  std::string protocol;
  std::set<std::string> states;
  std::string initial;
  std::set<Transition> transitions;

  friend bool operator==(const Fsm&, const Fsm&) = default;
};

inline constexpr std::string_view kFsmVersion = "fsm/1";

/// Name of the state reached after `command` in a command-adjacency FSM.
std::string AdjacencyState(std::string_view command);

/// Projects a rulebook onto a command-adjacency FSM: states `START` and
/// `after_<CMD>`; each adjacency pair (A, B) becomes
/// (state(A), B, state(B)).
Fsm FsmFromRulebook(const Rulebook& rb);

/// Parses and checks an FSM document. Throws SchemaViolation or
/// DanglingState.
Fsm FsmFromJson(const nlohmann::json& j);
Fsm ParseFsm(std::string_view text);
Fsm LoadGold(const std::filesystem::path& path);

nlohmann::ordered_json FsmToJson(const Fsm& fsm);
std::string ExportJson(const Fsm& fsm);
std::string ExportDot(const Fsm& fsm);

}  // namespace fsmflow

#endif  // FSMFLOW_FSM_H_
