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

#include "fsmflow/fsm.h"

#include <fstream>
#include <sstream>

#include "fsmflow/error.h"
#include "json_schema.h"

namespace fsmflow {

std::string AdjacencyState(std::string_view command) {
  if (IsReservedToken(command)) return std::string(command);
  return "after_" + std::string(command);
}

Fsm FsmFromRulebook(const Rulebook& rb) {
  Fsm fsm;
  fsm.protocol = rb.protocol;
  fsm.initial = std::string(kStartToken);
  fsm.states.insert(fsm.initial);
  for (const CommandRule& r : rb.rules) fsm.states.insert(AdjacencyState(r.command));
  for (const auto& [from, to] : ToAdjacency(rb)) {
    Transition t{AdjacencyState(from), to, AdjacencyState(to)};
    fsm.states.insert(t.from);
    fsm.states.insert(t.to);
    fsm.transitions.insert(std::move(t));
  }
  return fsm;
}

Fsm FsmFromJson(const nlohmann::json& j) {
  const std::string root = "$";
  schema::ExpectObject(j, root,
                       {"version", "protocol", "states", "initial", "transitions"});
  std::string version = schema::String(j, root, "version");
  if (version != kFsmVersion) {
    throw SchemaViolation("$.version", "unsupported version '" + version + "'");
  }
  Fsm fsm;
  fsm.protocol = schema::String(j, root, "protocol");
  const nlohmann::json& states = schema::Array(j, root, "states");
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!states[i].is_string() || states[i].get<std::string>().empty()) {
      throw SchemaViolation(schema::Index("$.states", i),
                            "expected a non-empty string");
    }
    if (!fsm.states.insert(states[i].get<std::string>()).second) {
      throw SchemaViolation(schema::Index("$.states", i), "duplicate state");
    }
  }
  fsm.initial = schema::String(j, root, "initial");
  if (!fsm.states.contains(fsm.initial)) throw DanglingState(fsm.initial);

  const nlohmann::json& transitions = schema::Array(j, root, "transitions");
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const std::string path = schema::Index("$.transitions", i);
    schema::ExpectObject(transitions[i], path, {"from", "input", "to"});
    Transition t{schema::String(transitions[i], path, "from"),
                 schema::String(transitions[i], path, "input"),
                 schema::String(transitions[i], path, "to")};
    if (!IsValidCommandName(t.input)) {
      throw SchemaViolation(schema::Member(path, "input"),
                            "input must be an uppercase command name");
    }
    if (!fsm.states.contains(t.from)) throw DanglingState(t.from);
    if (!fsm.states.contains(t.to)) throw DanglingState(t.to);
    if (!fsm.transitions.insert(std::move(t)).second) {
      throw SchemaViolation(path, "duplicate transition");
    }
  }
  return fsm;
}

Fsm ParseFsm(std::string_view text) { return FsmFromJson(schema::Parse(text)); }

Fsm LoadGold(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseFsm(buffer.str());
}

nlohmann::ordered_json FsmToJson(const Fsm& fsm) {
  nlohmann::ordered_json j;
  j["version"] = kFsmVersion;
  j["protocol"] = fsm.protocol;
  j["states"] = fsm.states;
  j["initial"] = fsm.initial;
  j["transitions"] = nlohmann::ordered_json::array();
  for (const Transition& t : fsm.transitions) {
    j["transitions"].push_back({{"from", t.from}, {"input", t.input}, {"to", t.to}});
  }
  return j;
}

std::string ExportJson(const Fsm& fsm) { return FsmToJson(fsm).dump(2) + "\n"; }

namespace {

std::string DotQuote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string ExportDot(const Fsm& fsm) {
  std::ostringstream out;
  out << "digraph " << DotQuote(fsm.protocol.empty() ? "fsm" : fsm.protocol)
      << " {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=ellipse];\n";
  out << "  __entry [shape=point];\n";
  for (const std::string& s : fsm.states) out << "  " << DotQuote(s) << ";\n";
  out << "  __entry -> " << DotQuote(fsm.initial) << ";\n";
  for (const Transition& t : fsm.transitions) {
    out << "  " << DotQuote(t.from) << " -> " << DotQuote(t.to)
        << " [label=" << DotQuote(t.input) << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace fsmflow
