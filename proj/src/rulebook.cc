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

#include "fsmflow/rulebook.h"

#include <algorithm>
#include <cctype>
#include <map>

#include "fsmflow/error.h"
#include "json_schema.h"

namespace fsmflow {

bool IsReservedToken(std::string_view name) {
  return name == kStartToken || name == kEndToken;
}

bool IsValidCommandName(std::string_view name) {
  if (name.empty()) return false;
  return std::none_of(name.begin(), name.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isspace(u) || std::islower(u);
  });
}

std::string NormalizeCommandName(std::string_view name) {
  while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) {
    name.remove_prefix(1);
  }
  while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) {
    name.remove_suffix(1);
  }
  std::string out(name);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

const CommandRule* Rulebook::Find(std::string_view command) const {
  for (const CommandRule& r : rules) {
    if (r.command == command) return &r;
  }
  return nullptr;
}

std::string_view ToString(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::kNonReciprocal:
      return "NonReciprocal";
    case DiagnosticKind::kUnknownCounterpart:
      return "UnknownCounterpart";
    case DiagnosticKind::kDuplicateEdge:
      return "DuplicateEdge";
    case DiagnosticKind::kDuplicateRule:
      return "DuplicateRule";
  }
  return "Unknown";
}

namespace {

bool Lists(const std::vector<Edge>& edges, std::string_view name) {
  return std::any_of(edges.begin(), edges.end(),
                     [&](const Edge& e) { return e.counterpart == name; });
}

}  // namespace

std::vector<Diagnostic> Validate(const Rulebook& rb) {
  std::vector<Diagnostic> out;
  std::map<std::string, const CommandRule*> by_name;
  for (const CommandRule& r : rb.rules) {
    if (!by_name.emplace(r.command, &r).second) {
      out.push_back({DiagnosticKind::kDuplicateRule, r.command, "",
                     "command " + r.command + " has more than one rule"});
    }
  }

  std::set<CommandPair> reported;
  auto non_reciprocal = [&](const std::string& from, const std::string& to,
                            const std::string& declared_by) {
    if (!reported.insert({from, to}).second) return;
    std::string message = "edge " + from + " -> " + to;
    if (from == to) {
      message += " appears in only one chapter of " + from;
    } else {
      message += " is declared by " + declared_by + " but not by " +
                 (declared_by == from ? to : from);
    }
    out.push_back({DiagnosticKind::kNonReciprocal, from, to, std::move(message)});
  };

  for (const CommandRule& r : rb.rules) {
    for (const auto* chapter : {&r.preceding, &r.subsequent}) {
      const bool is_preceding = chapter == &r.preceding;
      std::set<std::string> seen;
      for (const Edge& e : *chapter) {
        if (!seen.insert(e.counterpart).second) {
          out.push_back({DiagnosticKind::kDuplicateEdge, r.command, e.counterpart,
                         r.command + " lists " + e.counterpart + " twice as " +
                             (is_preceding ? "preceding" : "subsequent")});
          continue;
        }
        if (IsReservedToken(e.counterpart)) continue;
        auto it = by_name.find(e.counterpart);
        if (it == by_name.end()) {
          out.push_back({DiagnosticKind::kUnknownCounterpart, r.command,
                         e.counterpart,
                         r.command + " references " + e.counterpart +
                             ", which has no rule"});
          continue;
        }
        const CommandRule& other = *it->second;
        if (is_preceding && !Lists(other.subsequent, r.command)) {
          non_reciprocal(other.command, r.command, r.command);
        } else if (!is_preceding && !Lists(other.preceding, r.command)) {
          non_reciprocal(r.command, other.command, r.command);
        }
      }
    }
  }
  return out;
}

std::set<CommandPair> ToAdjacency(const Rulebook& rb) {
  std::set<CommandPair> pairs;
  for (const CommandRule& r : rb.rules) {
    for (const Edge& e : r.preceding) pairs.emplace(e.counterpart, r.command);
    for (const Edge& e : r.subsequent) pairs.emplace(r.command, e.counterpart);
  }
  return pairs;
}

nlohmann::ordered_json EdgeToJson(const Edge& e) {
  nlohmann::ordered_json j;
  j["counterpart"] = e.counterpart;
  j["system_state"] = e.system_state;
  j["changes_state"] = e.changes_state;
  return j;
}

nlohmann::ordered_json RulebookToJson(const Rulebook& rb) {
  nlohmann::ordered_json j;
  j["version"] = kRulebookVersion;
  j["protocol"] = rb.protocol;
  j["rules"] = nlohmann::ordered_json::array();
  for (const CommandRule& r : rb.rules) {
    nlohmann::ordered_json rule;
    rule["command"] = r.command;
    rule["purpose"] = r.purpose;
    rule["preceding"] = nlohmann::ordered_json::array();
    for (const Edge& e : r.preceding) rule["preceding"].push_back(EdgeToJson(e));
    rule["subsequent"] = nlohmann::ordered_json::array();
    for (const Edge& e : r.subsequent) rule["subsequent"].push_back(EdgeToJson(e));
    rule["provenance"] = r.provenance;
    j["rules"].push_back(std::move(rule));
  }
  j["warnings"] = rb.warnings;
  return j;
}

std::string SerializeRulebook(const Rulebook& rb) {
  return RulebookToJson(rb).dump(2) + "\n";
}

namespace {

std::vector<Edge> EdgesFromJson(const nlohmann::json& rule,
                                const std::string& rule_path,
                                std::string_view key) {
  const nlohmann::json& arr = schema::Array(rule, rule_path, key);
  const std::string arr_path = schema::Member(rule_path, key);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = schema::Index(arr_path, i);
    schema::ExpectObject(arr[i], path,
                         {"counterpart", "system_state", "changes_state"});
    Edge e;
    e.counterpart = schema::String(arr[i], path, "counterpart");
    if (!IsValidCommandName(e.counterpart)) {
      throw SchemaViolation(schema::Member(path, "counterpart"),
                            "counterpart must be an uppercase command name");
    }
    e.system_state = schema::String(arr[i], path, "system_state");
    e.changes_state = schema::Bool(arr[i], path, "changes_state");
    edges.push_back(std::move(e));
  }
  return edges;
}

}  // namespace

Rulebook RulebookFromJson(const nlohmann::json& j) {
  const std::string root = "$";
  schema::ExpectObject(j, root, {"version", "protocol", "rules", "warnings"});
  std::string version = schema::String(j, root, "version");
  if (version != kRulebookVersion) {
    throw SchemaViolation("$.version", "unsupported version '" + version +
                                           "', expected " +
                                           std::string(kRulebookVersion));
  }
  Rulebook rb;
  rb.protocol = schema::String(j, root, "protocol");
  const nlohmann::json& rules = schema::Array(j, root, "rules");
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const std::string path = schema::Index("$.rules", i);
    schema::ExpectObject(rules[i], path, {"command", "purpose", "preceding",
                                          "subsequent", "provenance"});
    CommandRule r;
    r.command = schema::String(rules[i], path, "command");
    if (!IsValidCommandName(r.command)) {
      throw SchemaViolation(schema::Member(path, "command"),
                            "command must be non-empty uppercase without "
                            "whitespace");
    }
    r.purpose = schema::String(rules[i], path, "purpose");
    r.preceding = EdgesFromJson(rules[i], path, "preceding");
    r.subsequent = EdgesFromJson(rules[i], path, "subsequent");
    const nlohmann::json& prov = schema::Array(rules[i], path, "provenance");
    for (std::size_t k = 0; k < prov.size(); ++k) {
      if (!prov[k].is_number_integer() || prov[k].get<long long>() < 0) {
        throw SchemaViolation(
            schema::Index(schema::Member(path, "provenance"), k),
            "expected a non-negative integer");
      }
      r.provenance.push_back(prov[k].get<int>());
    }
    rb.rules.push_back(std::move(r));
  }
  const nlohmann::json& warnings = schema::Array(j, root, "warnings");
  for (std::size_t i = 0; i < warnings.size(); ++i) {
    if (!warnings[i].is_string()) {
      throw SchemaViolation(schema::Index("$.warnings", i), "expected a string");
    }
    rb.warnings.push_back(warnings[i].get<std::string>());
  }
  return rb;
}

Rulebook DeserializeRulebook(std::string_view text) {
  return RulebookFromJson(schema::Parse(text));
}

nlohmann::ordered_json DiagnosticsToJson(const std::vector<Diagnostic>& ds) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const Diagnostic& d : ds) {
    out.push_back({{"kind", ToString(d.kind)},
                   {"subject", d.subject},
                   {"object", d.object},
                   {"message", d.message}});
  }
  return out;
}

}  // namespace fsmflow
