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

#include "fsmflow/evaluator.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

#include "fsmflow/error.h"

namespace fsmflow {

EvalMode ParseEvalMode(std::string_view name) {
  if (name == "adjacency") return EvalMode::kAdjacency;
  if (name == "triple") return EvalMode::kTriple;
  throw ModeUnsupported(std::string(name));
}

std::string_view ToString(EvalMode mode) {
  switch (mode) {
    case EvalMode::kAdjacency:
      return "adjacency";
    case EvalMode::kTriple:
      return "triple";
  }
  throw ModeUnsupported(std::to_string(static_cast<int>(mode)));
}

Metrics ComputeMetrics(const EvalCounts& c) {
  Metrics m;
  if (c.tp + c.fp > 0) {
    m.precision = 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    m.precision_defined = true;
  }
  if (c.tp + c.fn > 0) {
    m.recall = 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    m.recall_defined = true;
  }
  if (m.precision_defined && m.recall_defined && m.precision + m.recall > 0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    m.f1_defined = true;
  }
  return m;
}

double RoundPercent(double value) { return std::round(value * 100.0) / 100.0; }

namespace {

std::string Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string CanonicalState(std::string_view s) {
  std::string out = Trim(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string CanonicalInput(std::string_view s) {
  std::string out = Trim(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::set<std::string> TripleUnits(const Fsm& fsm) {
  std::set<std::string> units;
  for (const Transition& t : fsm.transitions) {
    units.insert(CanonicalState(t.from) + " -[" + CanonicalInput(t.input) +
                 "]-> " + CanonicalState(t.to));
  }
  return units;
}

std::set<std::string> AdjacencyUnits(const Fsm& fsm) {
  std::set<std::tuple<std::string, std::string, std::string>> canonical;
  for (const Transition& t : fsm.transitions) {
    canonical.emplace(CanonicalState(t.from), CanonicalInput(t.input),
                      CanonicalState(t.to));
  }
  std::set<std::string> units;
  for (const auto& [from_a, a, to_a] : canonical) {
    for (const auto& [from_b, b, to_b] : canonical) {
      if (to_a == from_b) units.insert(a + " -> " + b);
    }
  }
  return units;
}

}  // namespace

Comparison Compare(const Fsm& extracted, const Fsm& gold, EvalMode mode) {
  std::set<std::string> ours;
  std::set<std::string> theirs;
  switch (mode) {
    case EvalMode::kTriple:
      ours = TripleUnits(extracted);
      theirs = TripleUnits(gold);
      break;
    case EvalMode::kAdjacency:
      ours = AdjacencyUnits(extracted);
      theirs = AdjacencyUnits(gold);
      break;
    default:
      throw ModeUnsupported(std::to_string(static_cast<int>(mode)));
  }
  Comparison c;
  std::set_intersection(ours.begin(), ours.end(), theirs.begin(), theirs.end(),
                        std::back_inserter(c.matched));
  std::set_difference(ours.begin(), ours.end(), theirs.begin(), theirs.end(),
                      std::back_inserter(c.spurious));
  std::set_difference(theirs.begin(), theirs.end(), ours.begin(), ours.end(),
                      std::back_inserter(c.missed));
  c.counts = {static_cast<long long>(c.matched.size()),
              static_cast<long long>(c.spurious.size()),
              static_cast<long long>(c.missed.size())};
  return c;
}

EvalReport Evaluate(const Fsm& extracted, const Fsm& gold, EvalMode mode) {
  Comparison c = Compare(extracted, gold, mode);
  EvalReport r;
  r.protocol = gold.protocol;
  r.mode = mode;
  r.counts = c.counts;
  r.metrics = ComputeMetrics(c.counts);
  r.matched = std::move(c.matched);
  r.spurious = std::move(c.spurious);
  r.missed = std::move(c.missed);
  if (CanonicalState(extracted.protocol) != CanonicalState(gold.protocol)) {
    r.warnings.push_back("protocol mismatch: extracted '" + extracted.protocol +
                         "' vs gold '" + gold.protocol + "'");
  }
  return r;
}

nlohmann::ordered_json ReportToJson(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["protocol"] = report.protocol;
  j["mode"] = ToString(report.mode);
  j["counts"] = {{"tp", report.counts.tp},
                 {"fp", report.counts.fp},
                 {"fn", report.counts.fn}};
  j["precision"] = RoundPercent(report.metrics.precision);
  j["recall"] = RoundPercent(report.metrics.recall);
  j["f1"] = RoundPercent(report.metrics.f1);
  j["undefined"] = {{"precision", !report.metrics.precision_defined},
                    {"recall", !report.metrics.recall_defined},
                    {"f1", !report.metrics.f1_defined}};
  j["matched"] = report.matched;
  j["spurious"] = report.spurious;
  j["missed"] = report.missed;
  j["warnings"] = report.warnings;
  return j;
}

namespace {

std::string Percent(double value, bool defined) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%%s", RoundPercent(value),
                defined ? "" : "*");
  return buf;
}

}  // namespace

std::string RenderTable(const std::vector<EvalReport>& rows) {
  const std::vector<std::string> header = {"Protocol", "TP", "FP", "FN",
                                           "Precision", "Recall", "F1-Score"};
  std::vector<std::vector<std::string>> cells;
  bool any_undefined = false;
  for (const EvalReport& r : rows) {
    const Metrics& m = r.metrics;
    any_undefined = any_undefined || m.undefined();
    cells.push_back({r.protocol, std::to_string(r.counts.tp),
                     std::to_string(r.counts.fp), std::to_string(r.counts.fn),
                     Percent(m.precision, m.precision_defined),
                     Percent(m.recall, m.recall_defined),
                     Percent(m.f1, m.f1_defined)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& row) {
    std::string out = "|";
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += ' ' + row[c] + std::string(width[c] - row[c].size(), ' ') + " |";
    }
    return out + "\n";
  };
  std::string rule = "|";
  for (std::size_t w : width) rule += std::string(w + 2, '-') + "|";
  rule += "\n";

  std::string out = line(header) + rule;
  for (const auto& row : cells) out += line(row);
  if (any_undefined) out += "* undefined (zero denominator), reported as 0.00\n";
  return out;
}

}  // namespace fsmflow
