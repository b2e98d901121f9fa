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

#ifndef FSMFLOW_EVALUATOR_H_
#define FSMFLOW_EVALUATOR_H_

#include <string>
#include <string_view>
#include <vector>

#include "fsmflow/fsm.h"
#include "json.hpp"

namespace fsmflow {

/// How transitions are counted. kTriple matches canonicalized
/// (from, input, to) triples; kAdjacency matches ordered input pairs (a, b)
/// such that some state is entered on `a` and left on `b`.
enum class EvalMode { kAdjacency, kTriple };

/// Throws ModeUnsupported for anything but "adjacency" or "triple".
EvalMode ParseEvalMode(std::string_view name);
std::string_view ToString(EvalMode mode);

struct EvalCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;

  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

/// Percentages. A metric whose denominator is zero is reported as 0 with
/// its `*_defined` flag cleared.
struct Metrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  bool precision_defined = false;
  bool recall_defined = false;
  bool f1_defined = false;

  bool undefined() const {
    return !precision_defined || !recall_defined || !f1_defined;
  }
};

Metrics ComputeMetrics(const EvalCounts& c);

/// Rounds a percentage to the two decimals used in reports.
double RoundPercent(double value);

/// A matched unit rendered as text: `from -[INPUT]-> to` in triple mode,
/// `A -> B` in adjacency mode.
struct Comparison {
  EvalCounts counts;
  std::vector<std::string> matched;
  std::vector<std::string> spurious;
  std::vector<std::string> missed;
};

/// States compare case-insensitively after trimming; inputs are trimmed and
/// uppercased.
Comparison Compare(const Fsm& extracted, const Fsm& gold, EvalMode mode);

struct EvalReport {
  std::string protocol;
  EvalMode mode = EvalMode::kTriple;
  EvalCounts counts;
  Metrics metrics;
  std::vector<std::string> matched;
  std::vector<std::string> spurious;
  std::vector<std::string> missed;
  std::vector<std::string> warnings;
};

EvalReport Evaluate(const Fsm& extracted, const Fsm& gold, EvalMode mode);

nlohmann::ordered_json ReportToJson(const EvalReport& report);

/// Table with the columns Protocol, TP, FP, FN, Precision, Recall, F1-Score.
std::string RenderTable(const std::vector<EvalReport>& rows);

}  // namespace fsmflow

#endif  // FSMFLOW_EVALUATOR_H_
