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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fsmflow/error.h"
#include "generators.h"
#include "test_util.h"

namespace {

using ::fsmflow::Compare;
using ::fsmflow::ComputeMetrics;
using ::fsmflow::EvalCounts;
using ::fsmflow::EvalMode;
using ::fsmflow::Evaluate;
using ::fsmflow::Fsm;
using ::fsmflow::LoadGold;
using ::fsmflow::Metrics;
using ::fsmflow::RoundPercent;
using ::fsmflow::testing::BruteForceCounts;
using ::fsmflow::testing::Fixture;

void ExpectRow(const EvalCounts& c, double p, double r, double f1) {
  Metrics m = ComputeMetrics(c);
  EXPECT_NEAR(m.precision, p, 0.01);
  EXPECT_NEAR(m.recall, r, 0.01);
  EXPECT_NEAR(m.f1, f1, 0.01);
  EXPECT_DOUBLE_EQ(RoundPercent(m.precision), p);
  EXPECT_DOUBLE_EQ(RoundPercent(m.recall), r);
  EXPECT_DOUBLE_EQ(RoundPercent(m.f1), f1);
  EXPECT_FALSE(m.undefined());
}

TEST(MetricsTest, PublishedRows) {
  ExpectRow({90, 18, 12}, 83.33, 88.24, 85.71);
  ExpectRow({18, 4, 3}, 81.82, 85.71, 83.72);
}

TEST(MetricsTest, Degenerate) {
  Metrics m = ComputeMetrics({0, 0, 0});
  EXPECT_EQ(m.precision, 0);
  EXPECT_EQ(m.recall, 0);
  EXPECT_EQ(m.f1, 0);
  EXPECT_FALSE(m.precision_defined);
  EXPECT_FALSE(m.recall_defined);
  EXPECT_FALSE(m.f1_defined);
  EXPECT_TRUE(m.undefined());
}

TEST(MetricsTest, PartiallyDefined) {
  Metrics m = ComputeMetrics({0, 0, 5});
  EXPECT_FALSE(m.precision_defined);
  EXPECT_TRUE(m.recall_defined);
  EXPECT_EQ(m.recall, 0);
  // Both defined but zero: harmonic mean has a zero denominator.
  Metrics z = ComputeMetrics({0, 3, 4});
  EXPECT_TRUE(z.precision_defined);
  EXPECT_TRUE(z.recall_defined);
  EXPECT_FALSE(z.f1_defined);
}

TEST(MetricsTest, BoundsAndHarmonicMeanProperty) {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> d(0, 200);
  for (int i = 0; i < 5000; ++i) {
    EvalCounts c{d(rng), d(rng), d(rng)};
    Metrics m = ComputeMetrics(c);
    for (double v : {m.precision, m.recall, m.f1}) {
      ASSERT_GE(v, 0);
      ASSERT_LE(v, 100);
    }
    if (m.precision > 0 && m.recall > 0) {
      ASSERT_LE(m.f1, std::max(m.precision, m.recall) + 1e-9);
      ASSERT_GE(m.f1, std::min(m.precision, m.recall) - 1e-9);
      ASSERT_NEAR(m.f1, 2 * m.precision * m.recall / (m.precision + m.recall), 1e-9);
    }
    if (c.tp + c.fp > 0) ASSERT_NEAR(m.precision, 100.0 * c.tp / (c.tp + c.fp), 1e-9);
    if (c.tp + c.fn > 0) ASSERT_NEAR(m.recall, 100.0 * c.tp / (c.tp + c.fn), 1e-9);
  }
}

TEST(CompareTest, GoldAgainstItself) {
  Fsm gold = LoadGold(Fixture("gold/ftp.json"));
  for (EvalMode mode : {EvalMode::kTriple, EvalMode::kAdjacency}) {
    auto cmp = Compare(gold, gold, mode);
    EXPECT_EQ(cmp.counts.fp, 0);
    EXPECT_EQ(cmp.counts.fn, 0);
    EXPECT_TRUE(cmp.spurious.empty());
    EXPECT_TRUE(cmp.missed.empty());
  }
  EXPECT_EQ(Compare(gold, gold, EvalMode::kTriple).counts.tp,
            static_cast<long long>(gold.transitions.size()));
  auto report = Evaluate(gold, gold, EvalMode::kTriple);
  EXPECT_DOUBLE_EQ(report.metrics.precision, 100);
  EXPECT_DOUBLE_EQ(report.metrics.recall, 100);
  EXPECT_DOUBLE_EQ(report.metrics.f1, 100);
}

TEST(CompareTest, EmptyExtracted) {
  Fsm gold = LoadGold(Fixture("gold/ftp.json"));
  Fsm empty;
  empty.protocol = "FTP";
  empty.states = {"S"};
  empty.initial = "S";
  auto c = Compare(empty, gold, EvalMode::kTriple).counts;
  EXPECT_EQ(c, (EvalCounts{0, 0, static_cast<long long>(gold.transitions.size())}));
}

TEST(CompareTest, Canonicalization) {
  Fsm a;
  a.states = {"Ready ", "init"};
  a.initial = "init";
  a.transitions = {{"init", "play", "Ready "}};
  Fsm b;
  b.states = {"READY", "Init"};
  b.initial = "Init";
  b.transitions = {{" Init", "PLAY", "READY"}};
  EXPECT_EQ(Compare(a, b, EvalMode::kTriple).counts, (EvalCounts{1, 0, 0}));
}

TEST(CompareTest, AdjacencyProjection) {
  // a -X-> b -Y-> c and b -Z-> b gives pairs (X,Y), (X,Z), (Z,Z), (Z,Y).
  Fsm f;
  f.states = {"a", "b", "c"};
  f.initial = "a";
  f.transitions = {{"a", "X", "b"}, {"b", "Y", "c"}, {"b", "Z", "b"}};
  Fsm g;
  g.states = {"p", "q"};
  g.initial = "p";
  g.transitions = {{"p", "X", "q"}, {"q", "Y", "p"}};
  // g yields (X,Y) and (Y,X).
  auto cmp = Compare(f, g, EvalMode::kAdjacency);
  EXPECT_EQ(cmp.counts, (EvalCounts{1, 3, 1}));
}

TEST(CompareTest, MatchesBruteForceOracle) {
  std::mt19937 rng(1234);
  for (int i = 0; i < 1500; ++i) {
    Fsm e = fsmflow::testing::GenerateLooseFsm(rng);
    Fsm g = fsmflow::testing::GenerateLooseFsm(rng);
    for (EvalMode mode : {EvalMode::kTriple, EvalMode::kAdjacency}) {
      auto got = Compare(e, g, mode);
      ASSERT_EQ(got.counts, BruteForceCounts(e, g, mode)) << "case " << i;
      ASSERT_EQ(got.matched.size(), static_cast<std::size_t>(got.counts.tp));
      ASSERT_EQ(got.spurious.size(), static_cast<std::size_t>(got.counts.fp));
      ASSERT_EQ(got.missed.size(), static_cast<std::size_t>(got.counts.fn));
    }
  }
}

TEST(CompareTest, Symmetry) {
  std::mt19937 rng(77);
  for (int i = 0; i < 500; ++i) {
    Fsm e = fsmflow::testing::GenerateLooseFsm(rng);
    Fsm g = fsmflow::testing::GenerateLooseFsm(rng);
    for (EvalMode mode : {EvalMode::kTriple, EvalMode::kAdjacency}) {
      auto ab = Compare(e, g, mode).counts;
      auto ba = Compare(g, e, mode).counts;
      ASSERT_EQ(ab.tp, ba.tp);
      ASSERT_EQ(ab.fp, ba.fn);
      ASSERT_EQ(ab.fn, ba.fp);
    }
  }
}

TEST(EvaluateTest, HandAuthoredNineTwoOne) {
  auto report = Evaluate(LoadGold(Fixture("eval/extracted_tp9_fp2_fn1.json")),
                         LoadGold(Fixture("eval/gold10.json")), EvalMode::kTriple);
  EXPECT_EQ(report.counts, (EvalCounts{9, 2, 1}));
  EXPECT_DOUBLE_EQ(RoundPercent(report.metrics.precision), 81.82);
  EXPECT_DOUBLE_EQ(RoundPercent(report.metrics.recall), 90.00);
  EXPECT_DOUBLE_EQ(RoundPercent(report.metrics.f1), 85.71);
}

TEST(EvaluateTest, PublishedCountPairs) {
  auto ftp = Evaluate(LoadGold(Fixture("eval/ftp_90_18_12.extracted.json")),
                      LoadGold(Fixture("eval/ftp_90_18_12.gold.json")), EvalMode::kTriple);
  EXPECT_EQ(ftp.counts, (EvalCounts{90, 18, 12}));
  auto rtsp = Evaluate(LoadGold(Fixture("eval/rtsp_18_4_3.extracted.json")),
                       LoadGold(Fixture("eval/rtsp_18_4_3.gold.json")), EvalMode::kTriple);
  EXPECT_EQ(rtsp.counts, (EvalCounts{18, 4, 3}));
  std::string table = fsmflow::RenderTable({ftp, rtsp});
  for (const char* cell : {"Protocol", "F1-Score", "83.33%", "88.24%", "85.71%", "81.82%",
                           "83.72%"}) {
    EXPECT_NE(table.find(cell), std::string::npos) << cell << "\n" << table;
  }
}

TEST(EvaluateTest, ModeEchoedAndMayDiffer) {
  Fsm e = LoadGold(Fixture("eval/extracted_tp9_fp2_fn1.json"));
  Fsm g = LoadGold(Fixture("eval/gold10.json"));
  auto triple = Evaluate(e, g, EvalMode::kTriple);
  auto adjacency = Evaluate(e, g, EvalMode::kAdjacency);
  EXPECT_EQ(triple.mode, EvalMode::kTriple);
  EXPECT_EQ(adjacency.mode, EvalMode::kAdjacency);
  EXPECT_EQ(fsmflow::ReportToJson(adjacency)["mode"], "adjacency");
}

TEST(EvaluateTest, ProtocolMismatchWarns) {
  Fsm e = LoadGold(Fixture("gold/ftp.json"));
  Fsm g = LoadGold(Fixture("gold/rtsp.json"));
  EXPECT_FALSE(Evaluate(e, g, EvalMode::kTriple).warnings.empty());
  EXPECT_TRUE(Evaluate(e, e, EvalMode::kTriple).warnings.empty());
}

TEST(EvaluateTest, UndefinedMetricsMarkedInTable) {
  Fsm empty;
  empty.states = {"S"};
  empty.initial = "S";
  auto report = Evaluate(empty, empty, EvalMode::kTriple);
  EXPECT_TRUE(report.metrics.undefined());
  EXPECT_NE(fsmflow::RenderTable({report}).find('*'), std::string::npos);
}

TEST(EvalModeTest, Parse) {
  EXPECT_EQ(fsmflow::ParseEvalMode("triple"), EvalMode::kTriple);
  EXPECT_EQ(fsmflow::ParseEvalMode("adjacency"), EvalMode::kAdjacency);
  EXPECT_THROW(fsmflow::ParseEvalMode("fuzzy"), fsmflow::ModeUnsupported);
}

}  // namespace
