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

#include "fsmflow/cli.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "fake_server.h"
#include "fsmflow/llm_backend.h"
#include "fsmflow/prompt_chain.h"
#include "fsmflow/rfc_parser.h"
#include "fsmflow/rulebook.h"
#include "test_util.h"

namespace {

using ::fsmflow::testing::FakeChatServer;
using ::fsmflow::testing::Fixture;
using ::fsmflow::testing::ReadFile;
using ::fsmflow::testing::TempDir;
using ::fsmflow::testing::WriteFile;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult RunCli(std::vector<std::string> args) {
  args.insert(args.begin(), "fsmflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = fsmflow::cli::Run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string F(const std::string& rel) { return Fixture(rel).string(); }

CliResult Extract(const std::filesystem::path& out, const std::string& store) {
  return RunCli({"extract", "--input", F("rfc/ftp_excerpt.txt"), "--protocol", "FTP",
                 "--backend", "replay", "--replay-store", F(store), "--out", out.string()});
}

TEST(CliParseTest, WritesExpectedFiles) {
  TempDir dir;
  auto r = RunCli({"parse", "--input", F("rfc/ftp_excerpt.txt"), "--protocol", "FTP", "--out",
                   dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"tree.json", "appendix.txt", "chunks.json"}) {
    EXPECT_EQ(ReadFile(dir / name),
              ReadFile(Fixture(std::string("expected/ftp_excerpt.") + name)))
        << name;
  }
  auto manifest = nlohmann::json::parse(ReadFile(dir / "manifest.json"));
  EXPECT_EQ(manifest["command"], "parse");
  EXPECT_EQ(manifest["inputs"][0]["sha256"].get<std::string>().size(), 64u);
}

TEST(CliParseTest, RerunIsByteIdentical) {
  TempDir a, b;
  for (auto* dir : {&a, &b}) {
    ASSERT_EQ(RunCli({"parse", "--input", F("rfc/ftp_excerpt.txt"), "--out",
                      dir->path().string()})
                  .code,
              0);
  }
  for (const char* name : {"tree.json", "appendix.txt", "chunks.json", "manifest.json"}) {
    EXPECT_EQ(ReadFile(a / name), ReadFile(b / name)) << name;
  }
}

TEST(CliParseTest, InputErrorsExitTwo) {
  TempDir dir;
  WriteFile(dir / "empty.txt", "");
  WriteFile(dir / "prose.txt", "No headings at all.\n");
  EXPECT_EQ(RunCli({"parse", "--input", (dir / "empty.txt").string(), "--out",
                    (dir / "o").string()})
                .code,
            fsmflow::cli::kExitUsage);
  auto r = RunCli({"parse", "--input", (dir / "prose.txt").string(), "--out",
                   (dir / "o").string()});
  EXPECT_EQ(r.code, fsmflow::cli::kExitUsage);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_EQ(RunCli({"parse"}).code, fsmflow::cli::kExitUsage);
  EXPECT_EQ(RunCli({}).code, fsmflow::cli::kExitUsage);
  EXPECT_EQ(RunCli({"parse", "--bogus"}).code, fsmflow::cli::kExitUsage);
  EXPECT_EQ(RunCli({"--help"}).code, 0);
}

TEST(CliExtractTest, ReplayWritesArtifacts) {
  TempDir dir;
  auto r = Extract(dir.path(), "replay/ftp_excerpt.store.json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(ReadFile(dir / "rulebook.json"),
            ReadFile(Fixture("expected/ftp_excerpt.rulebook.json")));
  EXPECT_EQ(ReadFile(dir / "fsm.json"), ReadFile(Fixture("expected/ftp_excerpt.fsm.json")));
  EXPECT_NE(ReadFile(dir / "fsm.dot").find("digraph"), std::string::npos);
  auto report = nlohmann::json::parse(ReadFile(dir / "run_report.json"));
  EXPECT_EQ(report["chunks"], 9);
  EXPECT_TRUE(report["skipped_chunks"].empty());
  EXPECT_TRUE(report.contains("diagnostics"));
}

TEST(CliExtractTest, CorruptChunkSkippedExitZero) {
  TempDir dir;
  auto r = Extract(dir.path(), "replay/ftp_excerpt_corrupt.store.json");
  ASSERT_EQ(r.code, 0) << r.err;
  auto report = nlohmann::json::parse(ReadFile(dir / "run_report.json"));
  ASSERT_EQ(report["skipped_chunks"].size(), 1u);
  EXPECT_EQ(report["skipped_chunks"][0]["path"], "3.2");
  EXPECT_NE(r.err.find("skipped chunk"), std::string::npos);
}

TEST(CliExtractTest, ReplayMissExitsThree) {
  TempDir dir;
  WriteFile(dir / "store.json", "[]\n");
  auto r = RunCli({"extract", "--input", F("rfc/ftp_excerpt.txt"), "--protocol", "FTP",
                   "--replay-store", (dir / "store.json").string(), "--out",
                   (dir / "o").string()});
  EXPECT_EQ(r.code, fsmflow::cli::kExitRuntime);
  EXPECT_NE(r.err.find("fingerprint"), std::string::npos);
}

TEST(CliExtractTest, LiveWithoutKeyExitsTwo) {
  unsetenv(fsmflow::kApiKeyEnv);
  TempDir dir;
  auto r = RunCli({"extract", "--input", F("rfc/ftp_excerpt.txt"), "--backend", "live",
                   "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, fsmflow::cli::kExitUsage);
  EXPECT_NE(r.err.find(fsmflow::kApiKeyEnv), std::string::npos) << r.err;
}

// Serves the authored fixture script over HTTP so record mode sees a live API.
std::unique_ptr<FakeChatServer> ScriptServer() {
  auto scripted = std::make_shared<fsmflow::ScriptedBackend>(
      fsmflow::ScriptedBackend::ParseScript(ReadFile(Fixture("replay/ftp_excerpt.script.json"))));
  return std::make_unique<FakeChatServer>([scripted](int, const std::string& body) {
    auto j = nlohmann::json::parse(body);
    fsmflow::CompletionRequest req;
    req.system_prompt = j["messages"][0]["content"];
    req.user_prompt = j["messages"][1]["content"];
    req.model_id = j["model"];
    try {
      return std::make_pair(200, FakeChatServer::OkBody(scripted->Complete(req).text));
    } catch (const std::exception& e) {
      return std::make_pair(400, std::string(e.what()));
    }
  });
}

TEST(CliRecordTest, RecordThenReplayMatches) {
  auto server = ScriptServer();
  TempDir dir;
  setenv(fsmflow::kApiKeyEnv, "test-key", 1);
  auto rec = RunCli({"extract", "--input", F("rfc/ftp_excerpt.txt"), "--protocol", "FTP",
                     "--backend", "record", "--replay-store", (dir / "store.json").string(),
                     "--endpoint_url", server->url(), "--out", (dir / "rec").string()});
  unsetenv(fsmflow::kApiKeyEnv);
  ASSERT_EQ(rec.code, 0) << rec.err;
  auto replay = RunCli({"extract", "--input", F("rfc/ftp_excerpt.txt"), "--protocol", "FTP",
                        "--backend", "replay", "--replay-store", (dir / "store.json").string(),
                        "--out", (dir / "rep").string()});
  ASSERT_EQ(replay.code, 0) << replay.err;
  for (const char* name : {"rulebook.json", "fsm.json", "fsm.dot", "run_report.json"}) {
    EXPECT_EQ(ReadFile(dir / "rec" / name), ReadFile(dir / "rep" / name)) << name;
  }
  EXPECT_EQ(ReadFile(dir / "rep" / "rulebook.json"),
            ReadFile(Fixture("expected/ftp_excerpt.rulebook.json")));
  for (const auto& c : server->captured()) EXPECT_EQ(c.authorization, "Bearer test-key");
}

TEST(CliRecordTest, UnwritableStoreFailsBeforeCalls) {
  auto server = ScriptServer();
  setenv(fsmflow::kApiKeyEnv, "k", 1);
  TempDir dir;
  auto r = RunCli({"extract", "--input", F("rfc/ftp_excerpt.txt"), "--backend", "record",
                   "--replay-store", "/nonexistent-dir/store.json", "--endpoint_url",
                   server->url(), "--out", (dir / "o").string()});
  unsetenv(fsmflow::kApiKeyEnv);
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(server->captured().empty());
}

TEST(CliEvalTest, GoldAgainstItself) {
  TempDir dir;
  auto r = RunCli({"eval", "--input", F("gold/ftp.json"), "--gold", F("gold/ftp.json"), "--out",
                   dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("100.00%"), std::string::npos) << r.out;
  auto report = nlohmann::json::parse(ReadFile(dir / "eval.json"));
  EXPECT_EQ(report["counts"]["fp"], 0);
  EXPECT_EQ(report["counts"]["fn"], 0);
}

TEST(CliEvalTest, FtpCountsRow) {
  TempDir dir;
  auto r = RunCli({"eval", "--input", F("eval/ftp_90_18_12.extracted.json"), "--gold",
                   F("eval/ftp_90_18_12.gold.json"), "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* cell : {"90", "18", "12", "83.33%", "88.24%", "85.71%"}) {
    EXPECT_NE(r.out.find(cell), std::string::npos) << cell;
  }
}

TEST(CliEvalTest, ProtocolMismatchWarns) {
  TempDir dir;
  auto r = RunCli({"eval", "--input", F("gold/ftp.json"), "--gold", F("gold/rtsp.json"), "--out",
                   dir.path().string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(CliEvalTest, BadModeAndBadGold) {
  TempDir dir;
  EXPECT_EQ(RunCli({"eval", "--input", F("gold/ftp.json"), "--gold", F("gold/ftp.json"),
                    "--mode", "fuzzy", "--out", dir.path().string()})
                .code,
            fsmflow::cli::kExitUsage);
  WriteFile(dir / "bad.json", R"({"version":"fsm/9"})");
  EXPECT_EQ(RunCli({"eval", "--input", (dir / "bad.json").string(), "--gold",
                    F("gold/ftp.json"), "--out", dir.path().string()})
                .code,
            fsmflow::cli::kExitUsage);
}

TEST(CliConfigTest, FileValuesAndFlagPrecedence) {
  TempDir dir;
  WriteFile(dir / "run.toml", "mode = \"adjacency\"\ngold = \"" + F("gold/ftp.json") + "\"\n");
  auto from_file = RunCli({"eval", "--config", (dir / "run.toml").string(), "--input",
                           F("gold/ftp.json"), "--out", (dir / "a").string()});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(nlohmann::json::parse(ReadFile(dir / "a" / "eval.json"))["mode"], "adjacency");
  auto overridden = RunCli({"eval", "--config", (dir / "run.toml").string(), "--input",
                            F("gold/ftp.json"), "--mode", "triple", "--out",
                            (dir / "b").string()});
  ASSERT_EQ(overridden.code, 0) << overridden.err;
  EXPECT_EQ(nlohmann::json::parse(ReadFile(dir / "b" / "eval.json"))["mode"], "triple");

  WriteFile(dir / "store.toml", "backend = \"replay\"\nreplay_store = \"" +
                                    F("replay/ftp_excerpt.store.json") +
                                    "\"\nprotocol = \"FTP\"\nparallelism = 2\n");
  auto extract = RunCli({"extract", "--config", (dir / "store.toml").string(), "--input",
                         F("rfc/ftp_excerpt.txt"), "--out", (dir / "c").string()});
  ASSERT_EQ(extract.code, 0) << extract.err;
  EXPECT_EQ(ReadFile(dir / "c" / "rulebook.json"),
            ReadFile(Fixture("expected/ftp_excerpt.rulebook.json")));

  WriteFile(dir / "typo.toml", "paralelism = 2\n");
  EXPECT_EQ(RunCli({"parse", "--config", (dir / "typo.toml").string(), "--input",
                    F("rfc/ftp_excerpt.txt"), "--out", (dir / "d").string()})
                .code,
            fsmflow::cli::kExitUsage);
}

TEST(CliExportDotTest, StdoutAndFile) {
  TempDir dir;
  auto r = RunCli({"export-dot", "--input", F("gold/ftp.json")});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("digraph \"FTP\""), std::string::npos);
  auto again = RunCli({"export-dot", "--input", F("gold/ftp.json")});
  EXPECT_EQ(again.out, r.out);
  ASSERT_EQ(RunCli({"export-dot", "--input", F("gold/ftp.json"), "--out", dir.path().string()})
                .code,
            0);
  EXPECT_EQ(ReadFile(dir / "fsm.dot"), r.out);
}

// The checked-in stores must match what the scripts record against the
// current prompt templates; a template edit without re-authoring fails here.
TEST(FixtureSyncTest, StoresMatchScripts) {
  for (const char* name : {"ftp_excerpt", "ftp_excerpt_corrupt"}) {
    TempDir dir;
    auto scripted = std::make_shared<fsmflow::ScriptedBackend>(fsmflow::ScriptedBackend::ParseScript(
        ReadFile(Fixture(std::string("replay/") + name + ".script.json"))));
    {
      fsmflow::RecordingBackend recorder(scripted, dir / "store.json");
      auto doc = fsmflow::LoadDocument(Fixture("rfc/ftp_excerpt.txt"));
      auto tree = fsmflow::ParseTree(fsmflow::StripArtifacts(doc), "FTP", doc.source_name);
      fsmflow::ChainConfig cfg;
      cfg.protocol = "FTP";
      cfg.parallelism = 1;
      fsmflow::PromptChain chain(
          recorder,
          fsmflow::PromptTemplates::LoadFromDirectory(fsmflow::testing::PromptsDir()), cfg);
      chain.Run(fsmflow::CollectLeafChunks(tree), fsmflow::BuildAppendix(tree));
    }
    EXPECT_EQ(scripted->unused(), 0u) << name;
    EXPECT_EQ(ReadFile(dir / "store.json"),
              ReadFile(Fixture(std::string("replay/") + name + ".store.json")))
        << name;
  }
}

}  // namespace
