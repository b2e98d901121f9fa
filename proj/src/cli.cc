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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "fsmflow/digest.h"
#include "fsmflow/error.h"
#include "fsmflow/fsm.h"
#include "fsmflow/llm_backend.h"
#include "fsmflow/rfc_parser.h"
#include "fsmflow/rulebook.h"
#include "json.hpp"

#ifndef FSMFLOW_DEFAULT_PROMPTS_DIR
#define FSMFLOW_DEFAULT_PROMPTS_DIR "prompts"
#endif

namespace fsmflow::cli {
namespace {

namespace fs = std::filesystem;
using OrderedJson = nlohmann::ordered_json;

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Records every input and output of a run in manifest.json.
class RunDirectory {
 public:
  RunDirectory(fs::path dir, std::string command)
      : dir_(std::move(dir)), command_(std::move(command)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      throw InputError("cannot create output directory " + dir_.string());
    }
  }

  void AddInput(const fs::path& path) {
    inputs_.push_back({{"path", path.generic_string()},
                       {"sha256", Sha256Hex(ReadFile(path))}});
  }

  void Write(const std::string& name, const std::string& content) {
    fs::path target = dir_ / name;
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content) || !out.flush()) {
      throw InputError("cannot write " + target.string());
    }
    outputs_.push_back(name);
  }

  void Finish(OrderedJson settings) {
    OrderedJson manifest;
    manifest["command"] = command_;
    manifest["inputs"] = inputs_;
    manifest["outputs"] = outputs_;
    manifest["settings"] = std::move(settings);
    Write("manifest.json", manifest.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::string command_;
  OrderedJson inputs_ = OrderedJson::array();
  std::vector<std::string> outputs_;
};

struct ParsedDocument {
  SectionTree tree;
  std::vector<Chunk> chunks;
  AppendixListing appendix;
};

ParsedDocument ParseDocument(const RunConfig& cfg) {
  RawDocument doc = LoadDocument(cfg.input_rfc);
  std::string clean = StripArtifacts(doc);
  ParsedDocument parsed;
  std::string title = cfg.protocol.empty() ? doc.source_name : cfg.protocol;
  parsed.tree = ParseTree(clean, title, doc.source_name);
  parsed.chunks = CollectLeafChunks(parsed.tree, cfg.chain.max_chunk_chars);
  parsed.appendix = BuildAppendix(parsed.tree);
  return parsed;
}

std::string_view BackendName(BackendKind kind) {
  switch (kind) {
    case BackendKind::kLive:
      return "live";
    case BackendKind::kReplay:
      return "replay";
    case BackendKind::kRecord:
      return "record";
  }
  return "?";
}

int CmdParse(const RunConfig& cfg, std::ostream& out) {
  if (cfg.input_rfc.empty()) throw InputError("parse requires --input");
  ParsedDocument parsed = ParseDocument(cfg);
  RunDirectory run(cfg.output_dir, "parse");
  run.AddInput(cfg.input_rfc);
  run.Write("tree.json", TreeToJson(parsed.tree).dump(2) + "\n");
  run.Write("appendix.txt", parsed.appendix.Render());
  run.Write("chunks.json", ChunksToJson(parsed.chunks).dump(2) + "\n");
  run.Finish({{"max_chunk_chars", cfg.chain.max_chunk_chars}});
  out << "parsed " << parsed.appendix.entries.size() << " sections into "
      << parsed.chunks.size() << " chunks -> " << cfg.output_dir << "\n";
  return kExitOk;
}

std::shared_ptr<ChatBackend> MakeBackend(const RunConfig& cfg) {
  auto live = [&] {
    LiveBackendConfig live_cfg;
    live_cfg.endpoint_url = cfg.endpoint_url;
    live_cfg.api_key = ApiKeyFromEnvironment();
    live_cfg.retry.max_attempts = cfg.retry_max;
    return std::make_shared<LiveBackend>(std::move(live_cfg));
  };
  switch (cfg.backend) {
    case BackendKind::kLive:
      return live();
    case BackendKind::kReplay:
      if (!cfg.replay_store) throw InputError("--backend replay requires --replay-store");
      return std::make_shared<ReplayBackend>(ReplayStore::Load(*cfg.replay_store));
    case BackendKind::kRecord:
      if (!cfg.replay_store) throw InputError("--backend record requires --replay-store");
      return std::make_shared<RecordingBackend>(live(), *cfg.replay_store);
  }
  throw InputError("unknown backend");
}

int CmdExtract(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.input_rfc.empty()) throw InputError("extract requires --input");
  // Credentials, stores and templates are checked before any model call.
  std::shared_ptr<ChatBackend> backend = MakeBackend(cfg);
  PromptTemplates templates = PromptTemplates::LoadFromDirectory(cfg.prompts_dir);
  ParsedDocument parsed = ParseDocument(cfg);
  if (parsed.chunks.empty()) throw InputError(cfg.input_rfc + " has no non-blank leaf sections");

  PromptChain chain(*backend, templates, cfg.chain);
  ChainResult result = chain.Run(parsed.chunks, parsed.appendix);
  Fsm fsm = FsmFromRulebook(result.rulebook);
  std::vector<Diagnostic> diagnostics = Validate(result.rulebook);

  RunDirectory run(cfg.output_dir, "extract");
  run.AddInput(cfg.input_rfc);
  for (int s = 1; s <= 3; ++s) {
    run.AddInput(fs::path(cfg.prompts_dir) / ("stage" + std::to_string(s) + ".txt"));
  }
  if (cfg.backend == BackendKind::kReplay) run.AddInput(*cfg.replay_store);
  run.Write("rulebook.json", SerializeRulebook(result.rulebook));
  run.Write("fsm.json", ExportJson(fsm));
  run.Write("fsm.dot", ExportDot(fsm));
  OrderedJson report = RunReportToJson(result.report);
  report["diagnostics"] = DiagnosticsToJson(diagnostics);
  run.Write("run_report.json", report.dump(2) + "\n");
  run.Finish({{"protocol", cfg.chain.protocol},
              {"backend", BackendName(cfg.backend)},
              {"stage_models", cfg.chain.stage_model_ids},
              {"max_chunk_chars", cfg.chain.max_chunk_chars},
              {"appendix_in_context", cfg.chain.appendix_in_context},
              {"temperature", cfg.chain.temperature},
              {"max_tokens", cfg.chain.max_tokens}});

  for (const SkippedChunk& s : result.report.skipped_chunks) {
    err << "warning: skipped chunk " << s.ordinal << " (" << s.path << "): " << s.reason
        << "\n";
  }
  out << "extracted " << result.rulebook.rules.size() << " commands, "
      << fsm.transitions.size() << " transitions from " << result.report.chunks
      << " chunks -> " << cfg.output_dir << "\n";
  return kExitOk;
}

int CmdEval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.input_rfc.empty() || cfg.gold.empty()) {
    throw InputError("eval requires --input <extracted fsm.json> and --gold <gold fsm.json>");
  }
  EvalMode mode = ParseEvalMode(cfg.eval_mode);
  Fsm extracted = LoadGold(cfg.input_rfc);
  Fsm gold = LoadGold(cfg.gold);
  EvalReport report = Evaluate(extracted, gold, mode);
  for (const std::string& w : report.warnings) err << "warning: " << w << "\n";

  RunDirectory run(cfg.output_dir, "eval");
  run.AddInput(cfg.input_rfc);
  run.AddInput(cfg.gold);
  run.Write("eval.json", ReportToJson(report).dump(2) + "\n");
  run.Finish({{"mode", ToString(mode)}});
  out << RenderTable({report});
  return kExitOk;
}

int CmdExportDot(const RunConfig& cfg, bool out_given, std::ostream& out) {
  if (cfg.input_rfc.empty()) throw InputError("export-dot requires --input <fsm.json>");
  Fsm fsm = LoadGold(cfg.input_rfc);
  if (!out_given) {
    out << ExportDot(fsm);
    return kExitOk;
  }
  RunDirectory run(cfg.output_dir, "export-dot");
  run.AddInput(cfg.input_rfc);
  run.Write("fsm.dot", ExportDot(fsm));
  run.Finish(OrderedJson::object());
  return kExitOk;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.prompts_dir = FSMFLOW_DEFAULT_PROMPTS_DIR;
  std::string backend = "replay";
  std::string replay_store;
  std::string model_id(kDefaultModelId);
  std::string stage_models[3];

  CLI::App app{"Extract protocol state machines from RFC text", "fsmflow"};
  app.set_config("--config", "", "TOML key = value file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  app.add_option("--input", cfg.input_rfc,
                 "RFC text (parse, extract) or extracted FSM JSON (eval, export-dot)");
  app.add_option("--protocol", cfg.protocol, "Protocol name recorded in outputs");
  app.add_option("--backend", backend, "Chat backend")
      ->check(CLI::IsMember({"live", "replay", "record"}));
  app.add_option("--replay-store,--replay_store", replay_store, "Replay store JSON file");
  app.add_option("--out", cfg.output_dir, "Output directory");
  app.add_option("--mode", cfg.eval_mode, "Evaluation mode: triple or adjacency");
  app.add_option("--parallelism", cfg.chain.parallelism, "Chunks processed concurrently")
      ->check(CLI::Range(1, kMaxParallelism));
  app.add_option("--gold", cfg.gold, "Gold FSM JSON (eval)");
  app.add_option("--prompts", cfg.prompts_dir, "Prompt template directory");
  app.add_option("--endpoint_url", cfg.endpoint_url, "Chat-completions endpoint");
  app.add_option("--model_id", model_id, "Model for every stage");
  app.add_option("--stage1_model", stage_models[0], "Override model for stage 1");
  app.add_option("--stage2_model", stage_models[1], "Override model for stage 2");
  app.add_option("--stage3_model", stage_models[2], "Override model for stage 3");
  app.add_option("--max_tokens", cfg.chain.max_tokens)->check(CLI::PositiveNumber);
  app.add_option("--temperature", cfg.chain.temperature)->check(CLI::Range(0.0, 1.0));
  app.add_option("--retry_max", cfg.retry_max)->check(CLI::Range(1, 20));
  app.add_option("--max_chunk_chars", cfg.chain.max_chunk_chars)
      ->check(CLI::Range(kMinMaxChunkChars, std::size_t{1} << 24));
  app.add_option("--appendix_in_context", cfg.chain.appendix_in_context);

  CLI::App* parse = app.add_subcommand("parse", "Write tree.json, appendix.txt, chunks.json");
  CLI::App* extract = app.add_subcommand(
      "extract", "Run the prompt chain; write rulebook.json, fsm.json, fsm.dot, run_report.json");
  CLI::App* eval = app.add_subcommand("eval", "Score an extracted FSM against a gold FSM");
  CLI::App* export_dot = app.add_subcommand("export-dot", "Render an FSM JSON file as DOT");
  for (CLI::App* sub : {parse, extract, eval, export_dot}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  cfg.backend = backend == "live"     ? BackendKind::kLive
                : backend == "record" ? BackendKind::kRecord
                                      : BackendKind::kReplay;
  if (!replay_store.empty()) cfg.replay_store = replay_store;
  cfg.chain.protocol = cfg.protocol;
  for (int s = 0; s < 3; ++s) {
    cfg.chain.stage_model_ids[s] = stage_models[s].empty() ? model_id : stage_models[s];
  }

  try {
    if (parse->parsed()) return CmdParse(cfg, out);
    if (extract->parsed()) return CmdExtract(cfg, out, err);
    if (eval->parsed()) return CmdEval(cfg, out, err);
    return CmdExportDot(cfg, app.count("--out") > 0, out);
  } catch (const BackendError& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace fsmflow::cli
