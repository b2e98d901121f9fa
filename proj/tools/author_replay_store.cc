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

// Builds a replay store from a response script: runs the parse + prompt
// chain pipeline against a ScriptedBackend and records every exchange.
// Used to author and refresh the stores under fixtures/replay/.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "fsmflow/error.h"
#include "fsmflow/llm_backend.h"
#include "fsmflow/prompt_chain.h"
#include "fsmflow/rfc_parser.h"

int main(int argc, char** argv) {
  CLI::App app{"Record a scripted prompt-chain session into a replay store"};
  std::string input, script_path, store_path, prompts = FSMFLOW_DEFAULT_PROMPTS_DIR;
  fsmflow::ChainConfig cfg;
  cfg.parallelism = 1;
  app.add_option("--input", input, "RFC text")->required();
  app.add_option("--script", script_path, "Response script JSON")->required();
  app.add_option("--store", store_path, "Replay store to (re)write")->required();
  app.add_option("--prompts", prompts, "Prompt template directory");
  app.add_option("--protocol", cfg.protocol);
  app.add_option("--max_chunk_chars", cfg.max_chunk_chars);
  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(script_path, std::ios::binary);
    if (!in) throw fsmflow::InputError("cannot read " + script_path);
    std::ostringstream text;
    text << in.rdbuf();
    auto scripted =
        std::make_shared<fsmflow::ScriptedBackend>(fsmflow::ScriptedBackend::ParseScript(text.str()));

    std::filesystem::remove(store_path);
    fsmflow::RecordingBackend recorder(scripted, store_path);

    fsmflow::RawDocument doc = fsmflow::LoadDocument(input);
    fsmflow::SectionTree tree = fsmflow::ParseTree(
        fsmflow::StripArtifacts(doc), cfg.protocol.empty() ? doc.source_name : cfg.protocol,
        doc.source_name);
    fsmflow::PromptChain chain(recorder, fsmflow::PromptTemplates::LoadFromDirectory(prompts),
                               cfg);
    fsmflow::ChainResult result =
        chain.Run(fsmflow::CollectLeafChunks(tree, cfg.max_chunk_chars),
                  fsmflow::BuildAppendix(tree));
    std::cout << "recorded " << store_path << ": " << result.rulebook.rules.size()
              << " commands, " << result.report.skipped_chunks.size()
              << " skipped chunks\n";
    if (scripted->unused() > 0) {
      std::cerr << "warning: " << scripted->unused() << " script entries were never used\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
