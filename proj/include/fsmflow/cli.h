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

#ifndef FSMFLOW_CLI_H_
#define FSMFLOW_CLI_H_

#include <iosfwd>
#include <optional>
#include <string>

#include "fsmflow/evaluator.h"
#include "fsmflow/prompt_chain.h"

namespace fsmflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;    // bad arguments or input files
inline constexpr int kExitRuntime = 3;  // backend or other runtime failure

enum class BackendKind { kLive, kReplay, kRecord };

struct RunConfig {
  std::string input_rfc;
  std::string protocol;
  BackendKind backend = BackendKind::kReplay;
  std::optional<std::string> replay_store;
  std::string output_dir = "fsmflow-out";
  std::string prompts_dir;
  std::string gold;
  ChainConfig chain;
  std::string eval_mode = "triple";
  std::string endpoint_url = "https://api.groq.com/openai/v1/chat/completions";
  int retry_max = 5;
};

/// Entry point behind the `fsmflow` binary. Subcommands: parse, extract,
/// eval, export-dot. Returns the process exit code.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fsmflow::cli

#endif  // FSMFLOW_CLI_H_
