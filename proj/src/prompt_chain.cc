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

#include "fsmflow/prompt_chain.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fsmflow/error.h"

namespace fsmflow {
namespace {

using Json = nlohmann::json;

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string TrimCopy(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string CanonicalCategory(std::string_view raw) {
  std::string c = Lower(TrimCopy(raw));
  std::replace(c.begin(), c.end(), ' ', '-');
  std::replace(c.begin(), c.end(), '_', '-');
  for (std::string_view known : kCommandCategories) {
    if (c == known) return c;
  }
  return "other";
}

std::string StringOr(const Json& obj, std::string_view key, std::string fallback = "") {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return fallback;
  return it->get<std::string>();
}

std::vector<std::string> StringList(const Json& obj, std::string_view key) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end()) return out;
  if (it->is_string()) {
    out.push_back(it->get<std::string>());
    return out;
  }
  if (!it->is_array()) return out;
  for (const Json& v : *it) {
    if (v.is_string()) out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<std::string> CommandList(const Json& obj, std::string_view key) {
  std::vector<std::string> out;
  for (const std::string& raw : StringList(obj, key)) {
    std::string name = NormalizeCommandName(raw);
    if (!IsValidCommandName(name)) continue;
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

// Model replies say "Yes, transitions to ..." as often as `true`.
bool ChangesState(const Json& edge) {
  auto it = edge.find("changes_state");
  if (it == edge.end()) return false;
  if (it->is_boolean()) return it->get<bool>();
  if (it->is_string()) {
    std::string s = Lower(TrimCopy(it->get<std::string>()));
    return s.rfind("yes", 0) == 0 || s.rfind("true", 0) == 0;
  }
  return false;
}

const Json* ArrayPayload(const Json& j, std::string_view wrapper_key) {
  if (j.is_array()) return &j;
  if (j.is_object()) {
    auto it = j.find(wrapper_key);
    if (it != j.end() && it->is_array()) return &*it;
  }
  return nullptr;
}

bool IsInventoryShape(const Json& j) { return ArrayPayload(j, "commands") != nullptr; }
bool IsFactsShape(const Json& j) { return ArrayPayload(j, "facts") != nullptr; }
bool IsRulesShape(const Json& j) { return ArrayPayload(j, "rules") != nullptr; }

// Index one past the bracket matching text[open], honouring JSON strings.
std::optional<std::size_t> MatchBracket(std::string_view text, std::size_t open) {
  std::vector<char> stack;
  bool in_string = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_string = true;
        break;
      case '[':
      case '{':
        stack.push_back(c == '[' ? ']' : '}');
        break;
      case ']':
      case '}':
        if (stack.empty() || stack.back() != c) return std::nullopt;
        stack.pop_back();
        if (stack.empty()) return i + 1;
        break;
      default:
        break;
    }
  }
  return std::nullopt;
}

std::optional<Json> TryParse(std::string_view text) {
  Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

}  // namespace

bool CommandInventory::Contains(std::string_view name) const {
  return std::any_of(commands.begin(), commands.end(),
                     [&](const InventoryItem& i) { return i.name == name; });
}

std::string SerializeInventory(const CommandInventory& inv) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const InventoryItem& item : inv.commands) {
    out.push_back({{"name", item.name},
                   {"category", item.category},
                   {"description", item.description}});
  }
  return out.dump(2);
}

std::string SerializeFacts(const TransitionFacts& facts) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const TransitionFact& f : facts.facts) {
    out.push_back({{"command", f.command},
                   {"preconditions", f.preconditions},
                   {"postconditions", f.postconditions},
                   {"allowed_before", f.allowed_before},
                   {"allowed_after", f.allowed_after}});
  }
  return out.dump(2);
}

std::string RenderTemplate(std::string_view tmpl,
                           const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      std::size_t close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

PromptTemplates::Stage PromptTemplates::ParseStage(std::string_view text,
                                                   std::string_view name) {
  static constexpr std::string_view kSystem = "[system]\n";
  static constexpr std::string_view kUser = "\n[user]\n";
  std::size_t system_at = text.find(kSystem);
  std::size_t user_at = text.find(kUser);
  if (system_at != 0 || user_at == std::string_view::npos) {
    throw InputError(std::string(name) +
                     ": expected a [system] section followed by a [user] section");
  }
  Stage stage;
  stage.system = TrimCopy(text.substr(kSystem.size(), user_at - kSystem.size()));
  stage.user = TrimCopy(text.substr(user_at + kUser.size()));
  if (stage.system.empty() || stage.user.empty()) {
    throw InputError(std::string(name) + ": empty prompt section");
  }
  return stage;
}

PromptTemplates PromptTemplates::LoadFromDirectory(const std::filesystem::path& dir) {
  PromptTemplates t;
  for (int s = 0; s < 3; ++s) {
    std::filesystem::path file = dir / ("stage" + std::to_string(s + 1) + ".txt");
    std::ifstream in(file, std::ios::binary);
    if (!in) throw InputError("cannot read prompt template " + file.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    t.stages[s] = ParseStage(buffer.str(), file.string());
  }
  return t;
}

std::optional<nlohmann::json> ExtractJsonBlock(std::string_view text) {
  std::size_t fence = text.find("```");
  if (fence != std::string_view::npos) {
    std::size_t body = text.find('\n', fence);
    if (body != std::string_view::npos) {
      std::size_t close = text.find("```", body + 1);
      if (close != std::string_view::npos) {
        if (auto j = TryParse(text.substr(body + 1, close - body - 1))) return j;
      }
    }
  }
  std::size_t open = text.find_first_of("[{");
  while (open != std::string_view::npos) {
    if (auto end = MatchBracket(text, open)) {
      if (auto j = TryParse(text.substr(open, *end - open))) return j;
    }
    open = text.find_first_of("[{", open + 1);
  }
  return std::nullopt;
}

nlohmann::ordered_json RunReportToJson(const RunReport& report) {
  nlohmann::ordered_json j;
  j["chunks"] = report.chunks;
  j["commands"] = report.commands;
  j["calls_per_stage"] = {{"stage1", report.calls_per_stage[0]},
                          {"stage2", report.calls_per_stage[1]},
                          {"stage3", report.calls_per_stage[2]}};
  j["skipped_chunks"] = nlohmann::ordered_json::array();
  for (const SkippedChunk& s : report.skipped_chunks) {
    j["skipped_chunks"].push_back({{"ordinal", s.ordinal},
                                   {"path", s.path},
                                   {"stage", s.stage},
                                   {"reason", s.reason}});
  }
  j["warnings"] = report.warnings;
  j["conflicts"] = report.conflicts;
  return j;
}

// ---------------------------------------------------------------------------
// Merge

namespace {

struct PurposePart {
  int ordinal;
  std::string text;
};

void MergeEdges(const std::string& owner, bool preceding,
                std::vector<Edge>& into, const std::vector<Edge>& from,
                std::vector<std::string>& conflicts) {
  for (const Edge& e : from) {
    auto it = std::find_if(into.begin(), into.end(), [&](const Edge& x) {
      return x.counterpart == e.counterpart;
    });
    if (it == into.end()) {
      into.push_back(e);
      continue;
    }
    if (!e.system_state.empty() &&
        it->system_state.find(e.system_state) == std::string::npos) {
      it->system_state =
          it->system_state.empty() ? e.system_state : it->system_state + " | " + e.system_state;
    }
    if (it->changes_state != e.changes_state) {
      const std::string edge = preceding ? e.counterpart + " -> " + owner
                                         : owner + " -> " + e.counterpart;
      conflicts.push_back("changes_state disagreement on " + edge + " (" +
                          (preceding ? "preceding" : "subsequent") + " chapter of " +
                          owner + "); resolved to true");
      it->changes_state = true;
    }
  }
}

}  // namespace

Rulebook MergeFragments(std::vector<Fragment> fragments, std::string protocol,
                        std::vector<std::string>* conflicts) {
  std::stable_sort(fragments.begin(), fragments.end(),
                   [](const Fragment& a, const Fragment& b) { return a.ordinal < b.ordinal; });
  Rulebook rb;
  rb.protocol = std::move(protocol);
  std::vector<std::vector<PurposePart>> purposes;
  std::vector<std::string> found;
  for (const Fragment& fragment : fragments) {
    for (const CommandRule& rule : fragment.rules) {
      auto it = std::find_if(rb.rules.begin(), rb.rules.end(),
                             [&](const CommandRule& r) { return r.command == rule.command; });
      if (it == rb.rules.end()) {
        rb.rules.push_back(rule);
        purposes.push_back({});
        if (!rule.purpose.empty()) purposes.back().push_back({fragment.ordinal, rule.purpose});
        continue;
      }
      auto index = static_cast<std::size_t>(it - rb.rules.begin());
      auto& parts = purposes[index];
      if (!rule.purpose.empty() &&
          std::none_of(parts.begin(), parts.end(),
                       [&](const PurposePart& p) { return p.text == rule.purpose; })) {
        parts.push_back({fragment.ordinal, rule.purpose});
      }
      MergeEdges(it->command, true, it->preceding, rule.preceding, found);
      MergeEdges(it->command, false, it->subsequent, rule.subsequent, found);
      for (int p : rule.provenance) {
        if (std::find(it->provenance.begin(), it->provenance.end(), p) ==
            it->provenance.end()) {
          it->provenance.push_back(p);
        }
      }
    }
  }
  for (std::size_t i = 0; i < rb.rules.size(); ++i) {
    const auto& parts = purposes[i];
    if (parts.size() <= 1) continue;
    std::string text;
    for (const PurposePart& p : parts) {
      if (!text.empty()) text += "\n\n";
      text += "[chunk " + std::to_string(p.ordinal) + "] " + p.text;
    }
    rb.rules[i].purpose = std::move(text);
  }
  rb.warnings = found;
  if (conflicts) *conflicts = std::move(found);
  return rb;
}

// ---------------------------------------------------------------------------
// Stages

PromptChain::PromptChain(ChatBackend& backend, PromptTemplates templates,
                         ChainConfig config)
    : backend_(backend), templates_(std::move(templates)), config_(std::move(config)) {
  config_.parallelism = std::clamp(config_.parallelism, 1, kMaxParallelism);
}

std::map<std::string, std::string> PromptChain::BaseValues(
    const Chunk& chunk, const AppendixListing& appendix) const {
  return {{"CHUNK", chunk.text},
          {"PATH", chunk.path},
          {"PROTOCOL", config_.protocol},
          {"APPENDIX", config_.appendix_in_context ? appendix.Render()
                                                   : std::string("(not provided)")}};
}

nlohmann::json PromptChain::Ask(int stage, const Chunk& chunk,
                                const std::map<std::string, std::string>& values,
                                bool (*acceptable)(const nlohmann::json&),
                                ChunkLog& log) const {
  const PromptTemplates::Stage& tmpl = templates_.stages[stage - 1];
  CompletionRequest request;
  request.system_prompt = RenderTemplate(tmpl.system, values);
  request.user_prompt = RenderTemplate(tmpl.user, values);
  request.temperature = config_.temperature;
  request.max_tokens = config_.max_tokens;
  request.model_id = config_.stage_model_ids[stage - 1];

  for (int attempt = 0; attempt < 2; ++attempt) {
    if (attempt == 1) request.user_prompt += kFormatReminder;
    ++log.calls[stage - 1];
    CompletionResponse response = backend_.Complete(request);
    std::optional<nlohmann::json> j = ExtractJsonBlock(response.text);
    if (j && acceptable(*j)) return *j;
  }
  throw UnparseableStageOutput(stage, chunk.ordinal,
                               "no JSON block of the expected shape after re-ask");
}

CommandInventory PromptChain::ExtractCommands(const Chunk& chunk,
                                              const AppendixListing& appendix,
                                              ChunkLog& log) const {
  Json reply = Ask(1, chunk, BaseValues(chunk, appendix), IsInventoryShape, log);
  CommandInventory inv;
  inv.chunk_ordinal = chunk.ordinal;
  const Json& items = *ArrayPayload(reply, "commands");
  for (const Json& item : items) {
    if (!item.is_object()) continue;
    std::string name = NormalizeCommandName(StringOr(item, "name", StringOr(item, "command")));
    if (!IsValidCommandName(name)) {
      log.warnings.push_back("chunk " + std::to_string(chunk.ordinal) +
                             ": stage 1 dropped an entry without a valid command name");
      continue;
    }
    if (inv.Contains(name)) continue;
    inv.commands.push_back({name, CanonicalCategory(StringOr(item, "category")),
                            TrimCopy(StringOr(item, "description"))});
  }
  return inv;
}

TransitionFacts PromptChain::AnalyzeTransitions(const CommandInventory& inv,
                                                const Chunk& chunk,
                                                const AppendixListing& appendix,
                                                ChunkLog& log) const {
  TransitionFacts facts;
  facts.chunk_ordinal = chunk.ordinal;
  if (inv.commands.empty()) return facts;

  auto values = BaseValues(chunk, appendix);
  values["INVENTORY"] = SerializeInventory(inv);
  Json reply = Ask(2, chunk, values, IsFactsShape, log);
  for (const Json& item : *ArrayPayload(reply, "facts")) {
    if (!item.is_object()) continue;
    std::string name = NormalizeCommandName(StringOr(item, "command", StringOr(item, "name")));
    if (!inv.Contains(name)) {
      log.warnings.push_back("chunk " + std::to_string(chunk.ordinal) +
                             ": stage 2 dropped fact for command '" + name +
                             "' absent from the stage 1 inventory");
      continue;
    }
    if (std::any_of(facts.facts.begin(), facts.facts.end(),
                    [&](const TransitionFact& f) { return f.command == name; })) {
      continue;
    }
    TransitionFact fact;
    fact.command = name;
    fact.preconditions = StringList(item, "preconditions");
    fact.postconditions = StringList(item, "postconditions");
    fact.allowed_before = CommandList(item, "allowed_before");
    fact.allowed_after = CommandList(item, "allowed_after");
    facts.facts.push_back(std::move(fact));
  }
  return facts;
}

namespace {

std::vector<Edge> EdgesFrom(const Json& rule, std::string_view key,
                            const std::string& command, int ordinal,
                            std::vector<std::string>& warnings) {
  std::vector<Edge> edges;
  const Json& arr = rule.at(key);
  if (!arr.is_array()) return edges;
  for (const Json& item : arr) {
    Edge e;
    if (item.is_string()) {
      e.counterpart = NormalizeCommandName(item.get<std::string>());
    } else if (item.is_object()) {
      e.counterpart = NormalizeCommandName(
          StringOr(item, "counterpart", StringOr(item, "command")));
      e.system_state = TrimCopy(StringOr(item, "system_state"));
      e.changes_state = ChangesState(item);
    }
    if (!IsValidCommandName(e.counterpart)) {
      warnings.push_back("chunk " + std::to_string(ordinal) + ": stage 3 dropped a " +
                         std::string(key) + " edge of " + command +
                         " without a valid counterpart");
      continue;
    }
    if (std::any_of(edges.begin(), edges.end(),
                    [&](const Edge& x) { return x.counterpart == e.counterpart; })) {
      continue;
    }
    edges.push_back(std::move(e));
  }
  return edges;
}

}  // namespace

std::vector<CommandRule> PromptChain::SynthesizeRules(const TransitionFacts& facts,
                                                      const Chunk& chunk,
                                                      const AppendixListing& appendix,
                                                      ChunkLog& log) const {
  std::vector<CommandRule> rules;
  if (facts.facts.empty()) return rules;

  auto values = BaseValues(chunk, appendix);
  values["FACTS"] = SerializeFacts(facts);
  Json reply = Ask(3, chunk, values, IsRulesShape, log);
  const Json& items = *ArrayPayload(reply, "rules");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Json& item = items[i];
    if (!item.is_object()) continue;
    std::string name = NormalizeCommandName(StringOr(item, "command", StringOr(item, "name")));
    bool known = std::any_of(facts.facts.begin(), facts.facts.end(),
                             [&](const TransitionFact& f) { return f.command == name; });
    if (!known) {
      log.warnings.push_back("chunk " + std::to_string(chunk.ordinal) +
                             ": stage 3 dropped rule for command '" + name +
                             "' absent from the stage 2 facts");
      continue;
    }
    const std::string path = "$[" + std::to_string(i) + "]";
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 3> kChapters = {{
        {"purpose", "chapter 1 (purpose)"},
        {"preceding", "chapter 2 (valid preceding commands)"},
        {"subsequent", "chapter 3 (valid subsequent commands)"},
    }};
    for (const auto& [key, label] : kChapters) {
      if (!item.contains(key)) {
        throw SchemaViolation(path + "." + std::string(key),
                              "rule for " + name + " lacks " + std::string(label));
      }
    }
    CommandRule rule;
    rule.command = name;
    rule.purpose = TrimCopy(StringOr(item, "purpose"));
    rule.preceding = EdgesFrom(item, "preceding", name, chunk.ordinal, log.warnings);
    rule.subsequent = EdgesFrom(item, "subsequent", name, chunk.ordinal, log.warnings);
    rule.provenance = {chunk.ordinal};
    rules.push_back(std::move(rule));
  }
  return rules;
}

ChainResult PromptChain::Run(const std::vector<Chunk>& input,
                             const AppendixListing& appendix) const {
  std::vector<Chunk> chunks = input;
  std::stable_sort(chunks.begin(), chunks.end(),
                   [](const Chunk& a, const Chunk& b) { return a.ordinal < b.ordinal; });

  struct Outcome {
    ChunkLog log;
    CommandInventory inventory;
    std::vector<CommandRule> rules;
    std::optional<SkippedChunk> skipped;
    std::exception_ptr failure;
  };
  std::vector<Outcome> outcomes(chunks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};

  auto worker = [&] {
    while (!abort.load()) {
      std::size_t i = next.fetch_add(1);
      if (i >= chunks.size()) return;
      const Chunk& chunk = chunks[i];
      Outcome& out = outcomes[i];
      int stage = 1;
      try {
        out.inventory = ExtractCommands(chunk, appendix, out.log);
        stage = 2;
        TransitionFacts facts = AnalyzeTransitions(out.inventory, chunk, appendix, out.log);
        stage = 3;
        out.rules = SynthesizeRules(facts, chunk, appendix, out.log);
      } catch (const UnparseableStageOutput& e) {
        out.skipped = SkippedChunk{chunk.ordinal, chunk.path, e.stage(), e.what()};
        out.rules.clear();
      } catch (const SchemaViolation& e) {
        out.skipped = SkippedChunk{chunk.ordinal, chunk.path, stage, e.what()};
        out.rules.clear();
      } catch (...) {
        out.failure = std::current_exception();
        abort.store(true);
      }
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(config_.parallelism), chunks.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const Outcome& out : outcomes) {
    if (out.failure) std::rethrow_exception(out.failure);
  }

  ChainResult result;
  RunReport& report = result.report;
  report.chunks = static_cast<int>(chunks.size());
  std::vector<Fragment> fragments;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    Outcome& out = outcomes[i];
    for (int s = 0; s < 3; ++s) report.calls_per_stage[s] += out.log.calls[s];
    report.warnings.insert(report.warnings.end(), out.log.warnings.begin(),
                           out.log.warnings.end());
    if (out.skipped) {
      report.skipped_chunks.push_back(*out.skipped);
      continue;
    }
    fragments.push_back({chunks[i].ordinal, std::move(out.rules)});
  }
  result.rulebook =
      MergeFragments(std::move(fragments), config_.protocol, &report.conflicts);
  // Stage warnings precede merge conflicts in the rulebook as well.
  result.rulebook.warnings.insert(result.rulebook.warnings.begin(),
                                  report.warnings.begin(), report.warnings.end());
  report.commands = static_cast<int>(result.rulebook.rules.size());
  return result;
}

}  // namespace fsmflow
