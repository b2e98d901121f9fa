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

#include "fsmflow/llm_backend.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fsmflow/digest.h"
#include "fsmflow/error.h"
#include "json.hpp"
#include "json_schema.h"

namespace fsmflow {

std::string Fingerprint(const CompletionRequest& request) {
  // Length-prefixed so that no two field splits hash the same.
  std::string material = "fsmflow-request/1\n";
  for (const std::string* field :
       {&request.system_prompt, &request.user_prompt, &request.model_id}) {
    material += std::to_string(field->size());
    material += ':';
    material += *field;
    material += '\n';
  }
  return Sha256Hex(material);
}

ReplayEntry MakeReplayEntry(const CompletionRequest& request,
                            const CompletionResponse& response) {
  return {Fingerprint(request), request.system_prompt, request.user_prompt,
          request.model_id,     response.text,         response.usage};
}

ReplayStore ReplayStore::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read replay store " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str());
}

ReplayStore ReplayStore::Parse(std::string_view text) {
  nlohmann::json j = schema::Parse(text);
  if (!j.is_array()) throw SchemaViolation("$", "expected an array");
  ReplayStore store;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = schema::Index("$", i);
    schema::ExpectObject(j[i], path, {"fingerprint", "request", "response"});
    ReplayEntry e;
    e.fingerprint = schema::String(j[i], path, "fingerprint");

    const std::string req_path = schema::Member(path, "request");
    const nlohmann::json& req = schema::Field(j[i], path, "request");
    schema::ExpectObject(req, req_path, {"system", "user", "model"});
    e.system = schema::String(req, req_path, "system");
    e.user = schema::String(req, req_path, "user");
    e.model = schema::String(req, req_path, "model");

    const std::string resp_path = schema::Member(path, "response");
    const nlohmann::json& resp = schema::Field(j[i], path, "response");
    schema::ExpectObject(resp, resp_path, {"text", "usage"});
    e.text = schema::String(resp, resp_path, "text");
    const std::string usage_path = schema::Member(resp_path, "usage");
    const nlohmann::json& usage = schema::Field(resp, resp_path, "usage");
    schema::ExpectObject(usage, usage_path, {"prompt", "completion"});
    e.usage.prompt = schema::Integer(usage, usage_path, "prompt");
    e.usage.completion = schema::Integer(usage, usage_path, "completion");
    if (e.usage.prompt < 0 || e.usage.completion < 0) {
      throw SchemaViolation(usage_path, "token counts must be non-negative");
    }

    CompletionRequest probe{e.system, e.user, 0.0, 1, e.model};
    if (Fingerprint(probe) != e.fingerprint) {
      throw SchemaViolation(schema::Member(path, "fingerprint"),
                            "does not match the recorded request");
    }
    if (!store.Insert(std::move(e))) {
      throw SchemaViolation(path, "duplicate fingerprint");
    }
  }
  return store;
}

std::string ReplayStore::Serialize() const {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& [fingerprint, e] : entries_) {
    nlohmann::ordered_json entry;
    entry["fingerprint"] = e.fingerprint;
    entry["request"] = {{"system", e.system}, {"user", e.user}, {"model", e.model}};
    entry["response"] = {
        {"text", e.text},
        {"usage", {{"prompt", e.usage.prompt}, {"completion", e.usage.completion}}}};
    out.push_back(std::move(entry));
  }
  return out.dump(2) + "\n";
}

const ReplayEntry* ReplayStore::Find(const std::string& fingerprint) const {
  auto it = entries_.find(fingerprint);
  return it == entries_.end() ? nullptr : &it->second;
}

bool ReplayStore::Insert(ReplayEntry entry) {
  std::string key = entry.fingerprint;
  return entries_.emplace(std::move(key), std::move(entry)).second;
}

namespace {

CompletionResponse FromEntry(const ReplayEntry& e) {
  return {e.text, e.model, e.usage, 0};
}

}  // namespace

CompletionResponse ReplayBackend::Complete(const CompletionRequest& request) {
  std::string fingerprint = Fingerprint(request);
  const ReplayEntry* e = store_.Find(fingerprint);
  if (!e) throw ReplayMiss(fingerprint);
  return FromEntry(*e);
}

RecordingBackend::RecordingBackend(std::shared_ptr<ChatBackend> inner,
                                   std::filesystem::path store_path)
    : inner_(std::move(inner)), store_path_(std::move(store_path)) {
  std::error_code ec;
  if (std::filesystem::exists(store_path_, ec)) {
    store_ = ReplayStore::Load(store_path_);
  }
  std::lock_guard lock(mutex_);
  Persist();
}

void RecordingBackend::Persist() {
  std::filesystem::path tmp = store_path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreWriteError("cannot write replay store " + store_path_.string());
    out << store_.Serialize();
    if (!out.flush()) {
      throw StoreWriteError("cannot write replay store " + store_path_.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, store_path_, ec);
  if (ec) {
    throw StoreWriteError("cannot replace replay store " + store_path_.string() +
                          ": " + ec.message());
  }
}

CompletionResponse RecordingBackend::Complete(const CompletionRequest& request) {
  std::string fingerprint = Fingerprint(request);
  {
    std::lock_guard lock(mutex_);
    if (const ReplayEntry* e = store_.Find(fingerprint)) return FromEntry(*e);
  }
  CompletionResponse response = inner_->Complete(request);
  std::lock_guard lock(mutex_);
  if (!store_.Insert(MakeReplayEntry(request, response))) {
    // Another worker recorded the same request first; answer consistently.
    return FromEntry(*store_.Find(fingerprint));
  }
  Persist();
  return response;
}

ScriptedBackend::ScriptedBackend(std::vector<Entry> entries)
    : entries_(std::move(entries)), used_(entries_.size(), false) {}

std::vector<ScriptedBackend::Entry> ScriptedBackend::ParseScript(std::string_view text) {
  nlohmann::json j = schema::Parse(text);
  if (!j.is_array()) throw SchemaViolation("$", "expected an array");
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = schema::Index("$", i);
    schema::ExpectObject(j[i], path, {"match", "text", "note"});
    Entry e;
    const nlohmann::json& match = schema::Array(j[i], path, "match");
    for (const auto& m : match) {
      if (!m.is_string()) {
        throw SchemaViolation(schema::Member(path, "match"), "expected strings");
      }
      e.match.push_back(m.get<std::string>());
    }
    e.text = schema::String(j[i], path, "text");
    entries.push_back(std::move(e));
  }
  return entries;
}

CompletionResponse ScriptedBackend::Complete(const CompletionRequest& request) {
  std::lock_guard lock(mutex_);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (used_[i]) continue;
    bool matches = true;
    for (const std::string& m : entries_[i].match) {
      if (request.system_prompt.find(m) == std::string::npos &&
          request.user_prompt.find(m) == std::string::npos) {
        matches = false;
        break;
      }
    }
    if (!matches) continue;
    used_[i] = true;
    const std::string& text = entries_[i].text;
    return {text, request.model_id,
            {static_cast<long long>(request.user_prompt.size() / 4),
             static_cast<long long>(text.size() / 4)},
            0};
  }
  throw ReplayMiss(Fingerprint(request));
}

std::size_t ScriptedBackend::unused() const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (bool u : used_) n += u ? 0 : 1;
  return n;
}

CompletionResponse TracingBackend::Complete(const CompletionRequest& request) {
  {
    std::lock_guard lock(mutex_);
    requests_.push_back(request);
  }
  return inner_->Complete(request);
}

std::vector<CompletionRequest> TracingBackend::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

std::string ApiKeyFromEnvironment() {
  const char* key = std::getenv(kApiKeyEnv);
  if (!key || !*key) {
    throw AuthMissing(std::string(kApiKeyEnv) + " is not set");
  }
  return key;
}

}  // namespace fsmflow
