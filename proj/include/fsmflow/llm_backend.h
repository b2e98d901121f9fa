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

#ifndef FSMFLOW_LLM_BACKEND_H_
#define FSMFLOW_LLM_BACKEND_H_

// Chat-completion backends. The pipeline only sees ChatBackend; the live
// client speaks the common chat-completions JSON protocol, and the replay
// and recording backends make runs reproducible offline.

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fsmflow {

struct CompletionRequest {
  std::string system_prompt;
  std::string user_prompt;
  double temperature = 0.0;
  int max_tokens = 4096;
  std::string model_id;
};

struct TokenUsage {
  long long prompt = 0;
  long long completion = 0;

  friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

struct CompletionResponse {
  std::string text;
  std::string model_id;
  TokenUsage usage;
  long long latency_ms = 0;
};

/// Stable request key. Depends only on the system prompt, user prompt and
/// model id.
std::string Fingerprint(const CompletionRequest& request);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  /// Must be safe to call from several threads at once.
  virtual CompletionResponse Complete(const CompletionRequest& request) = 0;
};

// ---------------------------------------------------------------------------
// Replay store

struct ReplayEntry {
  std::string fingerprint;
  std::string system;
  std::string user;
  std::string model;
  std::string text;
  TokenUsage usage;
};

/// Recorded responses keyed by fingerprint. On disk: a JSON array of
/// `{fingerprint, request:{system,user,model}, response:{text,usage}}`
/// sorted by fingerprint.
class ReplayStore {
 public:
  /// Throws InputError if unreadable, SchemaViolation if malformed or if a
  /// stored fingerprint does not match its request.
  static ReplayStore Load(const std::filesystem::path& path);
  static ReplayStore Parse(std::string_view text);

  std::string Serialize() const;

  const ReplayEntry* Find(const std::string& fingerprint) const;

  /// Returns false (and keeps the existing entry) on a duplicate
  /// fingerprint.
  bool Insert(ReplayEntry entry);

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, ReplayEntry> entries_;
};

ReplayEntry MakeReplayEntry(const CompletionRequest& request,
                            const CompletionResponse& response);

/// Serves recorded responses. Throws ReplayMiss for unknown requests.
class ReplayBackend : public ChatBackend {
 public:
  explicit ReplayBackend(ReplayStore store) : store_(std::move(store)) {}

  CompletionResponse Complete(const CompletionRequest& request) override;

 private:
  const ReplayStore store_;
};

/// Wraps another backend and persists every new response to `store_path`.
/// A request already in the store is answered from it, so replaying the
/// store reproduces the recorded session exactly.
class RecordingBackend : public ChatBackend {
 public:
  /// Loads `store_path` if it exists and verifies it can be written. Throws
  /// StoreWriteError before any call is made otherwise.
  RecordingBackend(std::shared_ptr<ChatBackend> inner,
                   std::filesystem::path store_path);

  CompletionResponse Complete(const CompletionRequest& request) override;

 private:
  void Persist();  // requires mutex_

  std::shared_ptr<ChatBackend> inner_;
  std::filesystem::path store_path_;
  std::mutex mutex_;
  ReplayStore store_;
};

/// Canned responses for tests and fixture authoring. Each call takes the
/// first unused entry whose every `match` string occurs in the system or
/// user prompt.
class ScriptedBackend : public ChatBackend {
 public:
  struct Entry {
    std::vector<std::string> match;
    std::string text;
  };

  explicit ScriptedBackend(std::vector<Entry> entries);

  /// Parses `[{"match": [...], "text": "...", "note": "..."}]`.
  static std::vector<Entry> ParseScript(std::string_view text);

  CompletionResponse Complete(const CompletionRequest& request) override;

  std::size_t unused() const;

 private:
  mutable std::mutex mutex_;
  std::vector<Entry> entries_;
  std::vector<bool> used_;
};

/// Records every request before forwarding it.
class TracingBackend : public ChatBackend {
 public:
  explicit TracingBackend(std::shared_ptr<ChatBackend> inner)
      : inner_(std::move(inner)) {}

  CompletionResponse Complete(const CompletionRequest& request) override;

  std::vector<CompletionRequest> requests() const;

 private:
  std::shared_ptr<ChatBackend> inner_;
  mutable std::mutex mutex_;
  std::vector<CompletionRequest> requests_;
};

// ---------------------------------------------------------------------------
// Live backend

inline constexpr const char* kApiKeyEnv = "FSMFLOW_API_KEY";

/// Reads the credential from FSMFLOW_API_KEY. Throws AuthMissing if unset
/// or empty.
std::string ApiKeyFromEnvironment();

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{1000};

  /// Delay after failed attempt `attempt` (0-based): initial * 2^attempt.
  std::chrono::milliseconds BackoffFor(int attempt) const;

  static bool IsRetryableStatus(int status);
};

struct LiveBackendConfig {
  std::string endpoint_url;
  std::string api_key;
  RetryPolicy retry;
  std::chrono::seconds timeout{120};
  /// Injectable for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

/// One chat-completions POST per call, retried on 429 / 5xx and transport
/// failures with exponential backoff.
class LiveBackend : public ChatBackend {
 public:
  explicit LiveBackend(LiveBackendConfig config);

  CompletionResponse Complete(const CompletionRequest& request) override;

 private:
  LiveBackendConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

/// Builds the request body sent by LiveBackend.
std::string BuildChatRequestBody(const CompletionRequest& request);

/// Extracts `choices[0].message.content` and usage from a response body.
/// Throws MalformedResponse.
CompletionResponse ParseChatResponseBody(std::string_view body);

}  // namespace fsmflow

#endif  // FSMFLOW_LLM_BACKEND_H_
