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

#include <chrono>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "fsmflow/error.h"
#include "fsmflow/llm_backend.h"
#include "json.hpp"

namespace fsmflow {

std::chrono::milliseconds RetryPolicy::BackoffFor(int attempt) const {
  return initial_backoff * (1LL << std::min(attempt, 30));
}

bool RetryPolicy::IsRetryableStatus(int status) {
  return status == 429 || (status >= 500 && status <= 599);
}

std::string BuildChatRequestBody(const CompletionRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = request.model_id;
  body["messages"] = nlohmann::ordered_json::array(
      {{{"role", "system"}, {"content", request.system_prompt}},
       {{"role", "user"}, {"content", request.user_prompt}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  return body.dump();
}

CompletionResponse ParseChatResponseBody(std::string_view body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    throw MalformedResponse("chat-completion response is not JSON");
  }
  CompletionResponse out;
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw MalformedResponse("content is not a string");
    out.text = content.get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw MalformedResponse("response lacks choices[0].message.content");
  }
  if (auto model = j.find("model"); model != j.end() && model->is_string()) {
    out.model_id = model->get<std::string>();
  }
  if (auto usage = j.find("usage"); usage != j.end() && usage->is_object()) {
    out.usage.prompt = std::max(0LL, usage->value("prompt_tokens", 0LL));
    out.usage.completion = std::max(0LL, usage->value("completion_tokens", 0LL));
  }
  return out;
}

LiveBackend::LiveBackend(LiveBackendConfig config) : config_(std::move(config)) {
  if (config_.api_key.empty()) throw AuthMissing("no API key configured");
  const std::string& url = config_.endpoint_url;
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InputError("endpoint_url must include a scheme: " + url);
  }
  std::size_t path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (!config_.sleep) {
    config_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  config_.retry.max_attempts = std::max(1, config_.retry.max_attempts);
}

CompletionResponse LiveBackend::Complete(const CompletionRequest& request) {
  // httplib clients are not shared across threads.
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  const httplib::Headers headers = {
      {"Authorization", "Bearer " + config_.api_key}};
  const std::string body = BuildChatRequestBody(request);

  const auto started = std::chrono::steady_clock::now();
  std::string last_failure;
  bool last_was_status = false;
  for (int attempt = 0; attempt < config_.retry.max_attempts; ++attempt) {
    auto result = client.Post(path_, headers, body, "application/json");
    if (!result) {
      last_failure = "transport error: " + httplib::to_string(result.error());
      last_was_status = false;
    } else if (result->status >= 200 && result->status < 300) {
      CompletionResponse response = ParseChatResponseBody(result->body);
      if (response.model_id.empty()) response.model_id = request.model_id;
      response.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - started)
                                .count();
      return response;
    } else if (RetryPolicy::IsRetryableStatus(result->status)) {
      last_failure = "HTTP " + std::to_string(result->status);
      last_was_status = true;
    } else {
      throw BackendError("HTTP " + std::to_string(result->status) + " from " +
                         config_.endpoint_url + ": " +
                         result->body.substr(0, 200));
    }
    if (attempt + 1 < config_.retry.max_attempts) {
      config_.sleep(config_.retry.BackoffFor(attempt));
    }
  }
  std::string message = "gave up after " +
                        std::to_string(config_.retry.max_attempts) +
                        " attempts; last failure: " + last_failure;
  if (last_was_status) throw RateLimited(message);
  throw BackendError(message);
}

}  // namespace fsmflow
