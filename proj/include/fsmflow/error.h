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

#ifndef FSMFLOW_ERROR_H_
#define FSMFLOW_ERROR_H_

#include <stdexcept>
#include <string>

namespace fsmflow {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable, missing or empty input file.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The document has no numbered section headings.
class NoSectionsFound : public Error {
 public:
  explicit NoSectionsFound(const std::string& source)
      : Error("no numbered section headings found in " + source) {}
};

/// A JSON document does not match its schema. `json_path()` locates the
/// offending value, e.g. `$.rules[0].command`.
class SchemaViolation : public Error {
 public:
  SchemaViolation(std::string json_path, const std::string& message)
      : Error(json_path + ": " + message), json_path_(std::move(json_path)) {}

  const std::string& json_path() const { return json_path_; }

 private:
  std::string json_path_;
};

/// A transition or the initial state names a state that is not declared.
class DanglingState : public Error {
 public:
  explicit DanglingState(const std::string& state)
      : Error("transition references undeclared state '" + state + "'"),
        state_(state) {}

  const std::string& state() const { return state_; }

 private:
  std::string state_;
};

class ModeUnsupported : public Error {
 public:
  explicit ModeUnsupported(const std::string& mode)
      : Error("unsupported evaluation mode '" + mode + "'") {}
};

// Chat-completion backend failures. Anything deriving from BackendError is a
// runtime failure of the model service, as opposed to bad local input.
class BackendError : public Error {
 public:
  using Error::Error;
};

/// Retry budget exhausted on HTTP 429 / 5xx.
class RateLimited : public BackendError {
 public:
  using BackendError::BackendError;
};

/// Response body is not JSON or lacks `choices[0].message.content`.
class MalformedResponse : public BackendError {
 public:
  using BackendError::BackendError;
};

/// The replay store has no entry for a request fingerprint.
class ReplayMiss : public BackendError {
 public:
  explicit ReplayMiss(const std::string& fingerprint)
      : BackendError("replay store has no entry for fingerprint " +
                     fingerprint),
        fingerprint_(fingerprint) {}

  const std::string& fingerprint() const { return fingerprint_; }

 private:
  std::string fingerprint_;
};

/// The live credential is not configured. Raised before any network call.
class AuthMissing : public Error {
 public:
  using Error::Error;
};

/// The replay store cannot be written. Raised before any network call.
class StoreWriteError : public Error {
 public:
  using Error::Error;
};

/// A prompt-chain stage returned text that could not be parsed even after
/// the format-reminder re-ask.
class UnparseableStageOutput : public Error {
 public:
  UnparseableStageOutput(int stage, int chunk_ordinal, const std::string& why)
      : Error("stage " + std::to_string(stage) + " output for chunk " +
              std::to_string(chunk_ordinal) + " is unparseable: " + why),
        stage_(stage),
        chunk_ordinal_(chunk_ordinal) {}

  int stage() const { return stage_; }
  int chunk_ordinal() const { return chunk_ordinal_; }

 private:
  int stage_;
  int chunk_ordinal_;
};

}  // namespace fsmflow

#endif  // FSMFLOW_ERROR_H_
