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

#ifndef FSMFLOW_SRC_JSON_SCHEMA_H_
#define FSMFLOW_SRC_JSON_SCHEMA_H_

// Strict accessors for hand-written JSON schemas. Every failure throws
// SchemaViolation carrying a `$.a.b[3].c` style path.

#include <initializer_list>
#include <string>
#include <string_view>

#include "fsmflow/error.h"
#include "json.hpp"

namespace fsmflow::schema {

inline std::string Member(const std::string& path, std::string_view key) {
  return path + "." + std::string(key);
}

inline std::string Index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline void ExpectObject(const nlohmann::json& j, const std::string& path,
                         std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw SchemaViolation(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) throw SchemaViolation(Member(path, key), "unknown field");
  }
}

inline const nlohmann::json& Field(const nlohmann::json& j,
                                   const std::string& path,
                                   std::string_view key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaViolation(Member(path, key), "missing field");
  return *it;
}

inline std::string String(const nlohmann::json& j, const std::string& path,
                          std::string_view key) {
  const nlohmann::json& v = Field(j, path, key);
  if (!v.is_string()) throw SchemaViolation(Member(path, key), "expected a string");
  return v.get<std::string>();
}

inline bool Bool(const nlohmann::json& j, const std::string& path,
                 std::string_view key) {
  const nlohmann::json& v = Field(j, path, key);
  if (!v.is_boolean()) throw SchemaViolation(Member(path, key), "expected a boolean");
  return v.get<bool>();
}

inline long long Integer(const nlohmann::json& j, const std::string& path,
                         std::string_view key) {
  const nlohmann::json& v = Field(j, path, key);
  if (!v.is_number_integer()) {
    throw SchemaViolation(Member(path, key), "expected an integer");
  }
  return v.get<long long>();
}

inline const nlohmann::json& Array(const nlohmann::json& j,
                                   const std::string& path,
                                   std::string_view key) {
  const nlohmann::json& v = Field(j, path, key);
  if (!v.is_array()) throw SchemaViolation(Member(path, key), "expected an array");
  return v;
}

inline nlohmann::json Parse(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaViolation("$", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace fsmflow::schema

#endif  // FSMFLOW_SRC_JSON_SCHEMA_H_
