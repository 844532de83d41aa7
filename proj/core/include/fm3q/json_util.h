// Copyright 2026 The FM3Q Authors.
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

#ifndef FM3Q_JSON_UTIL_H_
#define FM3Q_JSON_UTIL_H_

#include <string>

#include "fm3q/errors.h"
#include "json.hpp"

namespace fm3q {

// Field access that reports the full dotted path of a missing or mistyped
// field through ConfigError.
template <typename T>
T RequireField(const nlohmann::json& j, const std::string& key,
               const std::string& path) {
  const std::string full = path.empty() ? key : path + "." + key;
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(full, "missing required field");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(full, std::string("wrong type: ") + e.what());
  }
}

template <typename T>
T OptionalField(const nlohmann::json& j, const std::string& key,
                const std::string& path, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return RequireField<T>(j, key, path);
}

inline std::string JoinPath(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

nlohmann::json ReadJsonFile(const std::string& path);
void WriteJsonFile(const std::string& path, const nlohmann::json& doc);
void WriteTextFile(const std::string& path, const std::string& text);

}  // namespace fm3q

#endif  // FM3Q_JSON_UTIL_H_
