// Copyright 2026 The sharecheck Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Built-in protocols and rule sets addressed by name plus JSON parameters.
// Elements inside parameters are written in their printed form ("ex(0)").

#ifndef SHARECHECK_REGISTRY_HPP
#define SHARECHECK_REGISTRY_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "sharecheck/ghost_engine.hpp"
#include "sharecheck/protocols.hpp"

namespace sharecheck {

/// Bad or unknown parameters; the message names the offending field.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Element element_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json element_to_json(const Element& e);

FractionalParams fractional_params_from_json(const nlohmann::json& j);
CountingParams counting_params_from_json(const nlohmann::json& j);
RwLockParams rwlock_params_from_json(const nlohmann::json& j);
RwLockMultiParams rwlock_multi_params_from_json(const nlohmann::json& j);
FracHeapParams frac_heap_params_from_json(const nlohmann::json& j);
HashTableParams hashtable_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HashTableParams& p);

/// Names accepted by build_protocol, in registry order.
std::vector<std::string> builtin_protocol_names();

/// {"builtin": name, "params": {...}}. "table" takes a composition table
/// and is used as a protocol with trivial storage.
BuiltProtocol build_protocol(const nlohmann::json& decl);

/// {"set": "rwlock" | "rwlock-multi" | "hashtable", "params": {...}}.
RuleSet build_rule_set(const nlohmann::json& decl);

}  // namespace sharecheck

#endif  // SHARECHECK_REGISTRY_HPP
