// Copyright 2026 The mixsent Authors. All Rights Reserved.
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

#ifndef MIXSENT_SERIALIZE_HPP
#define MIXSENT_SERIALIZE_HPP

#include <string>

#include "json.hpp"
#include "mixsent/trainer.hpp"

namespace mixsent {

using Json = nlohmann::json;

Json to_json(const TrainConfig& config);

/// Overlays the keys of `object` onto `config`. Unknown keys and type
/// mismatches raise ConfigError naming `location` and the offending key.
void apply_config_json(TrainConfig& config, const Json& object, const std::string& location);
TrainConfig train_config_from_json(const Json& object, const std::string& location = "config");

Json to_json(const RunResult& result);
RunResult run_result_from_json(const Json& object);

/// 64-bit FNV-1a over the compact dump of `value` (keys are kept sorted).
std::uint64_t content_hash(const Json& value);
std::string hex64(std::uint64_t value);

}  // namespace mixsent

#endif  // MIXSENT_SERIALIZE_HPP
