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

#include "mixsent/serialize.hpp"

#include <cstdio>

#include "mixsent/errors.hpp"

namespace mixsent {

Json to_json(const TrainConfig& c) {
  Json j;
  j["method"] = method_name(c.method);
  j["encoder"] = encoder_name(c.encoder);
  j["regime"] = regime_name(c.regime);
  j["alpha"] = c.alpha;
  j["batch_size"] = c.batch_size;
  j["steps"] = c.steps;
  j["learning_rate"] = c.learning_rate;
  j["dropout"] = c.dropout ? Json(*c.dropout) : Json(nullptr);
  j["l2"] = c.l2 ? Json(*c.l2) : Json(nullptr);
  j["seed"] = c.seed;
  j["runs"] = c.runs;
  j["eval_every"] = c.eval_every;
  j["embedding_dim"] = c.embedding_dim;
  j["hidden_dim"] = c.hidden_dim;
  j["feature_maps"] = c.feature_maps;
  j["filter_sizes"] = c.filter_sizes;
  j["pretrained_path"] = c.pretrained_path;
  j["folds"] = c.folds;
  j["max_folds"] = c.max_folds;
  j["dev_fraction"] = c.dev_fraction;
  j["train_subsample"] = c.train_subsample;
  return j;
}

namespace {

template <typename T>
T field(const Json& value, const std::string& where) {
  try {
    if constexpr (std::is_unsigned_v<T>) {
      if (!value.is_number_unsigned()) throw ConfigError(where + ": expected a non-negative integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!value.is_number()) throw ConfigError(where + ": expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!value.is_string()) throw ConfigError(where + ": expected a string");
    }
    return value.get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

template <typename Parse>
auto named(const Json& value, const std::string& where, Parse parse) {
  const auto text = field<std::string>(value, where);
  try {
    return parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::optional<double> optional_rate(const Json& value, const std::string& where) {
  if (value.is_null()) return std::nullopt;
  return field<double>(value, where);
}

}  // namespace

void apply_config_json(TrainConfig& c, const Json& object, const std::string& location) {
  if (!object.is_object()) throw ConfigError(location + ": expected an object");
  for (const auto& [key, value] : object.items()) {
    const std::string where = location + "." + key;
    if (key == "method") c.method = named(value, where, parse_method);
    else if (key == "encoder") c.encoder = named(value, where, parse_encoder);
    else if (key == "regime") c.regime = named(value, where, parse_regime);
    else if (key == "alpha") c.alpha = field<double>(value, where);
    else if (key == "batch_size") c.batch_size = field<std::size_t>(value, where);
    else if (key == "steps") c.steps = field<std::size_t>(value, where);
    else if (key == "learning_rate") c.learning_rate = field<double>(value, where);
    else if (key == "dropout") c.dropout = optional_rate(value, where);
    else if (key == "l2") c.l2 = optional_rate(value, where);
    else if (key == "seed") c.seed = field<std::uint64_t>(value, where);
    else if (key == "runs") c.runs = field<std::size_t>(value, where);
    else if (key == "eval_every") c.eval_every = field<std::size_t>(value, where);
    else if (key == "embedding_dim") c.embedding_dim = field<std::size_t>(value, where);
    else if (key == "hidden_dim") c.hidden_dim = field<std::size_t>(value, where);
    else if (key == "feature_maps") c.feature_maps = field<std::size_t>(value, where);
    else if (key == "filter_sizes") {
      if (!value.is_array() || value.empty()) throw ConfigError(where + ": expected a non-empty array");
      c.filter_sizes.clear();
      for (std::size_t i = 0; i < value.size(); ++i)
        c.filter_sizes.push_back(field<std::size_t>(value[i], where + "[" + std::to_string(i) + "]"));
    } else if (key == "pretrained_path") c.pretrained_path = field<std::string>(value, where);
    else if (key == "folds") c.folds = field<std::size_t>(value, where);
    else if (key == "max_folds") c.max_folds = field<std::size_t>(value, where);
    else if (key == "dev_fraction") c.dev_fraction = field<double>(value, where);
    else if (key == "train_subsample") c.train_subsample = field<std::size_t>(value, where);
    else throw ConfigError(where + ": unknown key");
  }
}

TrainConfig train_config_from_json(const Json& object, const std::string& location) {
  TrainConfig c;
  apply_config_json(c, object, location);
  return c;
}

Json to_json(const RunResult& r) {
  Json j;
  j["seed"] = r.seed;
  j["fold"] = r.fold;
  j["test_accuracy"] = r.test_accuracy;
  j["test_ce"] = r.test_ce;
  j["best_dev_accuracy"] = r.best_dev_accuracy;
  j["best_step"] = r.best_step;
  j["curve_steps"] = r.curve_steps;
  j["train_ce"] = r.train_ce;
  j["test_ce_curve"] = r.test_ce_curve;
  j["dev_accuracy"] = r.dev_accuracy;
  if (!r.train_eval_ce.empty()) j["train_eval_ce"] = r.train_eval_ce;
  j["step_losses"] = r.step_losses;
  j["wall_seconds"] = r.wall_seconds;
  j["counters"] = {{"dropout_masks", r.counters.dropout_masks},
                   {"l2_terms", r.counters.l2_terms},
                   {"mixed_batches", r.counters.mixed_batches}};
  return j;
}

RunResult run_result_from_json(const Json& j) {
  try {
    RunResult r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.fold = j.at("fold").get<std::size_t>();
    r.test_accuracy = j.at("test_accuracy").get<double>();
    r.test_ce = j.at("test_ce").get<double>();
    r.best_dev_accuracy = j.at("best_dev_accuracy").get<double>();
    r.best_step = j.at("best_step").get<std::size_t>();
    r.curve_steps = j.at("curve_steps").get<std::vector<std::size_t>>();
    r.train_ce = j.at("train_ce").get<std::vector<double>>();
    r.test_ce_curve = j.at("test_ce_curve").get<std::vector<double>>();
    r.dev_accuracy = j.at("dev_accuracy").get<std::vector<double>>();
    r.step_losses = j.at("step_losses").get<std::vector<double>>();
    if (j.contains("train_eval_ce")) r.train_eval_ce = j["train_eval_ce"].get<std::vector<double>>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    const auto& k = j.at("counters");
    r.counters.dropout_masks = k.at("dropout_masks").get<std::size_t>();
    r.counters.l2_terms = k.at("l2_terms").get<std::size_t>();
    r.counters.mixed_batches = k.at("mixed_batches").get<std::size_t>();
    return r;
  } catch (const Json::exception& e) {
    throw ParseError("run result", 0, e.what());
  }
}

std::uint64_t content_hash(const Json& value) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : value.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace mixsent
