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

#include "mixsent/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "mixsent/embedding.hpp"
#include "mixsent/errors.hpp"
#include "mixsent/rng.hpp"

namespace mixsent {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kVectorInitTag = 0x9E7;

Json synthetic_json(const SyntheticCorpusSpec& s) {
  return {{"num_classes", s.num_classes}, {"train_size", s.train_size},     {"dev_size", s.dev_size},
          {"test_size", s.test_size},     {"cues_per_class", s.cues_per_class}, {"filler_words", s.filler_words},
          {"min_len", s.min_len},         {"max_len", s.max_len},           {"cue_rate", s.cue_rate},
          {"label_noise", s.label_noise}, {"seed", s.seed}};
}

void need(bool ok, const std::string& where, const std::string& what) {
  if (!ok) throw ConfigError(where + ": " + what);
}

SyntheticCorpusSpec parse_synthetic(const Json& j, const std::string& where) {
  need(j.is_object(), where, "expected an object");
  SyntheticCorpusSpec s;
  for (const auto& [key, value] : j.items()) {
    const std::string at = where + "." + key;
    auto count = [&](std::size_t& dst) {
      need(value.is_number_unsigned(), at, "expected a non-negative integer");
      dst = value.get<std::size_t>();
    };
    auto real = [&](double& dst) {
      need(value.is_number(), at, "expected a number");
      dst = value.get<double>();
    };
    if (key == "num_classes") count(s.num_classes);
    else if (key == "train_size") count(s.train_size);
    else if (key == "dev_size") count(s.dev_size);
    else if (key == "test_size") count(s.test_size);
    else if (key == "cues_per_class") count(s.cues_per_class);
    else if (key == "filler_words") count(s.filler_words);
    else if (key == "min_len") count(s.min_len);
    else if (key == "max_len") count(s.max_len);
    else if (key == "cue_rate") real(s.cue_rate);
    else if (key == "label_noise") real(s.label_noise);
    else if (key == "seed") {
      need(value.is_number_unsigned(), at, "expected a non-negative integer");
      s.seed = value.get<std::uint64_t>();
    } else {
      throw ConfigError(at + ": unknown key");
    }
  }
  return s;
}

// Checks an overlay's keys and value types against a default config.
void check_overlay(const Json& overlay, const std::string& where) {
  TrainConfig scratch;
  apply_config_json(scratch, overlay, where);
}

std::vector<Json> expand_matrix(const Json& matrix, const std::string& where) {
  need(matrix.is_object(), where, "expected an object of arrays");
  std::vector<Json> combos{Json::object()};
  for (const auto& [key, values] : matrix.items()) {
    need(values.is_array() && !values.empty(), where + "." + key, "expected a non-empty array");
    std::vector<Json> next;
    for (const auto& partial : combos)
      for (const auto& v : values) {
        Json c = partial;
        c[key] = v;
        next.push_back(std::move(c));
      }
    combos = std::move(next);
  }
  return combos;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char ch : s) out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '.') ? ch : '-';
  return out;
}

}  // namespace

Json DatasetRef::echo() const {
  Json j{{"id", id}};
  if (format) j["format"] = format_name(*format);
  if (!path.empty()) j["path"] = path;
  if (synthetic) j["synthetic"] = synthetic_json(*synthetic);
  return j;
}

ExperimentSpec parse_experiment_spec(const std::string& text, const std::string& source) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw ParseError(source, line, e.what());
  }
  need(root.is_object(), source, "top level must be an object");

  ExperimentSpec spec;
  for (const auto& [key, value] : root.items()) {
    const std::string at = source + ": " + key;
    if (key == "name") {
      need(value.is_string(), at, "expected a string");
      spec.name = value.get<std::string>();
    } else if (key == "output_dir") {
      need(value.is_string(), at, "expected a string");
      spec.output_dir = value.get<std::string>();
    } else if (key == "base") {
      check_overlay(value, at);
      spec.base = value;
    } else if (key != "datasets" && key != "matrix" && key != "configs" && key != "desk_scale") {
      throw ConfigError(at + ": unknown key");
    }
  }

  if (root.contains("datasets")) {
    const Json& list = root["datasets"];
    need(list.is_array(), source + ": datasets", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string at = source + ": datasets[" + std::to_string(i) + "]";
      const Json& d = list[i];
      need(d.is_object(), at, "expected an object");
      DatasetRef ref;
      for (const auto& [key, value] : d.items()) {
        const std::string kat = at + "." + key;
        if (key == "id") {
          need(value.is_string() && !value.get<std::string>().empty(), kat, "expected a non-empty string");
          ref.id = value.get<std::string>();
        } else if (key == "format") {
          need(value.is_string(), kat, "expected a string");
          try {
            ref.format = parse_format(value.get<std::string>());
          } catch (const std::exception& e) {
            throw ConfigError(kat + ": " + e.what());
          }
        } else if (key == "path") {
          need(value.is_string(), kat, "expected a string");
          ref.path = value.get<std::string>();
        } else if (key == "synthetic") {
          ref.synthetic = parse_synthetic(value, kat);
        } else if (key == "overrides") {
          check_overlay(value, kat);
          ref.overrides = value;
        } else {
          throw ConfigError(kat + ": unknown key");
        }
      }
      need(!ref.id.empty(), at, "missing id");
      need(ref.synthetic.has_value() != ref.format.has_value(), at, "needs exactly one of 'format' or 'synthetic'");
      need(!ref.format || !ref.path.empty(), at, "file-backed dataset needs 'path'");
      for (const auto& other : spec.datasets) need(other.id != ref.id, at, "duplicate id '" + ref.id + "'");
      spec.datasets.push_back(std::move(ref));
    }
  }

  if (root.contains("matrix")) {
    for (auto& combo : expand_matrix(root["matrix"], source + ": matrix")) {
      check_overlay(combo, source + ": matrix");
      spec.configs.push_back(std::move(combo));
    }
  }
  if (root.contains("configs")) {
    const Json& list = root["configs"];
    need(list.is_array(), source + ": configs", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      check_overlay(list[i], source + ": configs[" + std::to_string(i) + "]");
      spec.configs.push_back(list[i]);
    }
  }

  if (root.contains("desk_scale")) {
    const Json& d = root["desk_scale"];
    const std::string at = source + ": desk_scale";
    need(d.is_object(), at, "expected an object");
    DeskScale desk;
    for (const auto& [key, value] : d.items()) {
      if (key == "enabled") {
        need(value.is_boolean(), at + ".enabled", "expected true or false");
        desk.enabled = value.get<bool>();
      } else if (key == "overrides") {
        check_overlay(value, at + ".overrides");
        desk.overrides = value;
      } else if (key == "datasets") {
        need(value.is_object(), at + ".datasets", "expected an object keyed by dataset id");
        for (const auto& [id, overlay] : value.items()) {
          const bool known = std::any_of(spec.datasets.begin(), spec.datasets.end(),
                                         [&](const DatasetRef& r) { return r.id == id; });
          need(known, at + ".datasets." + id, "no dataset with this id");
          check_overlay(overlay, at + ".datasets." + id);
        }
        desk.dataset_overrides = value;
      } else {
        throw ConfigError(at + "." + key + ": unknown key");
      }
    }
    spec.desk_scale = std::move(desk);
  }
  return spec;
}

ExperimentSpec load_experiment_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spec " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_spec(buf.str(), path.string());
}

std::vector<Job> expand_jobs(const ExperimentSpec& spec, const RunOverrides& overrides) {
  const bool desk = overrides.desk_scale || (spec.desk_scale && spec.desk_scale->enabled);
  if (desk && !spec.desk_scale) throw ConfigError("desk scale requested but the spec has no desk_scale block");
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < spec.datasets.size(); ++d) {
    const DatasetRef& ref = spec.datasets[d];
    for (std::size_t c = 0; c < spec.configs.size(); ++c) {
      const std::string where = "configs[" + std::to_string(c) + "] on " + ref.id;
      TrainConfig config;
      apply_config_json(config, spec.base, where + " (base)");
      apply_config_json(config, spec.configs[c], where);
      apply_config_json(config, ref.overrides, where + " (dataset overrides)");
      if (desk) {
        apply_config_json(config, spec.desk_scale->overrides, where + " (desk_scale)");
        if (spec.desk_scale->dataset_overrides.contains(ref.id))
          apply_config_json(config, spec.desk_scale->dataset_overrides[ref.id], where + " (desk_scale dataset)");
      }
      if (overrides.seed) config.seed = *overrides.seed;
      try {
        config.validate();
      } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
      }
      Job job;
      job.dataset_index = d;
      job.config = config;
      job.key = {{"dataset", ref.echo()}, {"config", to_json(config)}};
      job.hash = hex64(content_hash(job.key));
      job.dir_name = sanitize(ref.id) + "_" + method_name(config.method) + "_" + encoder_name(config.encoder) + "_" +
                     regime_name(config.regime) + "_" + job.hash.substr(0, 12);
      jobs.push_back(std::move(job));
    }
  }
  return jobs;
}

fs::path resolve_output_dir(const ExperimentSpec& spec, const RunOverrides& overrides) {
  if (overrides.output_dir) return *overrides.output_dir;
  if (!spec.output_dir.empty()) return spec.output_dir;
  return fs::path("results") / (spec.name.empty() ? "experiment" : sanitize(spec.name));
}

fs::path default_data_root() {
  const char* env = std::getenv("MIXSENT_DATA");
  return env && *env ? fs::path(env) : fs::path("data");
}

fs::path resolve_data_path(const fs::path& root, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? p : root / p;
}

std::vector<std::string> missing_inputs(const ExperimentSpec& spec, const std::vector<Job>& jobs,
                                        const fs::path& data_root) {
  std::vector<std::string> missing;
  std::vector<bool> used(spec.datasets.size(), false);
  std::map<std::string, bool> vectors;
  for (const auto& job : jobs) {
    used[job.dataset_index] = true;
    if (regime_pretrained(job.config.regime)) vectors[job.config.pretrained_path] = true;
  }
  for (std::size_t d = 0; d < spec.datasets.size(); ++d) {
    const auto& ref = spec.datasets[d];
    if (!used[d] || ref.synthetic) continue;
    const fs::path p = resolve_data_path(data_root, ref.path);
    if (!fs::exists(p)) missing.push_back("dataset " + ref.id + " (" + format_name(*ref.format) + "): " + p.string());
  }
  for (const auto& [path, _] : vectors) {
    const fs::path p = resolve_data_path(data_root, path);
    if (!fs::exists(p)) missing.push_back("word vectors: " + p.string());
  }
  return missing;
}

Dataset load_dataset_ref(const DatasetRef& ref, const fs::path& data_root) {
  Dataset ds = ref.synthetic ? make_synthetic_dataset(*ref.synthetic, ref.id)
                             : load_dataset(resolve_data_path(data_root, ref.path), *ref.format);
  ds.name = ref.id;
  return ds;
}

Json dataset_stats(const Dataset& ds) {
  return {{"c", ds.num_classes},
          {"l", ds.mean_sentence_length()},
          {"N", ds.num_sentences()},
          {"V", ds.vocab.token_count()},
          {"test", ds.cross_validation ? Json("CV") : Json(ds.test.size())},
          {"train", ds.train.size()},
          {"dev", ds.dev.size()},
          {"max_len", ds.max_len},
          {"truncated", ds.truncated},
          {"skipped_lines", ds.skipped_lines}};
}

ExperimentSummary run_experiment(const ExperimentSpec& spec, const ExperimentOptions& options) {
  std::ostream* log = options.log;
  const auto jobs = expand_jobs(spec, options.overrides);
  ExperimentSummary summary;
  summary.output_dir = resolve_output_dir(spec, options.overrides);
  summary.jobs = jobs.size();

  const auto missing = missing_inputs(spec, jobs, options.data_root);
  if (!missing.empty()) {
    std::string msg = "missing inputs (data root " + options.data_root.string() + "):";
    for (const auto& m : missing) msg += "\n  " + m;
    throw DataError(msg);
  }

  // load everything up front so a broken input fails before any training
  std::map<std::size_t, Dataset> datasets;
  std::map<std::pair<std::size_t, std::string>, EmbeddingTable> vectors;
  for (const auto& job : jobs) {
    if (!datasets.count(job.dataset_index)) {
      Dataset ds = load_dataset_ref(spec.datasets[job.dataset_index], options.data_root);
      if (log) *log << "dataset " << ds.name << ": " << dataset_stats(ds).dump() << "\n";
      datasets.emplace(job.dataset_index, std::move(ds));
    }
    if (regime_pretrained(job.config.regime)) {
      const auto key = std::make_pair(job.dataset_index, job.config.pretrained_path + "#" +
                                                             std::to_string(job.config.embedding_dim));
      if (!vectors.count(key)) {
        Rng rng = Rng::stream(job.config.seed, kVectorInitTag);
        EmbeddingTable table =
            load_pretrained_vectors(resolve_data_path(options.data_root, job.config.pretrained_path),
                                    datasets.at(job.dataset_index).vocab, job.config.embedding_dim, false, rng);
        if (log) *log << "vectors " << job.config.pretrained_path << " coverage " << table.coverage << "\n";
        vectors.emplace(key, std::move(table));
      }
    }
  }

  fs::create_directories(summary.output_dir);
  {
    Json manifest{{"name", spec.name}, {"jobs", Json::array()}};
    for (const auto& job : jobs) manifest["jobs"].push_back({{"dir", job.dir_name}, {"key", job.key}});
    std::ofstream(summary.output_dir / "experiment.json") << manifest.dump(1) << "\n";
  }

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Job& job = jobs[j];
    const Dataset& ds = datasets.at(job.dataset_index);
    const fs::path dir = summary.output_dir / job.dir_name;
    const std::string tag = "[" + std::to_string(j + 1) + "/" + std::to_string(jobs.size()) + "] " + job.dir_name;
    if (fs::exists(dir / kResultFile)) {
      bool complete = false;
      try {
        complete = read_config_result(dir).key_hash == job.hash;
      } catch (const std::exception&) {
      }
      if (complete) {
        if (log) *log << tag << ": already complete, skipped\n";
        ++summary.skipped;
        continue;
      }
    }
    fs::create_directories(dir);
    std::ofstream partial(dir / "runs.jsonl", std::ios::trunc);
    std::vector<std::unique_ptr<MixLog>> mix_logs;
    HooksFactory hooks_for;
    if (options.mix_log)
      hooks_for = [&](std::uint64_t seed, std::size_t fold) {
        mix_logs.push_back(std::make_unique<MixLog>(
            dir / ("mixlog_seed" + std::to_string(seed) + "_fold" + std::to_string(fold) + ".csv")));
        TrainHooks hooks;
        hooks.mix_log = mix_logs.back().get();
        return hooks;
      };

    const EmbeddingTable* pretrained = nullptr;
    if (regime_pretrained(job.config.regime))
      pretrained = &vectors.at({job.dataset_index, job.config.pretrained_path + "#" +
                                                       std::to_string(job.config.embedding_dim)});
    auto on_result = [&](const RunResult& r) {
      partial << to_json(r).dump() << "\n" << std::flush;
      if (log)
        *log << tag << ": seed " << r.seed << " fold " << r.fold << " test acc " << r.test_accuracy
             << " (dev-best " << r.best_dev_accuracy << " at step " << r.best_step << ", " << r.wall_seconds
             << " s)\n";
    };
    Aggregate agg = repeated_runs(job.config, ds, on_result, pretrained, hooks_for);

    ConfigResult result;
    result.key_hash = job.hash;
    result.dataset = spec.datasets[job.dataset_index].id;
    result.dataset_index = job.dataset_index;
    result.dataset_stats = dataset_stats(ds);
    result.config = job.config;
    result.mean = agg.mean;
    result.stddev = agg.stddev;
    result.run_accuracies = agg.run_accuracies;
    result.runs = std::move(agg.results);
    write_config_result(dir, result);
    ++summary.trained;
    if (log) *log << tag << ": " << format_cell(result.mean, result.stddev) << "\n";
  }

  summary.tables = emit_report(summary.output_dir);
  return summary;
}

}  // namespace mixsent
