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

#ifndef MIXSENT_EXPERIMENTS_HPP
#define MIXSENT_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mixsent/dataset.hpp"
#include "mixsent/report.hpp"
#include "mixsent/serialize.hpp"
#include "mixsent/synthetic.hpp"
#include "mixsent/trainer.hpp"

namespace mixsent {

/// A corpus referenced by an experiment: a file layout under the data root,
/// or a generated toy corpus.
struct DatasetRef {
  std::string id;
  std::optional<DatasetFormat> format;
  std::string path;  // relative paths resolve against the data root
  std::optional<SyntheticCorpusSpec> synthetic;
  Json overrides = Json::object();  // config keys applied for this dataset only

  Json echo() const;
};

/// Reduced-cost variant of a spec. Only applied when enabled in the file or
/// requested on the command line; a spec without this block never changes.
struct DeskScale {
  bool enabled = false;
  Json overrides = Json::object();
  Json dataset_overrides = Json::object();  // id -> config keys
};

struct ExperimentSpec {
  std::string name;
  std::vector<DatasetRef> datasets;
  std::vector<Json> configs;  // overlays on `base`, already expanded from the matrix
  Json base = Json::object();
  std::filesystem::path output_dir;
  std::optional<DeskScale> desk_scale;
};

/// Raises ParseError (with line) for malformed JSON and ConfigError (with a
/// key path) for schema violations.
ExperimentSpec parse_experiment_spec(const std::string& text, const std::string& source = "spec");
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

struct RunOverrides {
  bool desk_scale = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
};

/// One (dataset, TrainConfig) unit of work and its content-derived directory.
struct Job {
  std::size_t dataset_index = 0;
  TrainConfig config;
  Json key;
  std::string hash;
  std::string dir_name;
};

std::vector<Job> expand_jobs(const ExperimentSpec& spec, const RunOverrides& overrides = {});
std::filesystem::path resolve_output_dir(const ExperimentSpec& spec, const RunOverrides& overrides = {});

/// $MIXSENT_DATA, or ./data when unset.
std::filesystem::path default_data_root();
std::filesystem::path resolve_data_path(const std::filesystem::path& root, const std::string& path);

/// Files the jobs need that are absent (datasets and vector files), as
/// human-readable entries.
std::vector<std::string> missing_inputs(const ExperimentSpec& spec, const std::vector<Job>& jobs,
                                        const std::filesystem::path& data_root);

Dataset load_dataset_ref(const DatasetRef& ref, const std::filesystem::path& data_root);
/// Corpus summary: classes c, mean length l, sentences N, vocabulary V, test size, loader diagnostics.
Json dataset_stats(const Dataset& dataset);

struct ExperimentOptions {
  RunOverrides overrides;
  std::filesystem::path data_root = default_data_root();
  bool mix_log = false;
  std::ostream* log = nullptr;
};

struct ExperimentSummary {
  std::filesystem::path output_dir;
  std::size_t jobs = 0;
  std::size_t trained = 0;
  std::size_t skipped = 0;
  std::vector<ReportTable> tables;
};

/// Trains every job not already completed under the output directory, then
/// regenerates the report. Every input is checked and loaded before the
/// first run starts.
ExperimentSummary run_experiment(const ExperimentSpec& spec, const ExperimentOptions& options = {});

}  // namespace mixsent

#endif  // MIXSENT_EXPERIMENTS_HPP
