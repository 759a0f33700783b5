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

#ifndef MIXSENT_REPORT_HPP
#define MIXSENT_REPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "mixsent/serialize.hpp"
#include "mixsent/trainer.hpp"

namespace mixsent {

/// Everything persisted for one (dataset, TrainConfig) pair.
struct ConfigResult {
  std::string key_hash;
  std::string dataset;
  std::size_t dataset_index = 0;  // column order
  Json dataset_stats;
  TrainConfig config;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> run_accuracies;
  std::vector<RunResult> runs;
};

inline constexpr const char* kResultFile = "result.json";
inline constexpr const char* kCurvesFile = "curves.csv";

Json to_json(const ConfigResult& result);
ConfigResult config_result_from_json(const Json& object);
void write_config_result(const std::filesystem::path& dir, const ConfigResult& result);
ConfigResult read_config_result(const std::filesystem::path& dir);
/// Every `<dir>/*/result.json`, ordered by directory name.
std::vector<ConfigResult> load_results(const std::filesystem::path& dir);

/// Accuracy fractions rendered as percentages, `MM.M±S.SS`.
std::string format_cell(double mean, double stddev);

struct ReportCell {
  bool present = false;
  double mean = 0.0;
  double stddev = 0.0;
  std::string text;
  bool best = false;
};

/// One embedding regime: rows are (encoder, method) pairs, columns datasets.
struct ReportTable {
  std::string regime;
  std::vector<std::string> rows;
  std::vector<std::string> datasets;
  std::vector<std::vector<ReportCell>> cells;  // [row][column]
};

std::vector<ReportTable> build_tables(const std::vector<ConfigResult>& results);
std::string render_text(const std::vector<ReportTable>& tables);
std::string render_csv(const ReportTable& table);
/// `step,train_ce,test_ce`, each value averaged over the runs (and folds).
std::string curves_csv(const ConfigResult& result);

/// Rebuilds report.txt, report_<regime>.csv and each per-config curves.csv
/// from what is on disk. Never trains.
std::vector<ReportTable> emit_report(const std::filesystem::path& results_dir);

}  // namespace mixsent

#endif  // MIXSENT_REPORT_HPP
