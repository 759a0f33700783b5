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

// mixsent command-line driver.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "mixsent/errors.hpp"
#include "mixsent/experiments.hpp"
#include "mixsent/report.hpp"
#include "mixsent/selftest.hpp"

namespace fs = std::filesystem;
using namespace mixsent;

namespace {

int print_outcomes(const std::vector<CheckOutcome>& outcomes) {
  bool all = true;
  for (const auto& o : outcomes) {
    std::cout << (o.passed ? "PASS " : "FAIL ") << o.name << " (" << std::fixed << std::setprecision(2) << o.seconds
              << " s): " << std::defaultfloat << o.detail << "\n";
    all = all && o.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentence classification with wordMixup and senMixup"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "Run every configuration of an experiment spec");
  std::string config_path;
  bool desk_scale = false;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string data_root;
  bool mix_log = false;
  train->add_option("--config", config_path, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
  train->add_flag("--desk-scale", desk_scale, "Apply the spec's desk_scale block");
  auto* seed_opt = train->add_option("--seed", seed, "Base seed for every configuration");
  train->add_option("--out", out_dir, "Results directory (overrides the spec)");
  train->add_option("--data-root", data_root, "Dataset root (default: $MIXSENT_DATA, else ./data)");
  train->add_flag("--mix-log", mix_log, "Write step,i,j,lambda CSVs for every mixup run");

  auto* report = app.add_subcommand("report", "Regenerate tables and curves from persisted results");
  std::string results_dir;
  report->add_option("--results", results_dir, "Results directory")->required()->check(CLI::ExistingDirectory);

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the toy CNN and LSTM classifiers");
  double tolerance = 1e-4;
  gradcheck->add_option("--tolerance", tolerance, "Maximum relative error");

  auto* selftest = app.add_subcommand("selftest", "Run the invariant suites");

  auto* stats = app.add_subcommand("stats", "Load a corpus and print its statistics");
  std::string stats_path, stats_format;
  stats->add_option("--path", stats_path, "Dataset file or directory")->required();
  stats->add_option("--format", stats_format, "trec | mr | sst1 | sst2 | subj | generic-tsv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      ExperimentOptions opts;
      opts.overrides.desk_scale = desk_scale;
      if (*seed_opt) opts.overrides.seed = seed;
      if (!out_dir.empty()) opts.overrides.output_dir = out_dir;
      if (!data_root.empty()) opts.data_root = data_root;
      opts.mix_log = mix_log;
      opts.log = &std::cerr;
      const auto spec = load_experiment_spec(config_path);
      const auto summary = run_experiment(spec, opts);
      std::cout << render_text(summary.tables);
      std::cerr << summary.jobs << " configurations: " << summary.trained << " trained, " << summary.skipped
                << " already complete; results in " << summary.output_dir.string() << "\n";
      return 0;
    }
    if (*report) {
      std::cout << render_text(emit_report(results_dir));
      return 0;
    }
    if (*gradcheck) return print_outcomes({check_gradient_fidelity(tolerance)});
    if (*selftest) return print_outcomes(run_selftests());
    if (*stats) {
      Dataset ds = load_dataset(stats_path, parse_format(stats_format));
      std::cout << dataset_stats(ds).dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
