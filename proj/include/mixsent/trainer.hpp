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

#ifndef MIXSENT_TRAINER_HPP
#define MIXSENT_TRAINER_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixsent/dataset.hpp"
#include "mixsent/embedding.hpp"
#include "mixsent/encoders.hpp"
#include "mixsent/mixup.hpp"

namespace mixsent {

enum class Method { kBaseline, kWordMixup, kSenMixup };

Method parse_method(const std::string& name);
std::string method_name(Method method);

/// One training configuration. Regularization defaults depend on the
/// method: baseline gets dropout 0.5 and L2 0.2, the mixup methods train
/// without either and reject explicit non-zero values.
struct TrainConfig {
  Method method = Method::kBaseline;
  EncoderKind encoder = EncoderKind::kCnn;
  EmbeddingRegime regime = EmbeddingRegime::kRandomTune;
  double alpha = 1.0;
  std::size_t batch_size = 50;
  std::size_t steps = 20000;
  double learning_rate = 1e-3;
  std::optional<double> dropout;
  std::optional<double> l2;
  std::uint64_t seed = 0;
  std::size_t runs = 10;
  std::size_t eval_every = 100;

  std::size_t embedding_dim = 300;
  std::size_t hidden_dim = 100;
  std::size_t feature_maps = 100;
  std::vector<std::size_t> filter_sizes{3, 4, 5};
  std::string pretrained_path;  // word-vector file for the Pretrain* regimes

  std::size_t folds = 10;          // CV corpora only
  std::size_t max_folds = 0;       // 0 = every fold
  double dev_fraction = 0.1;
  std::size_t train_subsample = 0;  // 0 = full training split

  double effective_dropout() const;
  double effective_l2() const;
  bool is_mixup() const { return method != Method::kBaseline; }
  /// Raises ConfigError on contradictions (e.g. mixup with dropout > 0).
  void validate() const;
  ModelConfig model_config(std::size_t vocab_size, std::size_t num_classes) const;
};

inline constexpr double kBaselineDropout = 0.5;
inline constexpr double kBaselineL2 = 0.2;

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t step = 0;
  std::vector<std::vector<double>> first;
  std::vector<std::vector<double>> second;
};

/// A tensor the optimizer may update. Leading `frozen_rows` rows of a
/// rank-2 tensor are never touched (the padding row of a word table).
struct OptimParam {
  std::string name;
  Tensor tensor;
  std::size_t frozen_rows = 0;
};

/// Bias-corrected Adam update of every parameter that requires grad.
/// A non-finite gradient raises NumericError naming the parameter and step.
void adam_step(std::span<OptimParam> params, AdamState& state, double learning_rate);

/// Instrumentation of regularizer usage within one run.
struct RunCounters {
  std::size_t dropout_masks = 0;
  std::size_t l2_terms = 0;
  std::size_t mixed_batches = 0;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::size_t fold = 0;
  double test_accuracy = 0.0;
  double test_ce = 0.0;
  double best_dev_accuracy = 0.0;
  std::size_t best_step = 0;
  std::vector<std::size_t> curve_steps;
  std::vector<double> train_ce;  // mean training-objective CE over each eval window
  std::vector<double> test_ce_curve;
  std::vector<double> dev_accuracy;
  std::vector<double> train_eval_ce;  // clean training-split CE per eval; only with eval_train_split
  std::vector<double> step_losses;  // per-step training CE (regularizer excluded)
  double wall_seconds = 0.0;
  RunCounters counters;
};

struct EvalResult {
  double accuracy = 0.0;
  double cross_entropy = 0.0;
};

/// Accuracy against hard labels and mean CE against one-hot targets, with
/// no dropout.
EvalResult evaluate(const Model& model, std::span<const Example> examples, std::size_t batch_size = 100);

/// Test hooks for a run.
struct TrainHooks {
  std::optional<double> forced_lambda;
  bool identity_pairing = false;
  MixLog* mix_log = nullptr;
};

struct TrainOptions {
  const EmbeddingTable* pretrained = nullptr;  // required for Pretrain* regimes
  TrainHooks hooks;
  std::size_t fold = 0;
  bool eval_train_split = false;
};

/// One training run over a prepared split.
class Trainer {
 public:
  Trainer(TrainConfig config, const Dataset& dataset, SplitView split, TrainOptions options = {});

  RunResult run();
  const Model& model() const { return *model_; }
  Model& model() { return *model_; }
  const RunCounters& counters() const { return counters_; }

 private:
  double train_step(std::size_t step, std::span<const std::size_t> batch);
  std::vector<std::size_t> next_batch();

  TrainConfig config_;
  const Dataset& dataset_;
  SplitView split_;
  TrainOptions options_;
  Rng batch_rng_;
  Rng mix_rng_;
  Rng dropout_rng_;
  std::unique_ptr<Model> model_;
  std::vector<OptimParam> params_;
  AdamState adam_;
  RunCounters counters_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

RunResult train_run(const TrainConfig& config, const Dataset& dataset, const SplitView& split,
                    const TrainOptions& options = {});

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample deviation; 0 for a single run
  std::vector<double> run_accuracies;
  std::vector<RunResult> results;  // every (run, fold)
};

/// Mean and sample standard deviation (n−1 denominator).
std::pair<double, double> mean_std(std::span<const double> values);

/// Runs seeds seed, seed+1, ...; on CV corpora each run covers the fold plan
/// and its accuracy is the fold mean. `on_result` sees every finished run so
/// callers can persist partial progress before an error propagates.
/// Per-(run seed, fold) debug hooks.
using HooksFactory = std::function<TrainHooks(std::uint64_t seed, std::size_t fold)>;

Aggregate repeated_runs(const TrainConfig& config, const Dataset& dataset,
                        const std::function<void(const RunResult&)>& on_result = {},
                        const EmbeddingTable* pretrained = nullptr, const HooksFactory& hooks_for = {});

}  // namespace mixsent

#endif  // MIXSENT_TRAINER_HPP
