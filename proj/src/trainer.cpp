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

#include "mixsent/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "mixsent/errors.hpp"
#include "mixsent/ops.hpp"

namespace mixsent {

namespace {

// Independent RNG streams per run.
enum StreamTag : std::uint64_t { kInitStream = 1, kBatchStream = 2, kMixStream = 3, kDropoutStream = 4 };

std::vector<double> one_hot_targets(std::span<const Example> examples, std::span<const std::size_t> batch,
                                    std::size_t num_classes) {
  std::vector<double> t(batch.size() * num_classes, 0.0);
  for (std::size_t p = 0; p < batch.size(); ++p) t[p * num_classes + examples[batch[p]].label] = 1.0;
  return t;
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "baseline") return Method::kBaseline;
  if (name == "wordMixup") return Method::kWordMixup;
  if (name == "senMixup") return Method::kSenMixup;
  throw ConfigError("unknown method '" + name + "'");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::kBaseline: return "baseline";
    case Method::kWordMixup: return "wordMixup";
    case Method::kSenMixup: return "senMixup";
  }
  return "unknown";
}

double TrainConfig::effective_dropout() const {
  if (dropout) return *dropout;
  return is_mixup() ? 0.0 : kBaselineDropout;
}

double TrainConfig::effective_l2() const {
  if (l2) return *l2;
  return is_mixup() ? 0.0 : kBaselineL2;
}

void TrainConfig::validate() const {
  if (is_mixup() && effective_dropout() != 0.0) {
    throw ConfigError(method_name(method) + " trains without dropout; got dropout " +
                      std::to_string(effective_dropout()));
  }
  if (is_mixup() && effective_l2() != 0.0) {
    throw ConfigError(method_name(method) + " trains without L2; got l2 " + std::to_string(effective_l2()));
  }
  if (effective_dropout() < 0.0 || effective_dropout() >= 1.0) throw ConfigError("dropout must lie in [0,1)");
  if (effective_l2() < 0.0) throw ConfigError("l2 must be non-negative");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (eval_every == 0) throw ConfigError("eval_every must be positive");
  if (runs == 0) throw ConfigError("runs must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (embedding_dim == 0 || hidden_dim == 0 || feature_maps == 0 || filter_sizes.empty()) {
    throw ConfigError("model dimensions must be positive");
  }
  if (regime_pretrained(regime) && pretrained_path.empty()) {
    throw ConfigError(regime_name(regime) + " needs pretrained_path");
  }
  if (!(dev_fraction >= 0.0 && dev_fraction < 1.0)) throw ConfigError("dev_fraction must lie in [0,1)");
}

ModelConfig TrainConfig::model_config(std::size_t vocab_size, std::size_t num_classes) const {
  ModelConfig mc;
  mc.encoder = encoder;
  mc.vocab_size = vocab_size;
  mc.embedding_dim = embedding_dim;
  mc.num_classes = num_classes;
  mc.filter_sizes = filter_sizes;
  mc.feature_maps = feature_maps;
  mc.hidden_dim = hidden_dim;
  return mc;
}

void adam_step(std::span<OptimParam> params, AdamState& state, double learning_rate) {
  if (state.first.empty()) {
    for (const auto& p : params) {
      state.first.emplace_back(p.tensor.size(), 0.0);
      state.second.emplace_back(p.tensor.size(), 0.0);
    }
  }
  if (state.first.size() != params.size()) throw DimensionError("Adam state tracks a different parameter list");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k];
    if (!p.tensor.requires_grad()) continue;
    if (!p.tensor.has_grad()) continue;
    auto grad = p.tensor.mutable_grad();
    auto values = p.tensor.mutable_data();
    for (std::size_t i = 0; i < grad.size(); ++i) {
      if (!std::isfinite(grad[i])) {
        throw NumericError("non-finite gradient in " + p.name + "[" + std::to_string(i) + "] at step " +
                           std::to_string(state.step));
      }
    }
    auto& m = state.first[k];
    auto& v = state.second[k];
    const std::size_t begin = p.frozen_rows * (p.tensor.rank() == 2 ? p.tensor.dim(1) : 1);
    for (std::size_t i = begin; i < values.size(); ++i) {
      const double g = grad[i];
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      values[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

EvalResult evaluate(const Model& model, std::span<const Example> examples, std::size_t batch_size) {
  EvalResult r;
  if (examples.empty()) return r;
  NoGradGuard no_grad;
  const std::size_t c = model.config().num_classes;
  std::size_t correct = 0;
  double ce = 0.0;
  for (std::size_t start = 0; start < examples.size(); start += batch_size) {
    const std::size_t end = std::min(examples.size(), start + batch_size);
    std::vector<Tensor> words;
    words.reserve(end - start);
    for (std::size_t i = start; i < end; ++i) words.push_back(model.embed(examples[i].ids));
    Tensor logits = model.logits(model.encode_batch(words));
    const auto z = logits.data();
    for (std::size_t p = 0; p < end - start; ++p) {
      auto row = z.subspan(p * c, c);
      const std::size_t label = examples[start + p].label;
      correct += predict(row) == label;
      const double mx = *std::max_element(row.begin(), row.end());
      double total = 0.0;
      for (double v : row) total += std::exp(v - mx);
      ce += mx + std::log(total) - row[label];
    }
  }
  const double n = static_cast<double>(examples.size());
  r.accuracy = static_cast<double>(correct) / n;
  r.cross_entropy = ce / n;
  return r;
}

Trainer::Trainer(TrainConfig config, const Dataset& dataset, SplitView split, TrainOptions options)
    : config_(std::move(config)),
      dataset_(dataset),
      split_(std::move(split)),
      options_(options),
      batch_rng_(Rng::stream(config_.seed, kBatchStream)),
      mix_rng_(Rng::stream(config_.seed, kMixStream)),
      dropout_rng_(Rng::stream(config_.seed, kDropoutStream)) {
  config_.validate();
  if (split_.train.empty()) throw DataError("empty training split");
  Rng init_rng = Rng::stream(config_.seed, kInitStream);
  const bool trainable = regime_trainable(config_.regime);
  EmbeddingTable table;
  if (regime_pretrained(config_.regime)) {
    if (!options_.pretrained) throw ConfigError(regime_name(config_.regime) + " run without a loaded vector table");
    table = *options_.pretrained;
    table.table = options_.pretrained->table.detach_copy(trainable);
    table.trainable = trainable;
  } else {
    table = random_embedding(dataset_.vocab.size(), config_.embedding_dim, trainable, init_rng);
  }
  model_ = std::make_unique<Model>(config_.model_config(dataset_.vocab.size(), dataset_.num_classes),
                                   std::move(table), init_rng);
  for (auto& np : model_->parameters()) {
    params_.push_back({np.name, np.tensor, np.name == "embedding" ? std::size_t{1} : std::size_t{0}});
  }
  order_.resize(split_.train.size());
  std::iota(order_.begin(), order_.end(), 0);
  cursor_ = order_.size();
}

std::vector<std::size_t> Trainer::next_batch() {
  const std::size_t m = std::min(config_.batch_size, order_.size());
  if (cursor_ + m > order_.size()) {
    std::shuffle(order_.begin(), order_.end(), batch_rng_.engine());
    cursor_ = 0;
  }
  std::vector<std::size_t> batch(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                                 order_.begin() + static_cast<std::ptrdiff_t>(cursor_ + m));
  cursor_ += m;
  return batch;
}

double Trainer::train_step(std::size_t step, std::span<const std::size_t> batch) {
  const std::size_t m = batch.size();
  const std::size_t c = dataset_.num_classes;
  const auto& train = split_.train;
  const Model& model = *model_;

  std::vector<Tensor> words;
  words.reserve(m);
  std::vector<std::size_t> labels(m);
  for (std::size_t p = 0; p < m; ++p) {
    words.push_back(model.embed(train[batch[p]].ids));
    labels[p] = train[batch[p]].label;
  }

  Tensor ce;
  if (config_.method == Method::kBaseline) {
    Tensor enc = model.encode_batch(words);
    const double rate = config_.effective_dropout();
    if (rate > 0.0) {
      enc = dropout(enc, rate, dropout_rng_);
      ++counters_.dropout_masks;
    }
    ce = softmax_cross_entropy_soft(model.logits(enc), one_hot_targets(train, batch, c));
  } else {
    MixedBatch mix;
    if (options_.hooks.forced_lambda || options_.hooks.identity_pairing) {
      std::vector<MixPair> pairs = options_.hooks.identity_pairing ? std::vector<MixPair>{} : pair_within_batch(m, mix_rng_);
      if (options_.hooks.identity_pairing)
        for (std::size_t p = 0; p < m; ++p) pairs.emplace_back(p, p);
      std::vector<double> lambdas(m);
      for (auto& l : lambdas)
        l = options_.hooks.forced_lambda ? *options_.hooks.forced_lambda : sample_lambda({config_.alpha}, mix_rng_);
      mix = make_mixed_batch(labels, c, std::move(pairs), std::move(lambdas));
    } else {
      mix = plan_mixed_batch(labels, c, {config_.alpha}, mix_rng_);
    }
    ++counters_.mixed_batches;
    if (options_.hooks.mix_log) options_.hooks.mix_log->record(step, mix, batch);

    Tensor enc;
    if (config_.method == Method::kWordMixup) {
      std::vector<Tensor> mixed;
      mixed.reserve(m);
      for (std::size_t p = 0; p < m; ++p) {
        const auto [i, j] = mix.pairs[p];
        mixed.push_back(lerp(words[i], words[j], mix.lambdas[p]));
      }
      enc = model.encode_batch(mixed);
    } else {
      // each source is encoded once and reused by every pair that references it
      const auto partners = mix.partners();
      enc = mix_rows(model.encode_batch(words), partners, mix.lambdas);
    }
    ce = softmax_cross_entropy_soft(model.logits(enc), mix.flat_targets());
  }

  const double ce_value = ce.item();
  Tensor objective = ce;
  const double l2 = config_.effective_l2();
  if (l2 > 0.0) {
    objective = add(ce, scale(square_sum(model.classifier().weight), l2));
    ++counters_.l2_terms;
  }
  backward(objective);
  adam_step(params_, adam_, config_.learning_rate);
  for (auto& p : params_) p.tensor.zero_grad();
  return ce_value;
}

RunResult Trainer::run() {
  const auto started = std::chrono::steady_clock::now();
  RunResult result;
  result.seed = config_.seed;
  result.fold = options_.fold;

  std::vector<std::vector<double>> best_snapshot;
  bool have_best = false;
  double window = 0.0;
  std::size_t window_count = 0;
  for (std::size_t step = 1; step <= config_.steps; ++step) {
    const auto batch = next_batch();
    const double loss = train_step(step, batch);
    result.step_losses.push_back(loss);
    window += loss;
    ++window_count;
    if (step % config_.eval_every == 0) {
      const EvalResult dev = evaluate(*model_, split_.dev.empty() ? split_.test : split_.dev);
      const EvalResult test = evaluate(*model_, split_.test);
      result.curve_steps.push_back(step);
      result.train_ce.push_back(window / static_cast<double>(window_count));
      result.test_ce_curve.push_back(test.cross_entropy);
      result.dev_accuracy.push_back(dev.accuracy);
      if (options_.eval_train_split) result.train_eval_ce.push_back(evaluate(*model_, split_.train).cross_entropy);
      window = 0.0;
      window_count = 0;
      if (!have_best || dev.accuracy > result.best_dev_accuracy) {
        have_best = true;
        result.best_dev_accuracy = dev.accuracy;
        result.best_step = step;
        best_snapshot.clear();
        for (const auto& p : params_) best_snapshot.emplace_back(p.tensor.data().begin(), p.tensor.data().end());
      }
    }
  }
  if (have_best) {
    for (std::size_t k = 0; k < params_.size(); ++k) {
      auto dst = params_[k].tensor.mutable_data();
      std::copy(best_snapshot[k].begin(), best_snapshot[k].end(), dst.begin());
    }
  } else {
    result.best_dev_accuracy = evaluate(*model_, split_.dev.empty() ? split_.test : split_.dev).accuracy;
    result.best_step = config_.steps;
  }
  const EvalResult final_test = evaluate(*model_, split_.test);
  result.test_accuracy = final_test.accuracy;
  result.test_ce = final_test.cross_entropy;
  result.counters = counters_;
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

RunResult train_run(const TrainConfig& config, const Dataset& dataset, const SplitView& split,
                    const TrainOptions& options) {
  Trainer trainer(config, dataset, split, options);
  return trainer.run();
}

std::pair<double, double> mean_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

Aggregate repeated_runs(const TrainConfig& config, const Dataset& dataset,
                        const std::function<void(const RunResult&)>& on_result, const EmbeddingTable* pretrained,
                        const HooksFactory& hooks_for) {
  config.validate();
  Aggregate agg;
  const std::size_t folds = dataset.cross_validation
                                ? (config.max_folds ? std::min(config.max_folds, config.folds) : config.folds)
                                : 1;
  for (std::size_t r = 0; r < config.runs; ++r) {
    TrainConfig run_config = config;
    run_config.seed = config.seed + r;
    double fold_total = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      // the fold plan is fixed by the base seed; runs vary only the model seed
      SplitView split = make_split(dataset, f, config.folds, config.dev_fraction, config.seed);
      if (config.train_subsample) subsample_train(split, config.train_subsample, config.seed);
      TrainOptions options;
      options.pretrained = pretrained;
      options.fold = f;
      if (hooks_for) options.hooks = hooks_for(run_config.seed, f);
      RunResult result = train_run(run_config, dataset, split, options);
      fold_total += result.test_accuracy;
      if (on_result) on_result(result);
      agg.results.push_back(std::move(result));
    }
    agg.run_accuracies.push_back(fold_total / static_cast<double>(folds));
  }
  std::tie(agg.mean, agg.stddev) = mean_std(agg.run_accuracies);
  return agg;
}

}  // namespace mixsent
