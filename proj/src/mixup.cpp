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

#include "mixsent/mixup.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>

#include "mixsent/errors.hpp"
#include "mixsent/ops.hpp"

namespace mixsent {

SoftLabel::SoftLabel(std::vector<double> probs) : probs_(std::move(probs)) {
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw ContractError("soft label entries must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ContractError("soft label sums to " + std::to_string(total));
}

SoftLabel SoftLabel::one_hot(std::size_t num_classes, std::size_t label) {
  if (label >= num_classes) throw DataError("label " + std::to_string(label) + " outside " + std::to_string(num_classes) + " classes");
  std::vector<double> p(num_classes, 0.0);
  p[label] = 1.0;
  return SoftLabel(std::move(p));
}

SoftLabel mix_labels(const SoftLabel& a, const SoftLabel& b, double lambda) {
  if (a.size() != b.size()) throw DimensionError("soft labels over different class counts");
  std::vector<double> p(a.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = lambda * a[k] + (1.0 - lambda) * b[k];
  return SoftLabel(std::move(p));
}

double sample_lambda(const MixPolicy& policy, Rng& rng) {
  if (!(policy.alpha > 0.0)) throw ConfigError("mixing alpha must be positive, got " + std::to_string(policy.alpha));
  // Beta(a, a) as X / (X + Y) with X, Y ~ Gamma(a, 1).
  const double x = rng.gamma(policy.alpha);
  const double y = rng.gamma(policy.alpha);
  if (x + y == 0.0) return 0.5;
  return x / (x + y);
}

std::vector<MixPair> pair_within_batch(std::size_t m, Rng& rng) {
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  std::vector<MixPair> pairs(m);
  for (std::size_t i = 0; i < m; ++i) pairs[i] = {i, perm[i]};
  return pairs;
}

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ContractError("mixing ratio outside [0,1]: " + std::to_string(lambda));
}

}  // namespace

MixedSample word_mixup(const Tensor& words_i, const Tensor& words_j, const SoftLabel& y_i, const SoftLabel& y_j,
                       double lambda) {
  check_lambda(lambda);
  if (words_i.shape() != words_j.shape()) {
    throw ContractError("word_mixup: " + shape_str(words_i.shape()) + " vs " + shape_str(words_j.shape()) +
                        " (inputs must share one padded length)");
  }
  return {lerp(words_i, words_j, lambda), mix_labels(y_i, y_j, lambda)};
}

MixedSample sen_mixup(const Tensor& enc_i, const Tensor& enc_j, const SoftLabel& y_i, const SoftLabel& y_j,
                      double lambda) {
  check_lambda(lambda);
  if (enc_i.shape() != enc_j.shape()) {
    throw DimensionError("sen_mixup: " + shape_str(enc_i.shape()) + " vs " + shape_str(enc_j.shape()));
  }
  return {lerp(enc_i, enc_j, lambda), mix_labels(y_i, y_j, lambda)};
}

std::vector<std::size_t> MixedBatch::partners() const {
  std::vector<std::size_t> out(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) out[p] = pairs[p].second;
  return out;
}

std::vector<double> MixedBatch::flat_targets() const {
  std::vector<double> out;
  for (const auto& t : targets) out.insert(out.end(), t.probs().begin(), t.probs().end());
  return out;
}

MixedBatch make_mixed_batch(std::span<const std::size_t> labels, std::size_t num_classes, std::vector<MixPair> pairs,
                            std::vector<double> lambdas) {
  if (pairs.size() != labels.size() || lambdas.size() != labels.size()) {
    throw DimensionError("mixed batch needs one pair and one ratio per sample");
  }
  MixedBatch batch;
  batch.pairs = std::move(pairs);
  batch.lambdas = std::move(lambdas);
  batch.targets.reserve(labels.size());
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const auto [i, j] = batch.pairs[p];
    if (i >= labels.size() || j >= labels.size()) throw DimensionError("mix pair index outside the batch");
    check_lambda(batch.lambdas[p]);
    batch.targets.push_back(mix_labels(SoftLabel::one_hot(num_classes, labels[i]),
                                       SoftLabel::one_hot(num_classes, labels[j]), batch.lambdas[p]));
  }
  return batch;
}

MixedBatch plan_mixed_batch(std::span<const std::size_t> labels, std::size_t num_classes, const MixPolicy& policy,
                            Rng& rng) {
  auto pairs = pair_within_batch(labels.size(), rng);
  std::vector<double> lambdas(labels.size());
  for (auto& l : lambdas) l = sample_lambda(policy, rng);
  return make_mixed_batch(labels, num_classes, std::move(pairs), std::move(lambdas));
}

MixLog::MixLog(const std::filesystem::path& path) : out_(path) {
  if (!out_) throw IoError("cannot write mix log " + path.string());
  out_ << "step,i,j,lambda\n";
}

void MixLog::record(std::size_t step, const MixedBatch& batch, std::span<const std::size_t> source_ids) {
  out_ << std::setprecision(17);
  for (std::size_t p = 0; p < batch.pairs.size(); ++p) {
    out_ << step << ',' << source_ids[batch.pairs[p].first] << ',' << source_ids[batch.pairs[p].second] << ','
         << batch.lambdas[p] << '\n';
  }
}

}  // namespace mixsent
