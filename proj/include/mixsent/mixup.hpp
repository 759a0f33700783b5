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

#ifndef MIXSENT_MIXUP_HPP
#define MIXSENT_MIXUP_HPP

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <utility>
#include <vector>

#include "mixsent/rng.hpp"
#include "mixsent/tensor.hpp"

namespace mixsent {

/// Mixing policy: λ ~ Beta(alpha, alpha), one draw per sample pair.
struct MixPolicy {
  double alpha = 1.0;
};

/// Probability vector over classes.
class SoftLabel {
 public:
  SoftLabel() = default;
  explicit SoftLabel(std::vector<double> probs);
  static SoftLabel one_hot(std::size_t num_classes, std::size_t label);

  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t k) const { return probs_[k]; }
  bool operator==(const SoftLabel&) const = default;

 private:
  std::vector<double> probs_;
};

/// λ·a + (1−λ)·b.
SoftLabel mix_labels(const SoftLabel& a, const SoftLabel& b, double lambda);

double sample_lambda(const MixPolicy& policy, Rng& rng);

using MixPair = std::pair<std::size_t, std::size_t>;

/// Pairs position i with perm(i) for a uniformly random permutation of
/// [0, m). Fixed points pair a sample with itself.
std::vector<MixPair> pair_within_batch(std::size_t m, Rng& rng);

struct MixedSample {
  Tensor input;
  SoftLabel label;
};

/// Interpolates two equally padded word matrices row by row.
MixedSample word_mixup(const Tensor& words_i, const Tensor& words_j, const SoftLabel& y_i, const SoftLabel& y_j,
                       double lambda);

/// Interpolates two sentence embeddings dimension by dimension.
MixedSample sen_mixup(const Tensor& enc_i, const Tensor& enc_j, const SoftLabel& y_i, const SoftLabel& y_j,
                      double lambda);

/// Mixing plan for one mini-batch: the pairs, their λ and the resulting
/// soft targets. Inputs are mixed later, at the word or sentence level.
struct MixedBatch {
  std::vector<MixPair> pairs;
  std::vector<double> lambdas;
  std::vector<SoftLabel> targets;

  std::vector<std::size_t> partners() const;
  /// Row-major [m×c] target matrix.
  std::vector<double> flat_targets() const;
};

/// Draws pairs and λ for a batch with hard labels `labels`.
MixedBatch plan_mixed_batch(std::span<const std::size_t> labels, std::size_t num_classes, const MixPolicy& policy,
                            Rng& rng);

/// Builds a plan from given pairs and λ (used to force endpoints).
MixedBatch make_mixed_batch(std::span<const std::size_t> labels, std::size_t num_classes, std::vector<MixPair> pairs,
                            std::vector<double> lambdas);

/// `step,i,j,lambda` audit trail of every mixed pair.
class MixLog {
 public:
  explicit MixLog(const std::filesystem::path& path);
  void record(std::size_t step, const MixedBatch& batch, std::span<const std::size_t> source_ids);

 private:
  std::ofstream out_;
};

}  // namespace mixsent

#endif  // MIXSENT_MIXUP_HPP
