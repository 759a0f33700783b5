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

#ifndef MIXSENT_ENCODERS_HPP
#define MIXSENT_ENCODERS_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mixsent/embedding.hpp"
#include "mixsent/ops.hpp"
#include "mixsent/rng.hpp"
#include "mixsent/tensor.hpp"

namespace mixsent {

enum class EncoderKind { kCnn, kLstm };

EncoderKind parse_encoder(const std::string& name);
std::string encoder_name(EncoderKind kind);

/// Kim-style convolutional encoder: one filter bank per height, each with
/// `feature_maps` maps, max-pooled over time and concatenated.
struct CnnEncoder {
  std::vector<std::size_t> filter_sizes;
  std::size_t feature_maps = 0;
  std::vector<Tensor> filters;  // [h×d×F] per height
  std::vector<Tensor> biases;   // [F] per height
  Activation activation = Activation::kTanh;

  static CnnEncoder init(std::size_t input_dim, std::vector<std::size_t> filter_sizes, std::size_t feature_maps,
                         Rng& rng);
  std::size_t output_dim() const { return filter_sizes.size() * feature_maps; }
  std::size_t widest_filter() const;
};

/// Single-layer LSTM; the sentence embedding is the final hidden state.
struct LstmEncoder {
  LstmWeights weights;

  static LstmEncoder init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);
  std::size_t output_dim() const { return weights.hidden_dim(); }
};

/// Softmax-layer weights: logits = e·W + b.
struct Classifier {
  Tensor weight;  // [k×c]
  Tensor bias;    // [c]

  static Classifier init(std::size_t input_dim, std::size_t num_classes, Rng& rng);
  std::size_t num_classes() const { return bias.dim(0); }
};

/// Word matrix B with row t = table[ids[t]].
Tensor embed_sequence(std::span<const std::size_t> ids, const EmbeddingTable& table);

/// Concatenated max-pooled features; inverted dropout on the result when
/// `dropout_rate` > 0 and an RNG is supplied (training).
Tensor encode_cnn(const Tensor& words, const CnnEncoder& params, double dropout_rate = 0.0, Rng* rng = nullptr);

/// Final hidden state after reading all L rows of `words`.
Tensor encode_lstm(const Tensor& words, const LstmEncoder& params, double dropout_rate = 0.0, Rng* rng = nullptr);

/// Runs the LSTM over m equally long word matrices at once; returns [m×H].
Tensor encode_lstm_batch(const std::vector<Tensor>& words, const LstmEncoder& params);

Tensor classify(const Tensor& embedding, const Classifier& params);

/// argmax with the lowest index winning ties.
std::size_t predict(std::span<const double> logits);

struct ModelConfig {
  EncoderKind encoder = EncoderKind::kCnn;
  std::size_t vocab_size = 0;
  std::size_t embedding_dim = 300;
  std::size_t num_classes = 2;
  std::vector<std::size_t> filter_sizes{3, 4, 5};
  std::size_t feature_maps = 100;
  std::size_t hidden_dim = 100;
};

struct NamedParam {
  std::string name;
  Tensor tensor;
};

/// Embedding table, one encoder and the classifier head.
class Model {
 public:
  Model(ModelConfig config, EmbeddingTable embedding, Rng& rng);

  const ModelConfig& config() const { return config_; }
  const EmbeddingTable& embedding() const { return embedding_; }
  EmbeddingTable& embedding() { return embedding_; }
  const CnnEncoder& cnn() const { return cnn_; }
  const LstmEncoder& lstm() const { return lstm_; }
  const Classifier& classifier() const { return classifier_; }
  std::size_t encoding_dim() const;

  /// Every tensor in a fixed order, frozen ones included.
  std::vector<NamedParam> parameters() const;

  Tensor embed(std::span<const std::size_t> ids) const { return embed_sequence(ids, embedding_); }
  /// Sentence embeddings for a batch of word matrices, [m×k].
  Tensor encode_batch(const std::vector<Tensor>& words) const;
  Tensor logits(const Tensor& encodings) const { return classify(encodings, classifier_); }

 private:
  ModelConfig config_;
  EmbeddingTable embedding_;
  CnnEncoder cnn_;
  LstmEncoder lstm_;
  Classifier classifier_;
};

}  // namespace mixsent

#endif  // MIXSENT_ENCODERS_HPP
