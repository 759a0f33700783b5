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

#include "mixsent/encoders.hpp"

#include <algorithm>
#include <cmath>

#include "mixsent/errors.hpp"

namespace mixsent {

namespace {

Tensor glorot(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> v(shape_size(shape));
  for (auto& x : v) x = rng.uniform(-limit, limit);
  return Tensor::from(std::move(shape), std::move(v), true);
}

}  // namespace

EncoderKind parse_encoder(const std::string& name) {
  if (name == "cnn" || name == "CNN") return EncoderKind::kCnn;
  if (name == "lstm" || name == "LSTM") return EncoderKind::kLstm;
  throw ConfigError("unknown encoder '" + name + "'");
}

std::string encoder_name(EncoderKind kind) { return kind == EncoderKind::kCnn ? "cnn" : "lstm"; }

CnnEncoder CnnEncoder::init(std::size_t input_dim, std::vector<std::size_t> filter_sizes, std::size_t feature_maps,
                            Rng& rng) {
  if (filter_sizes.empty() || feature_maps == 0) throw ConfigError("CNN needs filter sizes and feature maps");
  CnnEncoder enc;
  enc.filter_sizes = std::move(filter_sizes);
  enc.feature_maps = feature_maps;
  for (auto h : enc.filter_sizes) {
    if (h == 0) throw ConfigError("filter height must be positive");
    enc.filters.push_back(glorot({h, input_dim, feature_maps}, h * input_dim, feature_maps, rng));
    enc.biases.push_back(Tensor::zeros({feature_maps}, true));
  }
  return enc;
}

std::size_t CnnEncoder::widest_filter() const {
  return *std::max_element(filter_sizes.begin(), filter_sizes.end());
}

LstmEncoder LstmEncoder::init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
  LstmEncoder enc;
  enc.weights.w_input = glorot({input_dim, 4 * hidden_dim}, input_dim, hidden_dim, rng);
  enc.weights.w_hidden = glorot({hidden_dim, 4 * hidden_dim}, hidden_dim, hidden_dim, rng);
  std::vector<double> bias(4 * hidden_dim, 0.0);
  // forget gate starts open
  std::fill(bias.begin() + static_cast<std::ptrdiff_t>(hidden_dim),
            bias.begin() + static_cast<std::ptrdiff_t>(2 * hidden_dim), 1.0);
  enc.weights.bias = Tensor::vector(std::move(bias), true);
  return enc;
}

Classifier Classifier::init(std::size_t input_dim, std::size_t num_classes, Rng& rng) {
  return {glorot({input_dim, num_classes}, input_dim, num_classes, rng), Tensor::zeros({num_classes}, true)};
}

Tensor embed_sequence(std::span<const std::size_t> ids, const EmbeddingTable& table) {
  return embedding_lookup(table.table, ids, true);
}

Tensor encode_cnn(const Tensor& words, const CnnEncoder& params, double dropout_rate, Rng* rng) {
  if (words.rank() != 2) throw DimensionError("encode_cnn expects [L×d], got " + shape_str(words.shape()));
  if (words.dim(0) < params.widest_filter()) {
    throw ContractError("encode_cnn: padded length " + std::to_string(words.dim(0)) +
                        " is shorter than the widest filter " + std::to_string(params.widest_filter()));
  }
  std::vector<Tensor> pooled;
  pooled.reserve(params.filters.size());
  for (std::size_t k = 0; k < params.filters.size(); ++k) {
    pooled.push_back(conv1d_maxpool(words, params.filters[k], params.biases[k], params.activation));
  }
  Tensor out = concat(pooled);
  if (dropout_rate > 0.0 && rng) out = dropout(out, dropout_rate, *rng);
  return out;
}

Tensor encode_lstm_batch(const std::vector<Tensor>& words, const LstmEncoder& params) {
  if (words.empty()) throw DimensionError("encode_lstm_batch of nothing");
  const std::size_t m = words.size(), hd = params.output_dim();
  const std::size_t len = words.front().dim(0);
  LstmState state{Tensor::zeros({m, hd}), Tensor::zeros({m, hd})};
  for (std::size_t t = 0; t < len; ++t) {
    state = lstm_step(gather_row(words, t), state.h, state.c, params.weights);
  }
  return state.h;
}

Tensor encode_lstm(const Tensor& words, const LstmEncoder& params, double dropout_rate, Rng* rng) {
  if (words.rank() != 2) throw DimensionError("encode_lstm expects [L×d], got " + shape_str(words.shape()));
  Tensor out = reshape(encode_lstm_batch({words}, params), {params.output_dim()});
  if (dropout_rate > 0.0 && rng) out = dropout(out, dropout_rate, *rng);
  return out;
}

Tensor classify(const Tensor& embedding, const Classifier& params) {
  return affine(embedding, params.weight, params.bias);
}

std::size_t predict(std::span<const double> logits) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < logits.size(); ++k)
    if (logits[k] > logits[best]) best = k;
  return best;
}

Model::Model(ModelConfig config, EmbeddingTable embedding, Rng& rng)
    : config_(std::move(config)), embedding_(std::move(embedding)) {
  if (embedding_.dim != config_.embedding_dim) {
    throw ConfigError("embedding table has d=" + std::to_string(embedding_.dim) + " but the model expects d=" +
                      std::to_string(config_.embedding_dim));
  }
  if (config_.num_classes < 2) throw ConfigError("need at least two classes");
  if (config_.encoder == EncoderKind::kCnn) {
    cnn_ = CnnEncoder::init(config_.embedding_dim, config_.filter_sizes, config_.feature_maps, rng);
  } else {
    lstm_ = LstmEncoder::init(config_.embedding_dim, config_.hidden_dim, rng);
  }
  classifier_ = Classifier::init(encoding_dim(), config_.num_classes, rng);
}

std::size_t Model::encoding_dim() const {
  return config_.encoder == EncoderKind::kCnn ? cnn_.output_dim() : lstm_.output_dim();
}

std::vector<NamedParam> Model::parameters() const {
  std::vector<NamedParam> out;
  out.push_back({"embedding", embedding_.table});
  if (config_.encoder == EncoderKind::kCnn) {
    for (std::size_t k = 0; k < cnn_.filters.size(); ++k) {
      const std::string h = std::to_string(cnn_.filter_sizes[k]);
      out.push_back({"cnn.filter" + h, cnn_.filters[k]});
      out.push_back({"cnn.bias" + h, cnn_.biases[k]});
    }
  } else {
    out.push_back({"lstm.w_input", lstm_.weights.w_input});
    out.push_back({"lstm.w_hidden", lstm_.weights.w_hidden});
    out.push_back({"lstm.bias", lstm_.weights.bias});
  }
  out.push_back({"classifier.weight", classifier_.weight});
  out.push_back({"classifier.bias", classifier_.bias});
  return out;
}

Tensor Model::encode_batch(const std::vector<Tensor>& words) const {
  if (config_.encoder == EncoderKind::kLstm) return encode_lstm_batch(words, lstm_);
  std::vector<Tensor> rows;
  rows.reserve(words.size());
  for (const auto& w : words) rows.push_back(encode_cnn(w, cnn_));
  return stack_rows(rows);
}

}  // namespace mixsent
