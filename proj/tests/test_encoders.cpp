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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "mixsent/encoders.hpp"
#include "mixsent/errors.hpp"
#include "mixsent/grad_check.hpp"

using namespace mixsent;

namespace {

EmbeddingTable table_from(std::vector<std::vector<double>> rows, bool trainable = true) {
  EmbeddingTable t;
  t.table = Tensor::matrix(rows, trainable);
  t.dim = rows.front().size();
  t.trainable = trainable;
  return t;
}

Tensor random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  std::vector<double> v(r * c);
  for (auto& x : v) x = rng.uniform(-1, 1);
  return Tensor::from({r, c}, v);
}

double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TEST_CASE("embed_sequence examples") {
  auto t = table_from({{0, 0}, {0.5, 0.5}, {1, -2}});
  std::vector<std::size_t> pad{0, 0};
  auto b = embed_sequence(pad, t);
  for (double v : b.data()) CHECK(v == 0.0);
  std::vector<std::size_t> one{2};
  auto r = embed_sequence(one, t);
  CHECK(r.shape() == Shape{1, 2});
  CHECK(r.at(0, 0) == 1.0);
  CHECK(r.at(0, 1) == -2.0);
  std::vector<std::size_t> bad{3};
  CHECK_THROWS_AS(embed_sequence(bad, t), std::out_of_range);
}

TEST_CASE("encode_cnn matches a scalar reference") {
  // d=2, L=5, one map per height 3/4/5 with hand-set weights.
  Rng rng(0);
  CnnEncoder enc = CnnEncoder::init(2, {3, 4, 5}, 1, rng);
  for (std::size_t k = 0; k < 3; ++k) {
    auto w = enc.filters[k].mutable_data();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.1 * static_cast<double>(i + 1) * (k % 2 ? -1 : 1);
    enc.biases[k].mutable_data()[0] = 0.05 * static_cast<double>(k);
  }
  const std::vector<std::vector<double>> rows{{1, 0}, {0.5, -1}, {0, 2}, {-1, 1}, {0.3, 0.3}};
  auto b = Tensor::matrix(rows);
  auto out = encode_cnn(b, enc);
  REQUIRE(out.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t h = enc.filter_sizes[k];
    double best = -1e300;
    for (std::size_t t = 0; t + h <= 5; ++t) {
      double acc = 0.05 * static_cast<double>(k);
      for (std::size_t u = 0; u < h; ++u)
        for (std::size_t v = 0; v < 2; ++v) acc += rows[t + u][v] * 0.1 * static_cast<double>(u * 2 + v + 1) * (k % 2 ? -1 : 1);
      best = std::max(best, std::tanh(acc));
    }
    CHECK(out[k] == doctest::Approx(best).epsilon(1e-14));
  }
}

TEST_CASE("encode_cnn contracts") {
  Rng rng(1);
  CnnEncoder enc = CnnEncoder::init(4, {3, 4, 5}, 100, rng);
  for (std::size_t len : {5u, 9u, 20u}) CHECK(encode_cnn(random_matrix(len, 4, rng), enc).size() == 300);
  auto zero = encode_cnn(Tensor::zeros({6, 4}), enc);
  for (double v : zero.data()) CHECK(v == 0.0);
  CHECK_THROWS_AS(encode_cnn(Tensor::zeros({4, 4}), enc), ContractError);

  auto b = random_matrix(7, 4, rng);
  Rng r1(5), r2(6);
  auto a = encode_cnn(b, enc, 0.0, &r1);
  auto c = encode_cnn(b, enc, 0.0, &r2);
  CHECK(std::equal(a.data().begin(), a.data().end(), c.data().begin()));
  auto dropped = encode_cnn(b, enc, 0.5, &r1);
  std::size_t zeros = 0;
  for (double v : dropped.data()) zeros += v == 0.0;
  CHECK(zeros > 100);
  CHECK(zeros < 200);
}

TEST_CASE("encode_lstm matches a step-by-step scalar reference") {
  Rng rng(2);
  const std::size_t d = 2, H = 3;
  LstmEncoder enc = LstmEncoder::init(d, H, rng);
  const std::vector<std::vector<double>> rows{{0.5, -1}, {1, 0.25}, {-0.75, 0.5}};
  auto out = encode_lstm(Tensor::matrix(rows), enc);
  std::vector<double> h(H, 0.0), c(H, 0.0);
  const auto& wx = enc.weights.w_input;
  const auto& wh = enc.weights.w_hidden;
  const auto& bb = enc.weights.bias;
  for (const auto& x : rows) {
    std::vector<double> hn(H), cn(H);
    for (std::size_t j = 0; j < H; ++j) {
      double z[4];
      for (int g = 0; g < 4; ++g) {
        z[g] = bb[g * H + j];
        for (std::size_t k = 0; k < d; ++k) z[g] += x[k] * wx.at(k, g * H + j);
        for (std::size_t k = 0; k < H; ++k) z[g] += h[k] * wh.at(k, g * H + j);
      }
      cn[j] = sig(z[1]) * c[j] + sig(z[0]) * std::tanh(z[2]);
      hn[j] = sig(z[3]) * std::tanh(cn[j]);
    }
    h = hn;
    c = cn;
  }
  REQUIRE(out.size() == H);
  for (std::size_t j = 0; j < H; ++j) CHECK(out[j] == doctest::Approx(h[j]).epsilon(1e-14));
}

TEST_CASE("encode_lstm base case and dimension contract") {
  Rng rng(3);
  LstmEncoder enc = LstmEncoder::init(4, 100, rng);
  auto row = random_matrix(1, 4, rng);
  auto single = lstm_step(reshape(row, {4}), Tensor::zeros({100}), Tensor::zeros({100}), enc.weights);
  auto viaenc = encode_lstm(row, enc);
  CHECK(std::equal(single.h.data().begin(), single.h.data().end(), viaenc.data().begin()));
  for (std::size_t len : {1u, 5u, 12u}) CHECK(encode_lstm(random_matrix(len, 4, rng), enc).size() == 100);

  LstmEncoder zero;
  zero.weights = {Tensor::zeros({4, 400}), Tensor::zeros({100, 400}), Tensor::zeros({400})};
  auto z = encode_lstm(Tensor::zeros({6, 4}), zero);
  for (double v : z.data()) CHECK(v == 0.0);
}

TEST_CASE("batched LSTM equals per-sentence LSTM") {
  Rng rng(4);
  LstmEncoder enc = LstmEncoder::init(3, 5, rng);
  std::vector<Tensor> ws{random_matrix(6, 3, rng), random_matrix(6, 3, rng), random_matrix(6, 3, rng)};
  auto batch = encode_lstm_batch(ws, enc);
  for (std::size_t p = 0; p < ws.size(); ++p) {
    auto one = encode_lstm(ws[p], enc);
    for (std::size_t j = 0; j < 5; ++j) CHECK(batch.at(p, j) == one[j]);
  }
}

TEST_CASE("classify examples") {
  Classifier clf{Tensor::zeros({3, 2}), Tensor::vector({1, 2})};
  auto logits = classify(Tensor::vector({0.3, -1, 2}), clf);
  CHECK(logits[0] == 1.0);
  CHECK(logits[1] == 2.0);
  CHECK(predict(logits.data()) == 1);
  Classifier rnd{Tensor::matrix({{1, -2}, {0.5, 3}}), Tensor::vector({0.25, -0.5})};
  auto zero = classify(Tensor::vector({0, 0}), rnd);
  CHECK(zero[0] == 0.25);
  CHECK(zero[1] == -0.5);
  auto hand = classify(Tensor::vector({2, -1}), rnd);
  CHECK(hand[0] == doctest::Approx(2 * 1 + -1 * 0.5 + 0.25));
  CHECK(hand[1] == doctest::Approx(2 * -2 + -1 * 3 - 0.5));
  std::vector<double> tie{0.5, 0.5, 0.1};
  CHECK(predict(tie) == 0);
  CHECK_THROWS_AS(classify(Tensor::vector({1, 2, 3, 4}), rnd), DimensionError);
}

TEST_CASE("CNN classifier gradient on a 2-example batch matches finite differences") {
  Rng rng(8);
  auto table = table_from({{0, 0, 0, 0}, {0.2, -0.1, 0.3, 0.05}, {-0.3, 0.2, 0.1, -0.2}, {0.15, 0.25, -0.05, 0.3},
                           {0.1, -0.3, 0.2, 0.1}});
  ModelConfig mc;
  mc.vocab_size = 5;
  mc.embedding_dim = 4;
  mc.feature_maps = 2;
  mc.num_classes = 3;
  Model model(mc, table, rng);
  std::vector<std::vector<std::size_t>> ids{{2, 3, 4, 1, 0, 0}, {4, 4, 2, 3, 1, 2}};
  std::vector<double> target{1, 0, 0, 0, 0.4, 0.6};
  auto loss = [&] {
    std::vector<Tensor> ws;
    for (const auto& s : ids) ws.push_back(model.embed(s));
    return softmax_cross_entropy_soft(model.logits(model.encode_batch(ws)), target);
  };
  std::vector<Tensor> params;
  for (const auto& p : model.parameters()) params.push_back(p.tensor);
  auto r = grad_check(loss, params, 1e-5, {4});
  INFO("param ", r.worst_param, " index ", r.worst_index, " err ", r.max_rel_error);
  CHECK(r.passed(1e-4));
  // padding row gradient stays masked
  backward(loss());
  auto g = model.embedding().table.grad();
  for (std::size_t j = 0; j < 4; ++j) CHECK(g[j] == 0.0);
}

TEST_CASE("model dimension contract") {
  Rng rng(9);
  ModelConfig cnn;
  cnn.vocab_size = 10;
  cnn.embedding_dim = 8;
  cnn.num_classes = 4;
  Model m(cnn, random_embedding(10, 8, true, rng), rng);
  CHECK(m.encoding_dim() == 300);
  ModelConfig lstm = cnn;
  lstm.encoder = EncoderKind::kLstm;
  Model l(lstm, random_embedding(10, 8, true, rng), rng);
  CHECK(l.encoding_dim() == 100);
  CHECK(l.classifier().weight.shape() == Shape{100, 4});
  CHECK_THROWS_AS(Model(cnn, random_embedding(10, 7, true, rng), rng), ConfigError);
}
