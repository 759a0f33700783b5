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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "mixsent/errors.hpp"
#include "mixsent/mixup.hpp"
#include "mixsent/ops.hpp"

using namespace mixsent;

namespace {

Tensor random_matrix(std::size_t r, std::size_t c, Rng& rng, bool grad = false) {
  std::vector<double> v(r * c);
  for (auto& x : v) x = rng.uniform(-2, 2);
  return Tensor::from({r, c}, v, grad);
}

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

// One-sample Kolmogorov–Smirnov statistic against U(0,1).
double ks_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - xs[i]));
    d = std::max(d, std::abs(xs[i] - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace

TEST_CASE("alpha = 1 draws are uniform") {
  Rng rng(2024);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = sample_lambda({1.0}, rng);
  double mean = 0.0;
  for (double x : xs) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    mean += x;
  }
  mean /= 10000.0;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= 9999.0;
  CHECK(std::abs(mean - 0.5) <= 0.02);
  CHECK(std::abs(var - 1.0 / 12.0) <= 0.01);
  CHECK(ks_uniform(xs) < 0.02);
}

TEST_CASE("small alpha concentrates mass near the endpoints") {
  Rng a(1), b(1);
  int mid_small = 0, mid_uniform = 0;
  for (int i = 0; i < 10000; ++i) {
    const double s = sample_lambda({0.2}, a);
    const double u = sample_lambda({1.0}, b);
    mid_small += s >= 0.4 && s <= 0.6;
    mid_uniform += u >= 0.4 && u <= 0.6;
  }
  CHECK(mid_small < mid_uniform);
}

TEST_CASE("non-positive alpha is a configuration error") {
  Rng rng(0);
  CHECK_THROWS_AS(sample_lambda({0.0}, rng), ConfigError);
  CHECK_THROWS_AS(sample_lambda({-1.0}, rng), ConfigError);
}

TEST_CASE("pair_within_batch") {
  Rng rng(5);
  auto one = pair_within_batch(1, rng);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == MixPair{0, 0});

  Rng r1(77), r2(77);
  CHECK(pair_within_batch(50, r1) == pair_within_batch(50, r2));

  auto pairs = pair_within_batch(50, rng);
  std::vector<int> hits(50, 0);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(pairs[i].first == i);
    ++hits[pairs[i].second];
  }
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("pairing is uniform over partners") {
  Rng rng(31);
  const int trials = 10000;
  std::vector<std::vector<int>> counts(5, std::vector<int>(5, 0));
  for (int t = 0; t < trials; ++t)
    for (auto [i, j] : pair_within_batch(5, rng)) ++counts[i][j];
  for (const auto& row : counts)
    for (int c : row) CHECK(std::abs(static_cast<double>(c) / trials - 0.2) <= 0.02);
}

TEST_CASE("word_mixup examples") {
  auto bi = Tensor::matrix({{1, 0}});
  auto bj = Tensor::matrix({{0, 1}});
  auto yi = SoftLabel::one_hot(2, 0);
  auto yj = SoftLabel::one_hot(2, 1);
  auto one = word_mixup(bi, bj, yi, yj, 1.0);
  CHECK(values(one.input) == values(bi));
  CHECK(one.label == yi);
  auto zero = word_mixup(bi, bj, yi, yj, 0.0);
  CHECK(values(zero.input) == values(bj));
  CHECK(zero.label == yj);
  auto mid = word_mixup(bi, bj, yi, yj, 0.5);
  CHECK(values(mid.input) == std::vector<double>{0.5, 0.5});
  CHECK(mid.label == SoftLabel({0.5, 0.5}));
  CHECK_THROWS_AS(word_mixup(bi, Tensor::matrix({{0, 1}, {1, 1}}), yi, yj, 0.5), ContractError);
}

TEST_CASE("sen_mixup examples") {
  auto ei = Tensor::vector({2, 0});
  auto ej = Tensor::vector({0, 2});
  auto yi = SoftLabel::one_hot(3, 0);
  auto yj = SoftLabel::one_hot(3, 2);
  auto one = sen_mixup(ei, ej, yi, yj, 1.0);
  CHECK(values(one.input) == values(ei));
  CHECK(one.label == yi);
  for (double lam : {0.0, 0.3, 0.9}) CHECK(values(sen_mixup(ei, ei, yi, yj, lam).input) == values(ei));
  auto q = sen_mixup(ei, ej, yi, yj, 0.25);
  CHECK(values(q.input) == std::vector<double>{0.5, 1.5});
  CHECK_THROWS_AS(sen_mixup(ei, Tensor::vector({1, 2, 3}), yi, yj, 0.5), DimensionError);
}

TEST_CASE("gradients reach both sources scaled by lambda and 1 - lambda") {
  auto bi = Tensor::matrix({{1, 2}, {3, 4}}, true);
  auto bj = Tensor::matrix({{5, 6}, {7, 8}}, true);
  auto mixed = word_mixup(bi, bj, SoftLabel::one_hot(2, 0), SoftLabel::one_hot(2, 1), 0.3);
  backward(sum(mixed.input));
  for (double g : bi.grad()) CHECK(g == doctest::Approx(0.3));
  for (double g : bj.grad()) CHECK(g == doctest::Approx(0.7));
}

TEST_CASE("mixing algebra on random instances") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t len = 1 + rng.index(6), d = 1 + rng.index(5), c = 2 + rng.index(4);
    auto bi = random_matrix(len, d, rng);
    auto bj = random_matrix(len, d, rng);
    auto yi = SoftLabel::one_hot(c, rng.index(c));
    auto yj = SoftLabel::one_hot(c, rng.index(c));
    const double lam = rng.uniform();

    auto m = word_mixup(bi, bj, yi, yj, lam);
    auto sym = word_mixup(bj, bi, yj, yi, 1.0 - lam);
    for (std::size_t k = 0; k < m.input.size(); ++k) {
      CHECK(m.input[k] >= std::min(bi[k], bj[k]) - 1e-15);
      CHECK(m.input[k] <= std::max(bi[k], bj[k]) + 1e-15);
      CHECK(std::abs(m.input[k] - sym.input[k]) <= 1e-15);
    }
    for (std::size_t k = 0; k < c; ++k) CHECK(std::abs(m.label[k] - sym.label[k]) <= 1e-15);
    std::size_t nonzero = 0;
    for (std::size_t k = 0; k < c; ++k) nonzero += m.label[k] != 0.0;
    CHECK(nonzero <= 2);

    std::vector<double> z(c);
    for (auto& v : z) v = rng.uniform(-3, 3);
    auto logits = Tensor::vector(z);
    const double mixed = softmax_cross_entropy_soft(logits, m.label.probs()).item();
    const double split = lam * softmax_cross_entropy_soft(logits, yi.probs()).item() +
                         (1 - lam) * softmax_cross_entropy_soft(logits, yj.probs()).item();
    CHECK(std::abs(mixed - split) <= 1e-12);

    // A fixed linear encoder commutes with mixing.
    auto b = Tensor::vector({0.1, -0.2, 0.3});
    auto wide = random_matrix(len * d, 3, rng);
    auto f = [&](const Tensor& words) { return affine(reshape(words, {len * d}), wide, b); };
    auto via_sen = sen_mixup(f(bi), f(bj), yi, yj, lam);
    auto via_word = f(m.input);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(via_sen.input[k] - via_word[k]) <= 1e-10);
  }
}

TEST_CASE("mixed batch bookkeeping") {
  Rng rng(4);
  std::vector<std::size_t> labels{0, 1, 2, 1};
  auto batch = plan_mixed_batch(labels, 3, {1.0}, rng);
  REQUIRE(batch.pairs.size() == 4);
  REQUIRE(batch.lambdas.size() == 4);
  for (std::size_t p = 0; p < 4; ++p) {
    const auto [i, j] = batch.pairs[p];
    auto expect = mix_labels(SoftLabel::one_hot(3, labels[i]), SoftLabel::one_hot(3, labels[j]), batch.lambdas[p]);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(batch.targets[p][k] - expect[k]) <= 1e-12);
  }
  CHECK(batch.flat_targets().size() == 12);
  CHECK_THROWS_AS(make_mixed_batch(labels, 3, {{0, 0}}, {0.5}), DimensionError);
  CHECK_THROWS_AS(make_mixed_batch(labels, 3, {{0, 0}, {1, 1}, {2, 2}, {3, 3}}, {0.5, 0.5, 1.5, 0.5}), ContractError);
}

TEST_CASE("mix log writes step,i,j,lambda rows") {
  auto path = std::filesystem::temp_directory_path() / "mixsent_mixlog_test.csv";
  {
    MixLog log(path);
    std::vector<std::size_t> labels{0, 1};
    auto batch = make_mixed_batch(labels, 2, {{0, 1}, {1, 0}}, {0.25, 0.75});
    std::vector<std::size_t> ids{10, 20};
    log.record(7, batch, ids);
  }
  std::ifstream in(path);
  std::string header, a, b;
  std::getline(in, header);
  std::getline(in, a);
  std::getline(in, b);
  CHECK(header == "step,i,j,lambda");
  CHECK(a == "7,10,20,0.25");
  CHECK(b == "7,20,10,0.75");
  std::filesystem::remove(path);
}
