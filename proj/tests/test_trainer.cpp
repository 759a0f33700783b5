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
#include "mixsent/errors.hpp"
#include "mixsent/synthetic.hpp"
#include "mixsent/trainer.hpp"

using namespace mixsent;

namespace {

Dataset small_corpus(std::size_t train = 120, std::uint64_t seed = 3) {
  SyntheticCorpusSpec s;
  s.train_size = train;
  s.test_size = 60;
  s.filler_words = 200;
  s.seed = seed;
  return make_synthetic_dataset(s);
}

TrainConfig tiny(Method method) {
  TrainConfig c;
  c.method = method;
  c.embedding_dim = 8;
  c.feature_maps = 4;
  c.hidden_dim = 6;
  c.batch_size = 10;
  c.steps = 40;
  c.eval_every = 10;
  c.runs = 1;
  c.seed = 11;
  return c;
}

std::vector<double> snapshot(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  auto w = Tensor::vector({1.0, -2.0}, true);
  std::vector<OptimParam> params{{"w", w}};
  AdamState state;
  w.mutable_grad();  // zeros
  adam_step(params, state, 1e-3);
  CHECK(snapshot(w) == std::vector<double>{1.0, -2.0});
  CHECK(state.first[0] == std::vector<double>{0.0, 0.0});

  w.mutable_grad()[0] = 1.0;
  adam_step(params, state, 1e-3);
  const double m_before = state.first[0][0];
  const double v_before = state.second[0][0];
  w.zero_grad();
  w.mutable_grad();
  adam_step(params, state, 1e-3);
  CHECK(std::abs(state.first[0][0]) < std::abs(m_before));
  CHECK(std::abs(state.second[0][0]) < std::abs(v_before));
}

TEST_CASE("adam: first step moves each entry by about lr against the gradient sign") {
  auto w = Tensor::vector({0.5, 0.5, 0.5}, true);
  std::vector<OptimParam> params{{"w", w}};
  AdamState state;
  auto g = w.mutable_grad();
  g[0] = 3.0;
  g[1] = -0.02;
  g[2] = 1e-3;
  adam_step(params, state, 1e-3);
  CHECK(w[0] == doctest::Approx(0.5 - 1e-3).epsilon(1e-8));
  CHECK(w[1] == doctest::Approx(0.5 + 1e-3).epsilon(1e-8));
  CHECK(w[2] == doctest::Approx(0.5 - 1e-3).epsilon(1e-6));
}

TEST_CASE("adam: two steps match a scalar reference trace bitwise") {
  const std::vector<double> g{0.3, -1.7, 0.0, 2.5e-4};
  const std::vector<double> w0{0.1, 0.2, 0.3, 0.4};
  auto w = Tensor::vector(w0, true);
  std::vector<OptimParam> params{{"w", w}};
  AdamState state;
  for (int s = 0; s < 2; ++s) {
    auto grad = w.mutable_grad();
    std::copy(g.begin(), g.end(), grad.begin());
    adam_step(params, state, 1e-3);
    w.zero_grad();
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    double theta = w0[i], m = 0.0, v = 0.0;
    for (int t = 1; t <= 2; ++t) {
      m = 0.9 * m + (1.0 - 0.9) * g[i];
      v = 0.999 * v + (1.0 - 0.999) * g[i] * g[i];
      const double mh = m / (1.0 - std::pow(0.9, t));
      const double vh = v / (1.0 - std::pow(0.999, t));
      theta -= 1e-3 * mh / (std::sqrt(vh) + 1e-8);
    }
    CHECK(w[i] == theta);
  }
}

TEST_CASE("adam: NaN gradient aborts with the parameter name and step") {
  auto w = Tensor::vector({1.0}, true);
  std::vector<OptimParam> params{{"classifier.weight", w}};
  AdamState state;
  w.mutable_grad()[0] = std::nan("");
  try {
    adam_step(params, state, 1e-3);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("classifier.weight") != std::string::npos);
    CHECK(msg.find("step 1") != std::string::npos);
  }
}

TEST_CASE("adam: frozen rows and frozen tensors are skipped") {
  auto table = Tensor::matrix({{0, 0}, {1, 1}}, true);
  auto frozen = Tensor::vector({5.0}, false);
  std::vector<OptimParam> params{{"embedding", table, 1}, {"f", frozen}};
  AdamState state;
  for (auto& g : table.mutable_grad()) g = 1.0;
  adam_step(params, state, 0.1);
  CHECK(table.at(0, 0) == 0.0);
  CHECK(table.at(0, 1) == 0.0);
  CHECK(table.at(1, 0) < 1.0);
  CHECK(frozen[0] == 5.0);
}

TEST_CASE("config defaults and validation") {
  TrainConfig base;
  CHECK(base.effective_dropout() == 0.5);
  CHECK(base.effective_l2() == 0.2);
  CHECK(base.batch_size == 50);
  CHECK(base.steps == 20000);
  CHECK(base.runs == 10);
  TrainConfig mix;
  mix.method = Method::kWordMixup;
  CHECK(mix.effective_dropout() == 0.0);
  CHECK(mix.effective_l2() == 0.0);
  CHECK(mix.alpha == 1.0);
  CHECK_NOTHROW(mix.validate());
  mix.dropout = 0.5;
  CHECK_THROWS_AS(mix.validate(), ConfigError);
  mix.dropout.reset();
  mix.l2 = 0.1;
  CHECK_THROWS_AS(mix.validate(), ConfigError);
  TrainConfig pre;
  pre.regime = EmbeddingRegime::kPretrainTune;
  CHECK_THROWS_AS(pre.validate(), ConfigError);

  Dataset ds = small_corpus();
  TrainConfig bad = tiny(Method::kSenMixup);
  bad.dropout = 0.3;
  CHECK_THROWS_AS(Trainer(bad, ds, make_split(ds, 0, 10, 0.1, 0)), ConfigError);
}

TEST_CASE("steps = 0 evaluates the untrained model") {
  Dataset ds = small_corpus();
  auto split = make_split(ds, 0, 10, 0.1, 0);
  TrainConfig c = tiny(Method::kBaseline);
  c.steps = 0;
  Trainer trainer(c, ds, split);
  auto r = trainer.run();
  CHECK(r.curve_steps.empty());
  CHECK(r.train_ce.empty());
  CHECK(r.step_losses.empty());
  CHECK(r.test_accuracy == evaluate(trainer.model(), split.test).accuracy);
}

TEST_CASE("evaluate: zero classifier weights and uniform predictions") {
  std::vector<RawExample> raw;
  for (int i = 0; i < 10; ++i) raw.push_back({static_cast<std::size_t>(i % 2), "w" + std::to_string(i) + " x y", Origin::kSentence});
  Dataset ds = build_dataset("balanced", 2, raw, {}, {}, true);
  Rng rng(1);
  ModelConfig mc;
  mc.vocab_size = ds.vocab.size();
  mc.embedding_dim = 4;
  mc.feature_maps = 3;
  Model model(mc, random_embedding(ds.vocab.size(), 4, true, rng), rng);
  for (auto& w : const_cast<Tensor&>(model.classifier().weight).mutable_data()) w = 0.0;
  auto r = evaluate(model, ds.train);
  CHECK(r.accuracy == 0.5);
  CHECK(r.cross_entropy == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  std::vector<RawExample> five;
  for (int i = 0; i < 10; ++i) five.push_back({static_cast<std::size_t>(i % 5), "a b", Origin::kSentence});
  Dataset ds5 = build_dataset("five", 5, five, {}, {}, true);
  mc.vocab_size = ds5.vocab.size();
  mc.num_classes = 5;
  Model m5(mc, random_embedding(ds5.vocab.size(), 4, true, rng), rng);
  for (auto& w : const_cast<Tensor&>(m5.classifier().weight).mutable_data()) w = 0.0;
  CHECK(evaluate(m5, ds5.train).cross_entropy == doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("a single example is memorized") {
  Dataset ds = build_dataset("one", 2, {{1, "only one sentence here", Origin::kSentence}}, {}, {}, true);
  SplitView split{ds.train, ds.train, ds.train};
  TrainConfig c = tiny(Method::kBaseline);
  c.dropout = 0.0;
  c.l2 = 0.0;
  c.learning_rate = 1e-2;
  c.steps = 50;
  auto r = train_run(c, ds, split);
  CHECK(r.test_accuracy == 1.0);
  CHECK(r.step_losses.back() < 0.05);
}

TEST_CASE("curves have one point per eval interval") {
  Dataset ds = small_corpus();
  TrainConfig c = tiny(Method::kWordMixup);
  c.steps = 35;
  auto r = train_run(c, ds, make_split(ds, 0, 10, 0.1, 0));
  CHECK(r.curve_steps == std::vector<std::size_t>{10, 20, 30});
  CHECK(r.train_ce.size() == 3);
  CHECK(r.test_ce_curve.size() == 3);
  CHECK(r.dev_accuracy.size() == 3);
  CHECK(r.step_losses.size() == 35);
  CHECK(r.test_accuracy >= 0.0);
  CHECK(r.test_accuracy <= 1.0);
}

TEST_CASE("regularizers are never used by the mixup methods") {
  Dataset ds = small_corpus();
  auto split = make_split(ds, 0, 10, 0.1, 0);
  for (Method m : {Method::kWordMixup, Method::kSenMixup}) {
    auto r = train_run(tiny(m), ds, split);
    CHECK(r.counters.dropout_masks == 0);
    CHECK(r.counters.l2_terms == 0);
    CHECK(r.counters.mixed_batches == 40);
  }
  auto b = train_run(tiny(Method::kBaseline), ds, split);
  CHECK(b.counters.dropout_masks == 40);
  CHECK(b.counters.l2_terms == 40);
  CHECK(b.counters.mixed_batches == 0);
}

TEST_CASE("frozen regimes leave the table bitwise unchanged") {
  Dataset ds = small_corpus();
  auto split = make_split(ds, 0, 10, 0.1, 0);
  TrainConfig c = tiny(Method::kSenMixup);
  c.regime = EmbeddingRegime::kRandomFix;
  c.steps = 100;
  Trainer before(c, ds, split);
  const auto initial = snapshot(before.model().embedding().table);
  Trainer t(c, ds, split);
  t.run();
  CHECK(snapshot(t.model().embedding().table) == initial);

  Rng rng(2);
  EmbeddingTable pre = random_embedding(ds.vocab.size(), 8, false, rng);
  pre.init = EmbeddingInit::kPretrained;
  c.regime = EmbeddingRegime::kPretrainFix;
  c.pretrained_path = "in-memory";
  TrainOptions opts;
  opts.pretrained = &pre;
  Trainer tp(c, ds, split, opts);
  tp.run();
  CHECK(snapshot(tp.model().embedding().table) == snapshot(pre.table));

  c.regime = EmbeddingRegime::kPretrainTune;
  Trainer tt(c, ds, split, opts);
  tt.run();
  CHECK(snapshot(tt.model().embedding().table) != snapshot(pre.table));
  CHECK(snapshot(pre.table) == snapshot(tp.model().embedding().table));  // source table untouched
  CHECK_THROWS_AS(Trainer(c, ds, split), ConfigError);
}

TEST_CASE("padding row stays zero under a tuned table") {
  Dataset ds = small_corpus();
  TrainConfig c = tiny(Method::kWordMixup);
  c.steps = 60;
  Trainer t(c, ds, make_split(ds, 0, 10, 0.1, 0));
  t.run();
  const auto& table = t.model().embedding().table;
  for (std::size_t j = 0; j < table.dim(1); ++j) CHECK(table.at(0, j) == 0.0);
}

TEST_CASE("forced lambda = 1 with identity pairing reproduces the plain run") {
  Dataset ds = small_corpus();
  auto split = make_split(ds, 0, 10, 0.1, 0);
  for (EncoderKind enc : {EncoderKind::kCnn, EncoderKind::kLstm}) {
    TrainConfig plain = tiny(Method::kBaseline);
    plain.encoder = enc;
    plain.dropout = 0.0;
    plain.l2 = 0.0;
    TrainConfig mixed = plain;
    mixed.method = Method::kWordMixup;
    mixed.dropout.reset();
    mixed.l2.reset();
    TrainOptions opts;
    opts.hooks.forced_lambda = 1.0;
    opts.hooks.identity_pairing = true;
    auto a = train_run(plain, ds, split);
    auto b = train_run(mixed, ds, split, opts);
    CHECK(a.step_losses == b.step_losses);
    mixed.method = Method::kSenMixup;
    auto s = train_run(mixed, ds, split, opts);
    CHECK(a.step_losses == s.step_losses);
  }
}

TEST_CASE("runs are reproducible from the seed") {
  Dataset ds = small_corpus();
  auto split = make_split(ds, 0, 10, 0.1, 0);
  for (Method m : {Method::kBaseline, Method::kWordMixup, Method::kSenMixup}) {
    TrainConfig c = tiny(m);
    c.encoder = m == Method::kSenMixup ? EncoderKind::kLstm : EncoderKind::kCnn;
    auto a = train_run(c, ds, split);
    auto b = train_run(c, ds, split);
    CHECK(a.step_losses == b.step_losses);
    CHECK(a.test_ce_curve == b.test_ce_curve);
    CHECK(a.test_accuracy == b.test_accuracy);
    c.seed += 1;
    auto other = train_run(c, ds, split);
    CHECK(other.step_losses != a.step_losses);
  }
}

TEST_CASE("mean and sample deviation") {
  std::vector<double> v{0.8, 0.9, 1.0};
  auto [mean, sd] = mean_std(v);
  CHECK(mean == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(sd == doctest::Approx(0.1).epsilon(1e-12));
  std::vector<double> one{0.7};
  CHECK(mean_std(one).second == 0.0);
}

TEST_CASE("repeated runs") {
  Dataset ds = small_corpus();
  TrainConfig c = tiny(Method::kSenMixup);
  c.steps = 20;
  c.runs = 1;
  auto single = repeated_runs(c, ds);
  CHECK(single.stddev == 0.0);
  CHECK(single.results.size() == 1);

  c.runs = 3;
  std::vector<std::uint64_t> seeds;
  auto a = repeated_runs(c, ds, [&](const RunResult& r) { seeds.push_back(r.seed); });
  auto b = repeated_runs(c, ds);
  CHECK(seeds == std::vector<std::uint64_t>{11, 12, 13});
  CHECK(a.run_accuracies == b.run_accuracies);
  CHECK(a.mean == doctest::Approx(mean_std(a.run_accuracies).first));
}

TEST_CASE("repeated runs over CV folds") {
  SyntheticCorpusSpec s;
  s.train_size = 60;
  s.test_size = 0;
  s.filler_words = 100;
  Dataset ds = make_synthetic_dataset(s);
  REQUIRE(ds.cross_validation);
  TrainConfig c = tiny(Method::kWordMixup);
  c.steps = 10;
  c.runs = 2;
  c.folds = 10;
  c.max_folds = 3;
  auto agg = repeated_runs(c, ds);
  CHECK(agg.results.size() == 6);
  CHECK(agg.run_accuracies.size() == 2);
  double fold_mean = 0.0;
  for (std::size_t f = 0; f < 3; ++f) fold_mean += agg.results[f].test_accuracy;
  CHECK(agg.run_accuracies[0] == doctest::Approx(fold_mean / 3.0));
  CHECK(agg.results[2].fold == 2);
}

TEST_CASE("repeated runs surface errors after persisting finished runs") {
  Dataset ds = small_corpus();
  TrainConfig c = tiny(Method::kBaseline);
  c.steps = 5;
  c.runs = 3;
  std::size_t persisted = 0;
  CHECK_THROWS_AS(repeated_runs(c, ds,
                                [&](const RunResult&) {
                                  if (++persisted == 2) throw IoError("disk full");
                                }),
                  IoError);
  CHECK(persisted == 2);
}
