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

#include "mixsent/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "mixsent/grad_check.hpp"
#include "mixsent/mixup.hpp"
#include "mixsent/ops.hpp"
#include "mixsent/synthetic.hpp"
#include "mixsent/trainer.hpp"

namespace mixsent {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Tensor random_tensor(Shape shape, Rng& rng, double scale = 1.0) {
  std::vector<double> v(shape_size(shape));
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return Tensor::from(std::move(shape), std::move(v));
}

std::vector<Tensor> model_tensors(const Model& model) {
  std::vector<Tensor> out;
  for (const auto& p : model.parameters()) out.push_back(p.tensor);
  return out;
}

std::string describe(const GradCheckResult& r, const Model& model) {
  std::ostringstream os;
  os << "max rel err " << r.max_rel_error << " at " << model.parameters().at(r.worst_param).name << "["
     << r.worst_index << "]";
  if (!r.finite) os << " (non-finite: " << r.message << ")";
  return os.str();
}

}  // namespace

double ks_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - xs[i]);
    d = std::max(d, xs[i] - static_cast<double>(i) / n);
  }
  return d;
}

CheckOutcome check_gradient_fidelity(double tolerance, std::uint64_t seed) {
  Stopwatch clock;
  CheckOutcome out{"gradient fidelity", true, "", 0.0};
  Rng rng(seed);
  const std::size_t vocab = 7, d = 4, classes = 3;

  {
    ModelConfig mc;
    mc.encoder = EncoderKind::kCnn;
    mc.vocab_size = vocab;
    mc.embedding_dim = d;
    mc.num_classes = classes;
    mc.filter_sizes = {3, 4, 5};
    mc.feature_maps = 2;
    Model model(mc, random_embedding(vocab, d, true, rng), rng);
    const std::vector<std::vector<std::size_t>> ids{{2, 3, 4, 5, 1, 0}, {6, 2, 2, 3, 0, 0}, {5, 4, 3, 2, 6, 1}};
    const double lambda = 0.3;
    // rows: word-mixed pair (0, 1) with a two-class soft target, then plain sentence 2
    const std::vector<double> target{lambda, 1.0 - lambda, 0.0, 0.0, 0.0, 1.0};
    auto loss = [&] {
      auto mixed = lerp(model.embed(ids[0]), model.embed(ids[1]), lambda);
      return softmax_cross_entropy_soft(model.logits(model.encode_batch({mixed, model.embed(ids[2])})), target);
    };
    auto r = grad_check(loss, model_tensors(model), 1e-5, {d});
    out.passed = out.passed && r.passed(tolerance);
    out.detail += "CNN " + describe(r, model);
  }
  {
    ModelConfig mc;
    mc.encoder = EncoderKind::kLstm;
    mc.vocab_size = vocab;
    mc.embedding_dim = d;
    mc.num_classes = classes;
    mc.hidden_dim = 3;
    Model model(mc, random_embedding(vocab, d, true, rng), rng);
    const std::vector<std::vector<std::size_t>> ids{{2, 3, 4}, {6, 5, 1}};
    const std::vector<double> lambdas{0.7, 0.4};
    const std::vector<std::size_t> partner{1, 0};
    const std::vector<double> target{0.7, 0.0, 0.3, 0.6, 0.0, 0.4};
    auto loss = [&] {
      auto enc = model.encode_batch({model.embed(ids[0]), model.embed(ids[1])});
      return softmax_cross_entropy_soft(model.logits(mix_rows(enc, partner, lambdas)), target);
    };
    auto r = grad_check(loss, model_tensors(model), 1e-5, {d});
    out.passed = out.passed && r.passed(tolerance);
    out.detail += "; LSTM(3 steps) " + describe(r, model);
  }
  out.seconds = clock.seconds();
  return out;
}

CheckOutcome check_mixup_algebra(std::size_t instances, std::uint64_t seed) {
  Stopwatch clock;
  Rng rng(seed);
  std::size_t failures = 0;
  double worst_ce = 0.0, worst_commute = 0.0;
  auto expect = [&](bool ok) { failures += ok ? 0 : 1; };

  for (std::size_t trial = 0; trial < instances; ++trial) {
    const std::size_t len = 1 + rng.index(6), d = 1 + rng.index(5), c = 2 + rng.index(4);
    auto bi = random_tensor({len, d}, rng, 2.0);
    auto bj = random_tensor({len, d}, rng, 2.0);
    auto yi = SoftLabel::one_hot(c, rng.index(c));
    auto yj = SoftLabel::one_hot(c, rng.index(c));
    const double lambda = rng.uniform(0.0, 1.0);

    // endpoints
    auto at1 = word_mixup(bi, bj, yi, yj, 1.0);
    auto at0 = word_mixup(bi, bj, yi, yj, 0.0);
    expect(std::equal(at1.input.data().begin(), at1.input.data().end(), bi.data().begin()));
    expect(std::equal(at0.input.data().begin(), at0.input.data().end(), bj.data().begin()));
    expect(at1.label == yi && at0.label == yj);
    auto ei = random_tensor({d}, rng), ej = random_tensor({d}, rng);
    auto s1 = sen_mixup(ei, ej, yi, yj, 1.0);
    auto s0 = sen_mixup(ei, ej, yi, yj, 0.0);
    expect(std::equal(s1.input.data().begin(), s1.input.data().end(), ei.data().begin()));
    expect(std::equal(s0.input.data().begin(), s0.input.data().end(), ej.data().begin()));

    // symmetry and convexity
    auto m = word_mixup(bi, bj, yi, yj, lambda);
    auto sym = word_mixup(bj, bi, yj, yi, 1.0 - lambda);
    for (std::size_t k = 0; k < m.input.size(); ++k) {
      expect(m.input[k] >= std::min(bi[k], bj[k]) - 1e-15 && m.input[k] <= std::max(bi[k], bj[k]) + 1e-15);
      expect(std::abs(m.input[k] - sym.input[k]) <= 1e-15);
    }
    double mass = 0.0;
    std::size_t nonzero = 0;
    for (std::size_t k = 0; k < c; ++k) {
      expect(m.label[k] >= 0.0 && m.label[k] <= 1.0);
      expect(std::abs(m.label[k] - sym.label[k]) <= 1e-15);
      mass += m.label[k];
      nonzero += m.label[k] != 0.0;
    }
    expect(std::abs(mass - 1.0) <= 1e-12 && nonzero <= 2);

    // CE is linear in the target
    std::vector<double> z(c);
    for (auto& v : z) v = rng.uniform(-3.0, 3.0);
    auto logits = Tensor::vector(z);
    const double mixed = softmax_cross_entropy_soft(logits, m.label.probs()).item();
    const double split = lambda * softmax_cross_entropy_soft(logits, yi.probs()).item() +
                         (1.0 - lambda) * softmax_cross_entropy_soft(logits, yj.probs()).item();
    worst_ce = std::max(worst_ce, std::abs(mixed - split));

    // a fixed linear encoder commutes with mixing
    const std::size_t k_out = 3;
    auto wide = random_tensor({len * d, k_out}, rng, 2.0);
    auto bias = random_tensor({k_out}, rng);
    auto encode = [&](const Tensor& words) { return affine(reshape(words, {len * d}), wide, bias); };
    auto via_sen = sen_mixup(encode(bi), encode(bj), yi, yj, lambda);
    auto via_word = encode(m.input);
    for (std::size_t k = 0; k < k_out; ++k)
      worst_commute = std::max(worst_commute, std::abs(via_sen.input[k] - via_word[k]));
  }
  const bool ok = failures == 0 && worst_ce <= 1e-12 && worst_commute <= 1e-10;
  std::ostringstream os;
  os << instances << " instances, " << failures << " endpoint/symmetry/convexity violations, CE linearity err "
     << worst_ce << ", commutation err " << worst_commute;
  return {"mixup algebra", ok, os.str(), clock.seconds()};
}

CheckOutcome check_lambda_statistics(std::size_t draws, std::uint64_t seed) {
  Stopwatch clock;
  Rng rng(seed);
  std::vector<double> xs(draws);
  for (auto& x : xs) x = sample_lambda({1.0}, rng);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(draws);
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(draws - 1);
  const double ks = ks_uniform(xs);
  const bool ok = mean >= 0.48 && mean <= 0.52 && var >= 0.073 && var <= 0.093 && ks < 0.02;
  std::ostringstream os;
  os << draws << " draws at alpha=1: mean " << mean << ", variance " << var << ", KS " << ks;
  return {"mixing-policy statistics", ok, os.str(), clock.seconds()};
}

namespace {

Dataset selftest_corpus(std::uint64_t seed) {
  SyntheticCorpusSpec s;
  s.train_size = 300;
  s.test_size = 100;
  s.filler_words = 400;
  s.seed = seed;
  return make_synthetic_dataset(s, "selftest");
}

TrainConfig selftest_config(Method method, std::size_t steps, std::uint64_t seed) {
  TrainConfig c;
  c.method = method;
  c.embedding_dim = 16;
  c.feature_maps = 8;
  c.hidden_dim = 8;
  c.batch_size = 20;
  c.steps = steps;
  c.eval_every = std::max<std::size_t>(1, steps / 4);
  c.runs = 1;
  c.seed = seed;
  return c;
}

}  // namespace

CheckOutcome check_endpoint_equivalence(std::size_t steps, std::uint64_t seed) {
  Stopwatch clock;
  Dataset ds = selftest_corpus(seed);
  SplitView split = make_split(ds, 0, 10, 0.1, seed);
  TrainConfig plain = selftest_config(Method::kBaseline, steps, seed);
  plain.dropout = 0.0;
  plain.l2 = 0.0;
  TrainOptions forced;
  forced.hooks.forced_lambda = 1.0;
  forced.hooks.identity_pairing = true;
  const auto reference = train_run(plain, ds, split).step_losses;

  std::ostringstream os;
  bool ok = reference.size() == steps;
  for (Method m : {Method::kWordMixup, Method::kSenMixup}) {
    TrainConfig mixed = selftest_config(m, steps, seed);
    const auto losses = train_run(mixed, ds, split, forced).step_losses;
    std::size_t first_diff = steps;
    for (std::size_t i = 0; i < std::min(losses.size(), reference.size()); ++i)
      if (losses[i] != reference[i]) {
        first_diff = i;
        break;
      }
    const bool same = losses == reference;
    ok = ok && same;
    os << method_name(m) << ": " << (same ? "bitwise identical" : "differs from step " + std::to_string(first_diff + 1))
       << " over " << losses.size() << " steps; ";
  }
  os << "final loss " << (reference.empty() ? 0.0 : reference.back());
  return {"endpoint equivalence", ok, os.str(), clock.seconds()};
}

CheckOutcome check_regime_gating(std::uint64_t seed) {
  Stopwatch clock;
  Dataset ds = selftest_corpus(seed);
  SplitView split = make_split(ds, 0, 10, 0.1, seed);
  bool ok = true;
  std::ostringstream os;
  for (Method m : {Method::kWordMixup, Method::kSenMixup}) {
    for (EncoderKind enc : {EncoderKind::kCnn, EncoderKind::kLstm}) {
      TrainConfig c = selftest_config(m, 20, seed);
      c.encoder = enc;
      const auto k = train_run(c, ds, split).counters;
      ok = ok && k.dropout_masks == 0 && k.l2_terms == 0 && k.mixed_batches == 20;
      os << method_name(m) << "/" << encoder_name(enc) << " masks=" << k.dropout_masks << " l2=" << k.l2_terms
         << "; ";
    }
  }
  TrainConfig base = selftest_config(Method::kBaseline, 20, seed);
  const auto k = train_run(base, ds, split).counters;
  ok = ok && k.dropout_masks == 20 && k.l2_terms == 20;
  os << "baseline masks=" << k.dropout_masks << " l2=" << k.l2_terms;
  return {"regime gating", ok, os.str(), clock.seconds()};
}

std::vector<CheckOutcome> run_selftests() {
  return {check_gradient_fidelity(), check_mixup_algebra(), check_lambda_statistics(), check_endpoint_equivalence(),
          check_regime_gating()};
}

}  // namespace mixsent
