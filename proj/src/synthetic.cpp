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

#include "mixsent/synthetic.hpp"

#include <fstream>
#include <string>

#include "mixsent/errors.hpp"
#include "mixsent/rng.hpp"

namespace mixsent {

namespace {

std::vector<RawExample> draw(const SyntheticCorpusSpec& spec, std::size_t n, Rng& rng) {
  std::vector<RawExample> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t label = rng.index(spec.num_classes);
    const std::size_t len = spec.min_len + rng.index(spec.max_len - spec.min_len + 1);
    std::string text;
    for (std::size_t t = 0; t < len; ++t) {
      if (t) text += ' ';
      if (rng.uniform() < spec.cue_rate) {
        text += "c" + std::to_string(label) + "w" + std::to_string(rng.index(spec.cues_per_class));
      } else {
        text += "f" + std::to_string(rng.index(spec.filler_words));
      }
    }
    std::size_t shown = label;
    if (rng.uniform() < spec.label_noise) shown = rng.index(spec.num_classes);
    out.push_back({shown, std::move(text), Origin::kSentence});
  }
  return out;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticCorpusSpec& spec) {
  if (spec.num_classes < 2 || spec.train_size == 0 || spec.min_len == 0 || spec.max_len < spec.min_len) {
    throw ConfigError("invalid synthetic corpus settings");
  }
  Rng rng(spec.seed);
  SyntheticCorpus corpus;
  corpus.train = draw(spec, spec.train_size, rng);
  corpus.dev = draw(spec, spec.dev_size, rng);
  corpus.test = draw(spec, spec.test_size, rng);
  return corpus;
}

Dataset make_synthetic_dataset(const SyntheticCorpusSpec& spec, std::string name) {
  auto corpus = make_synthetic_corpus(spec);
  return build_dataset(std::move(name), spec.num_classes, std::move(corpus.train), std::move(corpus.dev),
                       std::move(corpus.test), spec.test_size == 0);
}

void write_generic_tsv(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto dump = [&](const std::vector<RawExample>& split, const char* name) {
    if (split.empty()) return;
    std::ofstream out(dir / name);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    for (const auto& e : split) out << e.label << '\t' << e.text << '\n';
  };
  dump(corpus.train, "train.tsv");
  dump(corpus.dev, "dev.tsv");
  dump(corpus.test, "test.tsv");
}

}  // namespace mixsent
