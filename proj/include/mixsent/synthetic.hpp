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

#ifndef MIXSENT_SYNTHETIC_HPP
#define MIXSENT_SYNTHETIC_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "mixsent/dataset.hpp"

namespace mixsent {

/// Generator for labelled toy corpora. Each class owns a small set of cue
/// words; a sentence draws every token either from its class cues (with
/// probability `cue_rate`) or from a shared filler vocabulary, and a
/// fraction `label_noise` of labels is reassigned at random.
struct SyntheticCorpusSpec {
  std::size_t num_classes = 2;
  std::size_t train_size = 500;
  std::size_t dev_size = 0;
  std::size_t test_size = 500;
  std::size_t cues_per_class = 40;
  std::size_t filler_words = 1500;
  std::size_t min_len = 6;
  std::size_t max_len = 16;
  double cue_rate = 0.15;
  double label_noise = 0.1;
  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  std::vector<RawExample> train;
  std::vector<RawExample> dev;
  std::vector<RawExample> test;
};

SyntheticCorpus make_synthetic_corpus(const SyntheticCorpusSpec& spec);

/// Dataset built from a synthetic corpus (CV-style when test_size is 0).
Dataset make_synthetic_dataset(const SyntheticCorpusSpec& spec, std::string name = "synthetic");

/// Writes the corpus as generic-tsv files train.tsv / dev.tsv / test.tsv.
void write_generic_tsv(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

}  // namespace mixsent

#endif  // MIXSENT_SYNTHETIC_HPP
