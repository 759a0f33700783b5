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

#ifndef MIXSENT_DATASET_HPP
#define MIXSENT_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mixsent/text.hpp"

namespace mixsent {

enum class Origin { kSentence, kPhrase };

struct Example {
  std::vector<std::size_t> ids;  // padded to the dataset's max_len
  std::size_t length = 0;
  std::size_t label = 0;
  Origin origin = Origin::kSentence;

  bool operator==(const Example&) const = default;
};

enum class DatasetFormat { kTrec, kMr, kSst1, kSst2, kSubj, kGenericTsv };

DatasetFormat parse_format(const std::string& name);
std::string format_name(DatasetFormat format);

/// A tokenized, padded corpus. Corpora without a standard test split keep
/// every example in `train` and set `cross_validation`.
struct Dataset {
  std::string name;
  std::size_t num_classes = 0;
  std::vector<std::string> label_names;
  Vocab vocab;
  std::vector<Example> train;
  std::vector<Example> dev;
  std::vector<Example> test;
  std::size_t max_len = 0;
  bool cross_validation = false;
  std::size_t truncated = 0;      // sequences cut to max_len
  std::size_t skipped_lines = 0;  // lines empty after tokenization

  /// Sentence-origin examples over all splits.
  std::size_t num_sentences() const;
  double mean_sentence_length() const;
  bool operator==(const Dataset&) const;
};

/// Smallest pad length; the widest CNN filter needs five positions.
inline constexpr std::size_t kMinPadLength = 5;

/// Reads a corpus in one of the supported layouts (see README). Raises
/// IoError for missing files, ParseError for malformed lines and DataError
/// for labels outside the declared class range.
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format);

/// In-memory variant used by the file loaders and tests: labelled raw lines
/// per split. `num_classes` of 0 means "infer from labels".
struct RawExample {
  std::size_t label = 0;
  std::string text;
  Origin origin = Origin::kSentence;
};
Dataset build_dataset(std::string name, std::size_t num_classes, std::vector<RawExample> train,
                      std::vector<RawExample> dev, std::vector<RawExample> test, bool cross_validation);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> dev;
  std::vector<std::size_t> test;
};

/// k-fold plan over `n` examples: seeded shuffle, fold sizes differing by at
/// most one, and `dev_fraction` of each fold's training part held out as dev.
std::vector<Fold> split_folds(std::size_t n, std::size_t k, double dev_fraction, std::uint64_t seed);
std::vector<Fold> split_folds(const Dataset& dataset, std::size_t k, double dev_fraction, std::uint64_t seed);

/// Seeded dev hold-out for corpora that ship train/test only. Returns
/// {train indices, dev indices}.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> carve_dev(std::size_t n, double dev_fraction,
                                                                        std::uint64_t seed);

/// Concrete train/dev/test example sets for one run.
struct SplitView {
  std::vector<Example> train;
  std::vector<Example> dev;
  std::vector<Example> test;
};

/// Materializes the standard split of a non-CV dataset (carving dev when
/// absent) or fold `fold` of a CV dataset.
SplitView make_split(const Dataset& dataset, std::size_t fold, std::size_t k, double dev_fraction,
                     std::uint64_t seed);

/// Keeps at most `n` training examples, chosen by a seeded shuffle.
void subsample_train(SplitView& split, std::size_t n, std::uint64_t seed);

}  // namespace mixsent

#endif  // MIXSENT_DATASET_HPP
