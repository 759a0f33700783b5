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

#ifndef MIXSENT_EMBEDDING_HPP
#define MIXSENT_EMBEDDING_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "mixsent/rng.hpp"
#include "mixsent/tensor.hpp"
#include "mixsent/text.hpp"

namespace mixsent {

enum class EmbeddingInit { kRandom, kPretrained };

/// The four word-embedding regimes: {random, pretrained} × {tuned, frozen}.
enum class EmbeddingRegime { kRandomTune, kRandomFix, kPretrainTune, kPretrainFix };

EmbeddingRegime parse_regime(const std::string& name);
std::string regime_name(EmbeddingRegime regime);
bool regime_trainable(EmbeddingRegime regime);
bool regime_pretrained(EmbeddingRegime regime);

/// V×d word-vector matrix. Row 0 is the padding vector: all zeros, and its
/// gradient is masked so it stays zero under training.
struct EmbeddingTable {
  Tensor table;
  std::size_t dim = 0;
  bool trainable = true;
  EmbeddingInit init = EmbeddingInit::kRandom;
  double coverage = 0.0;  // fraction of corpus tokens found in a vector file

  std::size_t vocab_size() const { return table.dim(0); }
};

/// Unknown-word range for uniform initialization.
inline constexpr double kUniformInitRange = 0.25;

EmbeddingTable random_embedding(std::size_t vocab_size, std::size_t dim, bool trainable, Rng& rng);

/// Reads `<word> <v1> ... <vd>` lines. Words in `vocab` take their file row;
/// the rest draw uniform(−0.25, 0.25). A leading "<count> <dim>" header line
/// is skipped. Rows of the wrong width raise ParseError.
EmbeddingTable load_pretrained_vectors(const std::filesystem::path& path, const Vocab& vocab, std::size_t dim,
                                       bool trainable, Rng& rng);

}  // namespace mixsent

#endif  // MIXSENT_EMBEDDING_HPP
