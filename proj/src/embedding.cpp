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

#include "mixsent/embedding.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "mixsent/errors.hpp"

namespace mixsent {

EmbeddingRegime parse_regime(const std::string& name) {
  if (name == "RandomTune") return EmbeddingRegime::kRandomTune;
  if (name == "RandomFix") return EmbeddingRegime::kRandomFix;
  if (name == "PretrainTune") return EmbeddingRegime::kPretrainTune;
  if (name == "PretrainFix") return EmbeddingRegime::kPretrainFix;
  throw ConfigError("unknown embedding regime '" + name + "'");
}

std::string regime_name(EmbeddingRegime regime) {
  switch (regime) {
    case EmbeddingRegime::kRandomTune: return "RandomTune";
    case EmbeddingRegime::kRandomFix: return "RandomFix";
    case EmbeddingRegime::kPretrainTune: return "PretrainTune";
    case EmbeddingRegime::kPretrainFix: return "PretrainFix";
  }
  return "unknown";
}

bool regime_trainable(EmbeddingRegime regime) {
  return regime == EmbeddingRegime::kRandomTune || regime == EmbeddingRegime::kPretrainTune;
}

bool regime_pretrained(EmbeddingRegime regime) {
  return regime == EmbeddingRegime::kPretrainTune || regime == EmbeddingRegime::kPretrainFix;
}

EmbeddingTable random_embedding(std::size_t vocab_size, std::size_t dim, bool trainable, Rng& rng) {
  if (vocab_size < 2 || dim == 0) throw ConfigError("embedding table needs V >= 2 and d >= 1");
  std::vector<double> values(vocab_size * dim);
  for (std::size_t i = dim; i < values.size(); ++i) values[i] = rng.uniform(-kUniformInitRange, kUniformInitRange);
  EmbeddingTable t;
  t.table = Tensor::from({vocab_size, dim}, std::move(values), trainable);
  t.dim = dim;
  t.trainable = trainable;
  t.init = EmbeddingInit::kRandom;
  return t;
}

EmbeddingTable load_pretrained_vectors(const std::filesystem::path& path, const Vocab& vocab, std::size_t dim,
                                       bool trainable, Rng& rng) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open word vectors " + path.string());
  EmbeddingTable t = random_embedding(vocab.size(), dim, trainable, rng);
  t.init = EmbeddingInit::kPretrained;
  auto values = t.table.mutable_data();

  std::size_t found = 0;
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos) throw ParseError(path.string(), lineno, "expected <word> <values...>");
    const std::string word = line.substr(0, space);
    row.clear();
    const char* p = line.data() + space;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) throw ParseError(path.string(), lineno, "bad number");
      row.push_back(v);
      p = next;
    }
    if (lineno == 1 && row.size() == 1) continue;  // "<count> <dim>" header
    if (row.size() != dim) {
      throw ParseError(path.string(), lineno,
                       "vector has " + std::to_string(row.size()) + " values, expected " + std::to_string(dim));
    }
    if (!vocab.contains(word)) continue;
    const std::size_t id = vocab.id(word);
    if (id < 2) continue;
    std::copy(row.begin(), row.end(), values.begin() + static_cast<std::ptrdiff_t>(id * dim));
    ++found;
  }
  std::fill(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(dim), 0.0);
  t.coverage = vocab.token_count() ? static_cast<double>(found) / static_cast<double>(vocab.token_count()) : 0.0;
  if (found == 0) std::cerr << "warning: no vocabulary word found in " << path.string() << "\n";
  return t;
}

}  // namespace mixsent
