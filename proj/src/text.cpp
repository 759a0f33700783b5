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

#include "mixsent/text.hpp"

#include <array>
#include <cctype>

#include "mixsent/errors.hpp"

namespace mixsent {

namespace {

bool is_word_char(unsigned char ch) {
  return std::isalnum(ch) || ch == '\'' || ch == '`' || ch >= 0x80;
}

void split_clitic(std::string word, std::vector<std::string>& out) {
  static const std::array<std::string_view, 6> kSuffixes{"n't", "'s", "'ve", "'re", "'d", "'ll"};
  for (auto suffix : kSuffixes) {
    if (word.size() > suffix.size() && word.compare(word.size() - suffix.size(), suffix.size(), suffix) == 0) {
      std::string head = word.substr(0, word.size() - suffix.size());
      out.push_back(std::move(head));
      out.emplace_back(suffix);
      return;
    }
  }
  out.push_back(std::move(word));
}

}  // namespace

std::optional<std::vector<std::string>> tokenize(std::string_view raw) {
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) split_clitic(std::move(word), tokens);
    word.clear();
  };
  for (char c : raw) {
    const auto ch = static_cast<unsigned char>(c);
    if (is_word_char(ch)) {
      word.push_back(static_cast<char>(ch < 0x80 ? std::tolower(ch) : ch));
    } else if (std::ispunct(ch)) {
      flush();
      tokens.emplace_back(1, c);
    } else {
      flush();
    }
  }
  flush();
  if (tokens.empty()) return std::nullopt;
  return tokens;
}

Vocab::Vocab() {
  add("<pad>");
  add("<unk>");
}

std::size_t Vocab::add(const std::string& token) {
  if (token.empty()) return kUnk;
  auto [it, inserted] = index_.try_emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

std::size_t Vocab::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus) {
  Vocab vocab;
  for (const auto& sentence : corpus)
    for (const auto& tok : sentence) vocab.add(tok);
  return vocab;
}

EncodedSequence encode_and_pad(std::span<const std::string> tokens, const Vocab& vocab, std::size_t max_len) {
  if (max_len == 0) throw ContractError("pad length must be at least 1");
  EncodedSequence seq;
  seq.ids.assign(max_len, Vocab::kPad);
  seq.length = std::min(tokens.size(), max_len);
  seq.truncated = tokens.size() > max_len;
  for (std::size_t t = 0; t < seq.length; ++t) seq.ids[t] = vocab.id(tokens[t]);
  return seq;
}

std::vector<std::string> decode(const EncodedSequence& seq, const Vocab& vocab) {
  std::vector<std::string> out;
  out.reserve(seq.length);
  for (std::size_t t = 0; t < seq.length; ++t) out.push_back(vocab.token(seq.ids[t]));
  return out;
}

}  // namespace mixsent
