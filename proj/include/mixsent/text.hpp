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

#ifndef MIXSENT_TEXT_HPP
#define MIXSENT_TEXT_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mixsent {

/// Lowercases, splits punctuation into standalone tokens and detaches the
/// clitics 's 've n't 're 'd 'll. Returns nullopt when nothing is left, which
/// callers treat as "skip this line".
std::optional<std::vector<std::string>> tokenize(std::string_view raw);

/// Token ↔ id map. Id 0 is padding and id 1 the unknown token; corpus tokens
/// start at 2 in first-occurrence order.
class Vocab {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;

  Vocab();

  /// Returns the id of `token`, inserting it when new. Empty tokens are
  /// rejected with kUnk.
  std::size_t add(const std::string& token);
  std::size_t id(const std::string& token) const;
  bool contains(const std::string& token) const { return index_.count(token) != 0; }
  const std::string& token(std::size_t id) const { return tokens_.at(id); }

  /// Rows needed by an embedding table (reserved ids included).
  std::size_t size() const { return tokens_.size(); }
  /// Distinct corpus tokens, the usual "vocabulary size" statistic.
  std::size_t token_count() const { return tokens_.size() - 2; }

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus);

struct EncodedSequence {
  std::vector<std::size_t> ids;  // exactly L entries
  std::size_t length = 0;        // tokens kept before padding
  bool truncated = false;
};

/// Maps tokens to ids (unknown → 1) and right-pads with 0 to length L,
/// truncating longer inputs.
EncodedSequence encode_and_pad(std::span<const std::string> tokens, const Vocab& vocab, std::size_t max_len);

/// Inverse of encode_and_pad over the first `length` ids.
std::vector<std::string> decode(const EncodedSequence& seq, const Vocab& vocab);

}  // namespace mixsent

#endif  // MIXSENT_TEXT_HPP
