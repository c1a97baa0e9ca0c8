// Copyright (c) 2026 The DebiasRec Authors. All Rights Reserved.
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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "debiasrec/tensor.hpp"

namespace debiasrec {

inline constexpr std::int32_t kPadId = 0;
inline constexpr std::int32_t kUnkId = 1;

// Lowercases ASCII, splits on (Unicode) whitespace and strips leading and
// trailing ASCII punctuation from each piece. Pieces that become empty are
// dropped.
std::vector<std::string> tokenize_text(std::string_view text);

class Vocab {
 public:
  Vocab();

  std::int32_t lookup(const std::string& token) const;
  const std::string& token(std::int32_t id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }
  int min_count() const { return min_count_; }

  // "token<TAB>id" per line, ids in increasing order.
  std::string serialize() const;
  static Vocab parse(std::string_view text, int min_count = 1);
  void save(const std::string& path) const;
  static Vocab load(const std::string& path);

  // FNV-1a over serialize(); stored in checkpoints to catch vocab drift.
  std::uint64_t hash() const;

 private:
  friend Vocab build_vocab(const std::vector<std::string>& corpus, int min_count);
  std::int32_t add(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> index_;
  int min_count_ = 1;
};

// Ids are assigned in first-occurrence order to tokens with count >= min_count.
Vocab build_vocab(const std::vector<std::string>& corpus, int min_count);

struct TitleTokens {
  std::vector<std::int32_t> ids;  // length max_len, padded with kPadId
  std::vector<bool> mask;         // true for real tokens
  std::size_t length = 0;         // number of real tokens (a prefix)

  std::span<const std::int32_t> real() const { return {ids.data(), length}; }
};

TitleTokens tokenize(std::string_view title, const Vocab& vocab, std::size_t max_len);

// Loads "token v1 ... vD" lines into the rows of `embeddings` for tokens the
// vocabulary knows. Returns the number of rows filled.
std::size_t load_pretrained_embeddings(const std::string& path, const Vocab& vocab, Mat& embeddings);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace debiasrec
