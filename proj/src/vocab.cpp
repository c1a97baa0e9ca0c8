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

#include "debiasrec/vocab.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace debiasrec {

namespace {

// Byte length of a Unicode whitespace sequence starting at s[i], or 0.
std::size_t whitespace_len(std::string_view s, std::size_t i) {
  const auto c = static_cast<unsigned char>(s[i]);
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') return 1;
  auto at = [&](std::size_t k) { return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0u; };
  if (c == 0xC2 && (at(1) == 0x85 || at(1) == 0xA0)) return 2;  // NEL, NBSP
  if (c == 0xE1 && at(1) == 0x9A && at(2) == 0x80) return 3;    // U+1680
  if (c == 0xE2 && at(1) == 0x80) {
    const auto d = at(2);
    if ((d >= 0x80 && d <= 0x8A) || d == 0xA8 || d == 0xA9 || d == 0xAF) return 3;  // U+2000..200A, 2028, 2029, 202F
  }
  if (c == 0xE2 && at(1) == 0x81 && at(2) == 0x9F) return 3;  // U+205F
  if (c == 0xE3 && at(1) == 0x80 && at(2) == 0x80) return 3;  // U+3000
  return 0;
}

bool is_ascii_punct(char c) { return static_cast<unsigned char>(c) < 0x80 && std::ispunct(static_cast<unsigned char>(c)); }

void emit(std::string piece, std::vector<std::string>& out) {
  std::size_t b = 0;
  std::size_t e = piece.size();
  while (b < e && is_ascii_punct(piece[b])) ++b;
  while (e > b && is_ascii_punct(piece[e - 1])) --e;
  if (b == e) return;
  std::string tok = piece.substr(b, e - b);
  for (char& ch : tok) {
    if (static_cast<unsigned char>(ch) < 0x80) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  out.push_back(std::move(tok));
}

}  // namespace

std::vector<std::string> tokenize_text(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t ws = whitespace_len(text, i);
    if (ws) {
      if (!cur.empty()) emit(std::move(cur), out);
      cur.clear();
      i += ws;
    } else {
      cur.push_back(text[i]);
      ++i;
    }
  }
  if (!cur.empty()) emit(std::move(cur), out);
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

Vocab::Vocab() {
  add("<pad>");
  add("<unk>");
}

std::int32_t Vocab::add(const std::string& token) {
  auto [it, inserted] = index_.emplace(token, static_cast<std::int32_t>(tokens_.size()));
  if (inserted) tokens_.push_back(token);
  return it->second;
}

std::int32_t Vocab::lookup(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnkId : it->second;
}

std::string Vocab::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out += tokens_[i];
    out += '\t';
    out += std::to_string(i);
    out += '\n';
  }
  return out;
}

Vocab Vocab::parse(std::string_view text, int min_count) {
  Vocab v;
  v.min_count_ = min_count;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw std::runtime_error("vocab line " + std::to_string(lineno) + ": missing tab");
    const std::string tok = line.substr(0, tab);
    const long id = std::stol(line.substr(tab + 1));
    if (id < 2) {
      if (tok != v.tokens_.at(static_cast<std::size_t>(id)))
        throw std::runtime_error("vocab line " + std::to_string(lineno) + ": reserved id mismatch");
      continue;
    }
    if (static_cast<std::size_t>(id) != v.tokens_.size())
      throw std::runtime_error("vocab line " + std::to_string(lineno) + ": ids must be dense");
    v.add(tok);
  }
  return v;
}

void Vocab::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize();
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::uint64_t Vocab::hash() const { return fnv1a64(serialize()); }

Vocab build_vocab(const std::vector<std::string>& corpus, int min_count) {
  if (corpus.empty()) throw std::invalid_argument("build_vocab: empty corpus");
  std::unordered_map<std::string, int> counts;
  std::vector<std::string> order;
  for (const auto& title : corpus) {
    for (auto& tok : tokenize_text(title)) {
      auto [it, inserted] = counts.emplace(tok, 0);
      if (inserted) order.push_back(tok);
      ++it->second;
    }
  }
  Vocab v;
  v.min_count_ = min_count;
  for (const auto& tok : order) {
    if (counts[tok] >= min_count) v.add(tok);
  }
  return v;
}

TitleTokens tokenize(std::string_view title, const Vocab& vocab, std::size_t max_len) {
  TitleTokens t;
  t.ids.assign(max_len, kPadId);
  t.mask.assign(max_len, false);
  const auto toks = tokenize_text(title);
  t.length = std::min(max_len, toks.size());
  for (std::size_t i = 0; i < t.length; ++i) {
    t.ids[i] = vocab.lookup(toks[i]);
    t.mask[i] = true;
  }
  return t;
}

std::size_t load_pretrained_embeddings(const std::string& path, const Vocab& vocab, Mat& embeddings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::size_t filled = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    std::vector<double> vals;
    double x;
    while (ls >> x) vals.push_back(x);
    if (vals.size() != embeddings.cols()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(embeddings.cols()) + " values, got " + std::to_string(vals.size()));
    }
    const std::int32_t id = vocab.lookup(tok);
    if (id == kUnkId && tok != "<unk>") continue;
    std::copy(vals.begin(), vals.end(), embeddings.row(static_cast<std::size_t>(id)));
    ++filled;
  }
  return filled;
}

}  // namespace debiasrec
