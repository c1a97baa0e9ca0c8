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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "debiasrec/bias_repr.hpp"

namespace debiasrec {

// Malformed or inconsistent input data. The message names the source and line.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NewsArticle {
  std::string id;
  std::string title;
  friend bool operator==(const NewsArticle&, const NewsArticle&) = default;
};

class NewsCatalog {
 public:
  // Throws DataError on duplicate ids.
  void add(NewsArticle article);

  std::optional<std::size_t> find(std::string_view id) const;
  const NewsArticle& operator[](std::size_t i) const { return articles_[i]; }
  std::size_t size() const { return articles_.size(); }
  bool empty() const { return articles_.empty(); }
  const std::vector<NewsArticle>& articles() const { return articles_; }

 private:
  std::vector<NewsArticle> articles_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Entries refer to news by catalog index.
struct HistoryEntry {
  std::size_t news = 0;
  BiasFeatures bias;
  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct CandidateEntry {
  std::size_t news = 0;
  BiasFeatures bias;
  int label = 0;
  friend bool operator==(const CandidateEntry&, const CandidateEntry&) = default;
};

struct ImpressionRecord {
  std::string impression_id;
  std::string user_id;
  std::int64_t timestamp = 0;
  std::vector<HistoryEntry> history;  // click order, oldest first
  std::vector<CandidateEntry> candidates;

  std::size_t num_clicked() const;
  friend bool operator==(const ImpressionRecord&, const ImpressionRecord&) = default;
};

// Reads a whole file; ".gz" paths are decompressed.
std::string read_text_file(const std::string& path);
// Writes a whole file; ".gz" paths are compressed.
void write_text_file(const std::string& path, std::string_view contents);

// "news_id<TAB>title" per line.
NewsCatalog parse_news(std::string_view text, const std::string& source = "<news>");
NewsCatalog load_news(const std::string& path);
std::string format_news(const NewsCatalog& catalog);
void write_news(const std::string& path, const NewsCatalog& catalog);

// "impression_id<TAB>user_id<TAB>timestamp<TAB>history<TAB>candidates".
// history: space-separated "news:pos:size" or "-"; candidates:
// space-separated "news:pos:size:label". Positions are clipped to
// [1, max_position].
std::vector<ImpressionRecord> parse_behaviors(std::string_view text, const NewsCatalog& catalog, int max_position,
                                              const std::string& source = "<behaviors>");
std::vector<ImpressionRecord> load_behaviors(const std::string& path, const NewsCatalog& catalog,
                                             int max_position);
std::string format_behaviors(const std::vector<ImpressionRecord>& impressions, const NewsCatalog& catalog);
void write_behaviors(const std::string& path, const std::vector<ImpressionRecord>& impressions,
                     const NewsCatalog& catalog);

struct DatasetSplit {
  std::vector<ImpressionRecord> train;
  std::vector<ImpressionRecord> validation;
  std::vector<ImpressionRecord> test;
};

// Impressions with timestamp < test_start form the training pool; the rest
// are test. A seeded uniform sample of round(val_fraction * pool) training
// impressions becomes the validation set. Relative order is preserved.
DatasetSplit split_dataset(const std::vector<ImpressionRecord>& impressions, std::int64_t test_start,
                           double val_fraction, std::uint64_t seed);

}  // namespace debiasrec
