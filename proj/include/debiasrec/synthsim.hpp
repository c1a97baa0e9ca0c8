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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "debiasrec/bias_repr.hpp"
#include "debiasrec/dataio.hpp"

namespace debiasrec {

// Parameters of the synthetic biased-click world.
struct SimConfig {
  std::size_t n_users = 500;
  std::size_t n_news = 2000;
  std::size_t n_topics = 10;
  std::size_t vocab_size = 400;
  std::size_t common_words = 100;    // shared by all topics; the rest is split across topics
  double topic_word_prob = 0.7;      // chance a title word is topic-exclusive
  std::size_t title_len_min = 4;
  std::size_t title_len_max = 8;
  std::size_t n_positions = 10;      // positions 1..n_positions exist on a page
  std::size_t slate_size = 10;       // items per impression (<= n_positions)
  double eta = 0.85;                 // examination decay per position
  std::array<double, kNumSizes> size_factors{0.5, 0.7, 0.85, 1.0};
  double pref_scale = 3.0;           // stddev of user-topic preferences
  double quality_scale = 0.3;        // stddev of per-news quality
  double relevance_offset = -2.0;
  double prominence_scale = 1.0;     // stddev of per-topic editorial prominence
  double placement_noise = 0.5;      // noise in the logging policy's ordering
  std::size_t history_min = 5;
  std::size_t history_max = 15;
  std::size_t train_impressions_per_user = 40;
  std::size_t test_impressions_per_user = 10;
  std::size_t unbiased_impressions_per_user = 10;
  double relevance_threshold = 0.5;
  std::int64_t start_time = 1570924800;  // first training timestamp
  std::int64_t train_days = 21;
  std::int64_t test_days = 7;
  std::uint64_t seed = 7;

  void validate() const;
  std::int64_t test_start() const { return start_time + train_days * 86400; }
};

// Hidden state from which every click probability can be re-derived.
struct GroundTruth {
  std::vector<std::size_t> news_topic;
  std::vector<double> news_quality;
  std::vector<double> news_prominence;
  std::vector<std::vector<double>> user_pref;  // n_users x n_topics
  double eta = 1.0;
  std::array<double, kNumSizes> size_factors{1.0, 1.0, 1.0, 1.0};
  double relevance_offset = 0.0;
  double relevance_threshold = 0.5;
  std::int64_t test_start = 0;

  double relevance(std::size_t user, std::size_t news) const;
  double examination(const BiasFeatures& f) const;
  double click_probability(std::size_t user, std::size_t news, const BiasFeatures& f) const {
    return examination(f) * relevance(user, news);
  }
};

struct SimCatalog {
  NewsCatalog catalog;
  GroundTruth truth;
};

// Catalog plus hidden per-news and per-user truth. Titles mix topic-exclusive
// words with a shared vocabulary so the topic is recoverable from text.
SimCatalog generate_catalog(const SimConfig& cfg);

struct SimLogs {
  std::vector<ImpressionRecord> behaviors;  // train window then test window, by time
  std::vector<ImpressionRecord> unbiased;   // uniform presentation, label = relevance > threshold
};

// Biased logs: the logging policy orders each slate by noisy editorial
// prominence, sizes depend on position, clicks ~ Bernoulli(exam * relevance).
// Users are generated independently from per-user RNG streams.
SimLogs generate_logs(const SimConfig& cfg, const GroundTruth& truth);

std::string user_id(std::size_t user);
std::size_t parse_user_id(const std::string& id);

// Ground-truth sidecar: truth.txt (key = value), truth_news.csv, truth_users.csv.
void write_truth(const std::string& dir, const GroundTruth& truth, const NewsCatalog& catalog);
GroundTruth read_truth(const std::string& dir, const NewsCatalog& catalog);

std::string format_sim_config(const SimConfig& cfg);

}  // namespace debiasrec
