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
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "debiasrec/bias_repr.hpp"
#include "debiasrec/dataio.hpp"

namespace debiasrec {

// Per-impression ranking metrics. std::nullopt marks an undefined value
// (no positive, or for AUC no negative). Ranks come from a descending sort
// of the scores with ties kept in input order.
std::optional<double> auc(std::span<const double> scores, std::span<const int> labels);
std::optional<double> mrr(std::span<const double> scores, std::span<const int> labels);
std::optional<double> ndcg_at_k(std::span<const double> scores, std::span<const int> labels, std::size_t k);

struct ImpressionMetrics {
  std::string impression_id;
  std::optional<double> auc, mrr, ndcg5, ndcg10;
};

ImpressionMetrics impression_metrics(std::span<const double> scores, std::span<const int> labels);

struct EvalReport {
  double auc = 0.0;
  double mrr = 0.0;
  double ndcg5 = 0.0;
  double ndcg10 = 0.0;
  std::size_t impressions = 0;
  std::size_t auc_count = 0;   // impressions where AUC is defined
  std::size_t rank_count = 0;  // impressions with at least one positive
  std::size_t skipped_auc = 0;
  std::size_t skipped_rank = 0;
  std::vector<ImpressionMetrics> rows;  // optional detail

  std::string to_csv() const;
  std::string to_table() const;
};

// Macro-average over impressions where each metric is defined. Summation is
// in row order so the result is independent of how rows were produced.
// Throws std::invalid_argument when no impression is valid.
EvalReport aggregate(std::vector<ImpressionMetrics> rows, bool keep_rows = false);

struct CtrBucket {
  std::uint64_t displays = 0;
  std::uint64_t clicks = 0;
  double ctr() const { return displays ? static_cast<double>(clicks) / static_cast<double>(displays) : 0.0; }
};

struct CtrTables {
  std::map<int, CtrBucket> by_position;
  std::array<CtrBucket, kNumSizes> by_size{};

  std::string position_csv() const;
  std::string size_csv() const;
};

// Clicks / displays per candidate position and per size category.
CtrTables ctr_by_bucket(const std::vector<ImpressionRecord>& impressions);

// Rows = size categories, columns = position buckets.
struct ContingencyTable {
  std::vector<std::vector<double>> counts;
};

// Size x position display counts for positions 1..max_position (later
// positions are dropped).
ContingencyTable size_position_table(const std::vector<ImpressionRecord>& impressions, int max_position);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double critical_001 = 0.0;
  bool significant_at_001 = false;
};

// Pearson chi-square test of independence. Throws std::invalid_argument for
// tables with fewer than two rows/columns, negative counts or an all-zero
// row or column.
ChiSquareResult chi_square(const ContingencyTable& table);

// Upper 1% critical value of the chi-square distribution.
double chi_square_critical_001(int dof);

}  // namespace debiasrec
