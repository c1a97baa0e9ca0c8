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

#include <string>
#include <vector>

#include "debiasrec/metrics.hpp"
#include "debiasrec/model.hpp"

namespace debiasrec {

struct EvalOptions {
  bool keep_rows = false;
  bool collect_scores = false;
  bool collect_attention = false;
};

// One (impression, candidate) row of a score dump.
struct ScoreRow {
  std::string impression_id;
  std::size_t news = 0;
  double preference = 0.0;
  double bias = 0.0;
  double click = 0.0;
  int label = 0;
};

// One clicked-history row of an attention dump (first impression per user).
struct AttentionRow {
  std::string user_id;
  std::size_t news = 0;
  BiasFeatures bias;
  double content_score = 0.0;
  double bias_score = 0.0;
  double alpha = 0.0;
};

struct EvalOutput {
  EvalReport report;
  std::vector<ScoreRow> scores;
  std::vector<AttentionRow> attention;
};

// Ranking scores of an impression's candidates (s_p, or sigmoid(s_p) in Pal
// mode). Candidate bias features are not read.
std::vector<double> ranking_scores(const DebiasRecModel& model, const Mat& news_vectors,
                                   const ImpressionRecord& impression);

// Candidate permutation per impression.
std::vector<std::vector<std::size_t>> rank_impressions(const DebiasRecModel& model, const NewsTokens& news,
                                                       const std::vector<ImpressionRecord>& impressions);

// Ranks every impression with the test-time rule and macro-averages the
// per-impression metrics. Impressions are fanned out across threads.
EvalOutput evaluate(const DebiasRecModel& model, const NewsTokens& news,
                    const std::vector<ImpressionRecord>& impressions, const EvalOptions& options = {});

// Single-threaded reference of evaluate(); results are bit-identical.
EvalOutput evaluate_serial(const DebiasRecModel& model, const NewsTokens& news,
                           const std::vector<ImpressionRecord>& impressions, const EvalOptions& options = {});

std::string format_score_dump(const std::vector<ScoreRow>& rows, const NewsCatalog& catalog);
std::string format_attention_dump(const std::vector<AttentionRow>& rows, const NewsCatalog& catalog);

}  // namespace debiasrec
