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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "debiasrec/config.hpp"
#include "debiasrec/dataio.hpp"
#include "debiasrec/rng.hpp"
#include "debiasrec/tensor.hpp"

namespace debiasrec {

// Bias-score head: s_b = w . b + offset.
struct BacpView {
  std::span<const double> weight;
  double offset = 0.0;
};

struct Scores {
  double preference = 0.0;  // s_p (sigmoid(s_p) in Pal mode)
  double bias = 0.0;        // s_b (sigmoid(s_b) in Pal mode)
  double click = 0.0;       // s_c (the product in Pal mode)
};

// Full: s_c = s_b + s_p. NoBacp / NoDebias: s_b = 0, s_c = s_p (the bias
// vector and head are not read). Pal: (sigmoid(s_p), sigmoid(s_b), product).
Scores score(std::span<const double> user, std::span<const double> content, std::span<const double> bias,
             const BacpView& head, ScoringMode mode);

// -log softmax(scores)[positive]. When d_scores is non-empty it receives
// dL/dscores.
double softmax_cross_entropy(std::span<const double> scores, std::size_t positive,
                             std::span<double> d_scores = {});

// Mean binary cross-entropy over candidates with p = sigmoid(s_b) * sigmoid(s_p).
// Gradients w.r.t. the raw scores are written when the spans are non-empty.
double pal_loss(std::span<const double> bias_scores, std::span<const double> pref_scores,
                std::span<const int> labels, std::span<double> d_bias = {}, std::span<double> d_pref = {});

// Loss for one training instance given raw (s_p, s_b) per candidate.
double instance_loss(std::span<const double> pref_scores, std::span<const double> bias_scores,
                     std::span<const int> labels, ScoringMode mode);

// One positive candidate plus K sampled negatives from the same impression.
// candidates[0] is the positive.
struct TrainInstance {
  std::size_t impression = 0;  // index into the training impression list
  std::vector<std::size_t> candidates;  // indices into the impression's candidate list
};

struct SampleStats {
  std::size_t instances = 0;
  std::size_t skipped_no_negative = 0;
  std::size_t skipped_no_positive = 0;
};

// One instance per clicked candidate. Negatives are drawn uniformly without
// replacement when at least K exist, otherwise with replacement. Impressions
// without a non-clicked candidate produce nothing and bump the counter.
std::vector<TrainInstance> sample_negatives(const ImpressionRecord& impression, std::size_t impression_index,
                                            std::size_t k, Rng& rng, SampleStats* stats = nullptr);

// Stable descending order of the ranking scores; ties keep input order.
std::vector<std::size_t> rank_by_scores(std::span<const double> scores);

// Test-time ranking. Uses only the user vector and candidate content; no bias
// features reach this function.
std::vector<std::size_t> rank_candidates(std::span<const double> user, const std::vector<Vec>& candidate_contents,
                                         ScoringMode mode);

// The score rank_candidates sorts by.
double ranking_score(double preference, ScoringMode mode);

}  // namespace debiasrec
