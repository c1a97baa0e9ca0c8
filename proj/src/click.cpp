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

#include "debiasrec/click.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "debiasrec/nn_ops.hpp"

namespace debiasrec {

namespace {

constexpr double kProbFloor = 1e-12;

}  // namespace

Scores score(std::span<const double> user, std::span<const double> content, std::span<const double> bias,
             const BacpView& head, ScoringMode mode) {
  Scores s;
  s.preference = dot(user, content);
  if (mode == ScoringMode::Full || mode == ScoringMode::Pal) {
    s.bias = dot(head.weight, bias) + head.offset;
  }
  if (mode == ScoringMode::Pal) {
    s.preference = sigmoid(s.preference);
    s.bias = sigmoid(s.bias);
    s.click = s.preference * s.bias;
  } else {
    s.click = s.bias + s.preference;
  }
  return s;
}

double softmax_cross_entropy(std::span<const double> scores, std::size_t positive, std::span<double> d_scores) {
  if (positive >= scores.size()) throw std::out_of_range("softmax_cross_entropy: positive index");
  const double mx = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (double s : scores) total += std::exp(s - mx);
  const double log_z = mx + std::log(total);
  if (!d_scores.empty()) {
    require_same(d_scores.size(), scores.size(), "softmax_cross_entropy grad");
    for (std::size_t i = 0; i < scores.size(); ++i) d_scores[i] = std::exp(scores[i] - log_z);
    d_scores[positive] -= 1.0;
  }
  return log_z - scores[positive];
}

double pal_loss(std::span<const double> bias_scores, std::span<const double> pref_scores, std::span<const int> labels,
                std::span<double> d_bias, std::span<double> d_pref) {
  const std::size_t n = labels.size();
  require_same(bias_scores.size(), n, "pal_loss");
  require_same(pref_scores.size(), n, "pal_loss");
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = sigmoid(bias_scores[i]);
    const double g = sigmoid(pref_scores[i]);
    const double p = std::clamp(a * g, kProbFloor, 1.0 - kProbFloor);
    const double y = labels[i];
    loss -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    if (!d_bias.empty()) {
      const double dp = (p - y) / (p * (1.0 - p)) / static_cast<double>(n);
      d_bias[i] = dp * g * a * (1.0 - a);
      d_pref[i] = dp * a * g * (1.0 - g);
    }
  }
  return loss / static_cast<double>(n);
}

double instance_loss(std::span<const double> pref_scores, std::span<const double> bias_scores,
                     std::span<const int> labels, ScoringMode mode) {
  require_same(pref_scores.size(), labels.size(), "instance_loss");
  require_same(bias_scores.size(), labels.size(), "instance_loss");
  if (mode == ScoringMode::Pal) return pal_loss(bias_scores, pref_scores, labels);
  std::size_t positive = labels.size();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      if (positive != labels.size()) throw std::invalid_argument("instance_loss: more than one positive");
      positive = i;
    }
  }
  if (positive == labels.size()) throw std::invalid_argument("instance_loss: no positive");
  std::vector<double> click(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    click[i] = pref_scores[i] + (mode == ScoringMode::Full ? bias_scores[i] : 0.0);
  }
  return softmax_cross_entropy(click, positive);
}

std::vector<TrainInstance> sample_negatives(const ImpressionRecord& impression, std::size_t impression_index,
                                            std::size_t k, Rng& rng, SampleStats* stats) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < impression.candidates.size(); ++i) {
    (impression.candidates[i].label == 1 ? pos : neg).push_back(i);
  }
  std::vector<TrainInstance> out;
  if (pos.empty()) {
    if (stats) ++stats->skipped_no_positive;
    return out;
  }
  if (neg.empty()) {
    if (stats) ++stats->skipped_no_negative;
    return out;
  }
  for (std::size_t p : pos) {
    TrainInstance inst;
    inst.impression = impression_index;
    inst.candidates.reserve(k + 1);
    inst.candidates.push_back(p);
    if (neg.size() >= k) {
      // partial Fisher-Yates
      std::vector<std::size_t> pool = neg;
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t r = j + static_cast<std::size_t>(rng.index(pool.size() - j));
        std::swap(pool[j], pool[r]);
        inst.candidates.push_back(pool[j]);
      }
    } else {
      for (std::size_t j = 0; j < k; ++j) inst.candidates.push_back(neg[rng.index(neg.size())]);
    }
    out.push_back(std::move(inst));
    if (stats) ++stats->instances;
  }
  return out;
}

std::vector<std::size_t> rank_by_scores(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

double ranking_score(double preference, ScoringMode mode) {
  return mode == ScoringMode::Pal ? sigmoid(preference) : preference;
}

std::vector<std::size_t> rank_candidates(std::span<const double> user, const std::vector<Vec>& candidate_contents,
                                         ScoringMode mode) {
  if (candidate_contents.empty()) throw std::invalid_argument("rank_candidates: empty candidate list");
  std::vector<double> s(candidate_contents.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = ranking_score(dot(user, candidate_contents[i].span()), mode);
  return rank_by_scores(s);
}

}  // namespace debiasrec
