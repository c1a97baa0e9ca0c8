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

#include <optional>
#include <span>
#include <vector>

#include "debiasrec/rng.hpp"
#include "debiasrec/tensor.hpp"

namespace debiasrec {

// Numerically stable softmax. Masked-out entries (mask[i] == false) are
// exactly zero in the output. Throws std::domain_error("empty support") when
// nothing is left unmasked.
Vec softmax(std::span<const double> logits, std::optional<std::span<const bool>> mask = std::nullopt);

// Given y = softmax(x) and dL/dy, accumulates dL/dx into dx.
void softmax_backward(std::span<const double> y, std::span<const double> dy, std::span<double> dx);

// Parameters of one additive attention head: score_i = q . tanh(V h_i + v).
struct AttentionParamsView {
  const Mat& proj;        // V, (attn_dim x input_dim)
  std::span<const double> bias;   // v, attn_dim
  std::span<const double> query;  // q, attn_dim
};

struct AttentionGradsView {
  Mat& proj;
  std::span<double> bias;
  std::span<double> query;
};

// Forward cache for a set of attention scores. Rows of `hidden` are tanh(V h_i + v).
struct AttentionScoreCache {
  Mat hidden;
};

// Pre-softmax scores for every row of `inputs`.
Vec attention_scores(const Mat& inputs, const AttentionParamsView& p, AttentionScoreCache* cache = nullptr);

// Back-propagates dL/dscores. Accumulates into the parameter grads and, when
// non-null, into d_inputs (same shape as inputs).
void attention_scores_backward(const Mat& inputs, const AttentionParamsView& p,
                               const AttentionScoreCache& cache, std::span<const double> d_scores,
                               AttentionGradsView grads, Mat* d_inputs);

struct AttentionResult {
  Vec scores;   // pre-softmax
  Vec weights;  // softmax(scores) over unmasked rows
  Vec pooled;   // sum_i weights_i * inputs_i
};

// Additive attention pooling over the rows of `inputs`.
AttentionResult additive_attention(const Mat& inputs, const AttentionParamsView& p,
                                   std::optional<std::span<const bool>> mask = std::nullopt,
                                   AttentionScoreCache* cache = nullptr);

// Convolution over a sequence (rows of `inputs`) with zero "same" padding.
// filters is (n_filters x window*input_dim); the slice for output i is the
// concatenation of rows i-window/2 .. i+window/2. Output is ReLU(W x + b).
// `pre_activation`, when non-null, receives W x + b.
Mat conv1d_same(const Mat& inputs, const Mat& filters, std::span<const double> bias, int window,
                Mat* pre_activation = nullptr);

// Accumulates grads for conv1d_same given dL/d(output).
void conv1d_same_backward(const Mat& inputs, const Mat& filters, int window, const Mat& pre_activation,
                          const Mat& d_output, Mat& d_filters, std::span<double> d_bias, Mat* d_inputs);

// Inverted dropout. In training mode every entry is zeroed with probability
// `rate` and survivors are scaled by 1/(1-rate); `keep_scale` (when non-null)
// receives the per-entry multiplier so the backward pass can reuse it.
// Evaluation mode is the identity.
void dropout_inplace(std::span<double> x, double rate, Rng& rng, bool training,
                     std::vector<double>* keep_scale = nullptr);

inline double sigmoid(double x) {
  if (x >= 0) {
    const double z = std::exp(-x);
    return 1.0 / (1.0 + z);
  }
  const double z = std::exp(x);
  return z / (1.0 + z);
}

}  // namespace debiasrec
