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

#include "debiasrec/config.hpp"
#include "debiasrec/nn_ops.hpp"
#include "debiasrec/param_store.hpp"

namespace debiasrec {

// Bias-aware user modeling over the clicked history.
//
// With the bias path on:   alpha = softmax(a_c + a_b),  u = sum_i alpha_i (b_i * c_i)
// With the bias path off:  alpha = softmax(a_c),        u = sum_i alpha_i c_i
// where a_c = q_c . tanh(V_c c_i + v_c) and a_b = q_b . tanh(V_b b_i + v_b).
class UserEncoder {
 public:
  UserEncoder() = default;
  UserEncoder(ParamStore& store, const ModelConfig& cfg);

  void init(ParamStore& store, Rng& rng) const;

  // True when bias vectors modulate the user vector (BAUM on).
  bool bias_aware() const { return bias_aware_; }
  // True when the bias attention scores a_b are computed. They are skipped
  // when the bias vector is the constant ones vector, since a constant shift
  // leaves the softmax unchanged.
  bool bias_attention() const { return bias_attention_; }

  struct Cache {
    Mat contents;
    Mat biases;
    AttentionScoreCache content_attn;
    AttentionScoreCache bias_attn;
    Vec content_scores;
    Vec bias_scores;
    Vec alpha;
  };

  // contents and biases are (history_len x F). `biases` is ignored unless
  // bias_aware(). An empty history yields the zero vector.
  Vec forward(const ParamStore& store, const Mat& contents, const Mat* biases, Cache* cache = nullptr) const;

  // Accumulates parameter grads and dL/d(contents), dL/d(biases).
  void backward(const ParamStore& store, const Cache& cache, std::span<const double> d_user, Grads& grads,
                Mat& d_contents, Mat* d_biases) const;

  ParamId content_proj() const { return c_proj_; }
  ParamId bias_proj() const { return b_proj_; }

 private:
  AttentionParamsView content_view(const ParamStore& store) const;
  AttentionParamsView bias_view(const ParamStore& store) const;

  std::size_t dim_ = 0;
  bool bias_aware_ = false;
  bool bias_attention_ = false;
  ParamId c_proj_, c_bias_, c_query_;
  ParamId b_proj_, b_bias_, b_query_;
};

}  // namespace debiasrec
