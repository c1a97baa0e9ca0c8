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
#include <span>
#include <vector>

#include "debiasrec/config.hpp"
#include "debiasrec/nn_ops.hpp"
#include "debiasrec/param_store.hpp"

namespace debiasrec {

// Title encoder: word embedding -> dropout -> CNN (ReLU, same padding) ->
// dropout -> additive word attention. Produces a content vector of size
// `filters`.
class ContentEncoder {
 public:
  ContentEncoder() = default;
  ContentEncoder(ParamStore& store, const ModelConfig& cfg, std::size_t vocab_size);

  void init(ParamStore& store, Rng& rng) const;

  struct Cache {
    std::vector<std::int32_t> tokens;
    Mat embedded;  // after dropout
    std::vector<double> embed_keep;
    Mat pre_activation;
    Mat hidden;  // after ReLU and dropout
    std::vector<double> hidden_keep;
    AttentionScoreCache attn;
    Vec weights;
  };

  // Encodes the real (unpadded) tokens of a title. An empty title yields the
  // zero vector.
  Vec forward(const ParamStore& store, std::span<const std::int32_t> tokens, bool training, Rng& rng,
              Cache* cache = nullptr) const;

  void backward(const ParamStore& store, const Cache& cache, std::span<const double> d_content,
                Grads& grads) const;

  std::size_t output_dim() const { return filters_; }

  ParamId embedding() const { return embedding_; }
  ParamId conv_weight() const { return conv_w_; }
  ParamId conv_bias() const { return conv_b_; }
  ParamId attn_proj() const { return attn_proj_; }
  ParamId attn_bias() const { return attn_bias_; }
  ParamId attn_query() const { return attn_query_; }

 private:
  AttentionParamsView attention(const ParamStore& store) const;

  std::size_t word_dim_ = 0;
  std::size_t filters_ = 0;
  int window_ = 3;
  double dropout_ = 0.0;
  ParamId embedding_, conv_w_, conv_b_, attn_proj_, attn_bias_, attn_query_;
};

// Glorot-uniform fill.
void glorot_init(Mat& m, std::size_t fan_in, std::size_t fan_out, Rng& rng);
void uniform_init(Mat& m, double limit, Rng& rng);

}  // namespace debiasrec
