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

#include "debiasrec/user_encoder.hpp"

#include "debiasrec/content_encoder.hpp"

namespace debiasrec {

UserEncoder::UserEncoder(ParamStore& store, const ModelConfig& cfg)
    : dim_(cfg.filters),
      bias_aware_(cfg.uses_baum()),
      bias_attention_(cfg.uses_baum() && cfg.brm != BrmVariant::None) {
  c_proj_ = store.add("baum.content_attn.proj", cfg.attn_dim, cfg.filters);
  c_bias_ = store.add("baum.content_attn.bias", cfg.attn_dim, 1);
  c_query_ = store.add("baum.content_attn.query", cfg.attn_dim, 1);
  if (bias_attention_) {
    b_proj_ = store.add("baum.bias_attn.proj", cfg.attn_dim, cfg.filters);
    b_bias_ = store.add("baum.bias_attn.bias", cfg.attn_dim, 1);
    b_query_ = store.add("baum.bias_attn.query", cfg.attn_dim, 1);
  }
}

void UserEncoder::init(ParamStore& store, Rng& rng) const {
  Mat& cp = store.value(c_proj_);
  glorot_init(cp, cp.cols(), cp.rows(), rng);
  Mat& cq = store.value(c_query_);
  glorot_init(cq, cq.rows(), 1, rng);
  if (bias_attention_) {
    Mat& bp = store.value(b_proj_);
    glorot_init(bp, bp.cols(), bp.rows(), rng);
    Mat& bq = store.value(b_query_);
    glorot_init(bq, bq.rows(), 1, rng);
  }
}

AttentionParamsView UserEncoder::content_view(const ParamStore& store) const {
  return {store.value(c_proj_), store.value(c_bias_).flat(), store.value(c_query_).flat()};
}

AttentionParamsView UserEncoder::bias_view(const ParamStore& store) const {
  return {store.value(b_proj_), store.value(b_bias_).flat(), store.value(b_query_).flat()};
}

Vec UserEncoder::forward(const ParamStore& store, const Mat& contents, const Mat* biases, Cache* cache) const {
  const std::size_t m = contents.rows();
  Vec u(dim_, 0.0);
  if (m == 0) {
    if (cache) *cache = Cache{};
    return u;
  }
  require_same(contents.cols(), dim_, "user history content dim");
  if (bias_aware_) {
    if (!biases) throw std::invalid_argument("bias-aware user encoder needs bias vectors");
    require_same(biases->rows(), m, "user history bias rows");
    require_same(biases->cols(), dim_, "user history bias dim");
  }

  AttentionScoreCache c_cache;
  AttentionScoreCache b_cache;
  Vec a_c = attention_scores(contents, content_view(store), cache ? &c_cache : nullptr);
  Vec a_b;
  Vec fused = a_c;
  if (bias_attention_) {
    a_b = attention_scores(*biases, bias_view(store), cache ? &b_cache : nullptr);
    for (std::size_t i = 0; i < m; ++i) fused[i] += a_b[i];
  }
  Vec alpha = softmax(fused.span());

  for (std::size_t i = 0; i < m; ++i) {
    const double* c = contents.row(i);
    if (bias_aware_) {
      const double* b = biases->row(i);
      for (std::size_t k = 0; k < dim_; ++k) u[k] += alpha[i] * (b[k] * c[k]);
    } else {
      for (std::size_t k = 0; k < dim_; ++k) u[k] += alpha[i] * c[k];
    }
  }
  if (cache) {
    cache->contents = contents;
    if (bias_aware_) cache->biases = *biases;
    cache->content_attn = std::move(c_cache);
    cache->bias_attn = std::move(b_cache);
    cache->content_scores = std::move(a_c);
    cache->bias_scores = std::move(a_b);
    cache->alpha = std::move(alpha);
  }
  return u;
}

void UserEncoder::backward(const ParamStore& store, const Cache& cache, std::span<const double> d_user,
                           Grads& grads, Mat& d_contents, Mat* d_biases) const {
  const std::size_t m = cache.contents.rows();
  if (m == 0) return;
  Vec d_alpha(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* c = cache.contents.row(i);
    double* dc = d_contents.row(i);
    const double a = cache.alpha[i];
    double s = 0.0;
    if (bias_aware_) {
      const double* b = cache.biases.row(i);
      double* db = d_biases->row(i);
      for (std::size_t k = 0; k < dim_; ++k) {
        s += d_user[k] * b[k] * c[k];
        dc[k] += a * d_user[k] * b[k];
        db[k] += a * d_user[k] * c[k];
      }
    } else {
      for (std::size_t k = 0; k < dim_; ++k) {
        s += d_user[k] * c[k];
        dc[k] += a * d_user[k];
      }
    }
    d_alpha[i] = s;
  }
  Vec d_scores(m);
  softmax_backward(cache.alpha.span(), d_alpha.span(), d_scores.span());
  attention_scores_backward(cache.contents, content_view(store), cache.content_attn, d_scores.span(),
                            {grads[c_proj_], grads[c_bias_].flat(), grads[c_query_].flat()}, &d_contents);
  if (bias_attention_) {
    attention_scores_backward(cache.biases, bias_view(store), cache.bias_attn, d_scores.span(),
                              {grads[b_proj_], grads[b_bias_].flat(), grads[b_query_].flat()}, d_biases);
  }
}

}  // namespace debiasrec
