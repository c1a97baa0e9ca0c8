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

#include "debiasrec/content_encoder.hpp"

#include <cmath>

namespace debiasrec {

void glorot_init(Mat& m, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  uniform_init(m, limit, rng);
}

void uniform_init(Mat& m, double limit, Rng& rng) {
  for (double& x : m.flat()) x = rng.uniform(-limit, limit);
}

ContentEncoder::ContentEncoder(ParamStore& store, const ModelConfig& cfg, std::size_t vocab_size)
    : word_dim_(cfg.word_dim), filters_(cfg.filters), window_(cfg.window), dropout_(cfg.dropout) {
  embedding_ = store.add("content.word_embedding", vocab_size, cfg.word_dim);
  conv_w_ = store.add("content.conv.weight", cfg.filters, static_cast<std::size_t>(cfg.window) * cfg.word_dim);
  conv_b_ = store.add("content.conv.bias", cfg.filters, 1);
  attn_proj_ = store.add("content.attn.proj", cfg.attn_dim, cfg.filters);
  attn_bias_ = store.add("content.attn.bias", cfg.attn_dim, 1);
  attn_query_ = store.add("content.attn.query", cfg.attn_dim, 1);
}

void ContentEncoder::init(ParamStore& store, Rng& rng) const {
  Mat& emb = store.value(embedding_);
  uniform_init(emb, 0.1, rng);
  for (std::size_t j = 0; j < emb.cols(); ++j) emb(0, j) = 0.0;  // padding row
  Mat& w = store.value(conv_w_);
  glorot_init(w, w.cols(), w.rows(), rng);
  Mat& p = store.value(attn_proj_);
  glorot_init(p, p.cols(), p.rows(), rng);
  Mat& q = store.value(attn_query_);
  glorot_init(q, q.rows(), 1, rng);
}

AttentionParamsView ContentEncoder::attention(const ParamStore& store) const {
  return {store.value(attn_proj_), store.value(attn_bias_).flat(), store.value(attn_query_).flat()};
}

Vec ContentEncoder::forward(const ParamStore& store, std::span<const std::int32_t> tokens, bool training,
                            Rng& rng, Cache* cache) const {
  const std::size_t n = tokens.size();
  if (n == 0) {
    if (cache) *cache = Cache{};
    return Vec(filters_, 0.0);
  }
  const Mat& emb = store.value(embedding_);
  Mat x(n, word_dim_);
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = static_cast<std::size_t>(tokens[i]);
    if (id >= emb.rows()) throw std::out_of_range("token id outside vocabulary");
    std::copy(emb.row(id), emb.row(id) + word_dim_, x.row(i));
  }
  std::vector<double> embed_keep;
  dropout_inplace(x.flat(), dropout_, rng, training, cache ? &embed_keep : nullptr);

  Mat pre;
  Mat h = conv1d_same(x, store.value(conv_w_), store.value(conv_b_).flat(), window_, cache ? &pre : nullptr);
  std::vector<double> hidden_keep;
  dropout_inplace(h.flat(), dropout_, rng, training, cache ? &hidden_keep : nullptr);

  AttentionScoreCache attn_cache;
  AttentionResult att = additive_attention(h, attention(store), std::nullopt, cache ? &attn_cache : nullptr);

  if (cache) {
    cache->tokens.assign(tokens.begin(), tokens.end());
    cache->embedded = std::move(x);
    cache->embed_keep = std::move(embed_keep);
    cache->pre_activation = std::move(pre);
    cache->hidden = std::move(h);
    cache->hidden_keep = std::move(hidden_keep);
    cache->attn = std::move(attn_cache);
    cache->weights = att.weights;
  }
  return std::move(att.pooled);
}

void ContentEncoder::backward(const ParamStore& store, const Cache& cache, std::span<const double> d_content,
                              Grads& grads) const {
  const std::size_t n = cache.tokens.size();
  if (n == 0) return;
  const Mat& h = cache.hidden;

  // pooled = sum_i w_i h_i
  Mat dh(n, filters_);
  Vec dw(n);
  for (std::size_t i = 0; i < n; ++i) {
    axpy(cache.weights[i], d_content, dh.row_span(i));
    dw[i] = dot(d_content, h.row_span(i));
  }
  Vec dscores(n);
  softmax_backward(cache.weights.span(), dw.span(), dscores.span());
  attention_scores_backward(h, attention(store), cache.attn, dscores.span(),
                            {grads[attn_proj_], grads[attn_bias_].flat(), grads[attn_query_].flat()}, &dh);

  // dropout on the CNN output
  auto dhf = dh.flat();
  for (std::size_t j = 0; j < dhf.size(); ++j) dhf[j] *= cache.hidden_keep[j];

  Mat dx(n, word_dim_);
  conv1d_same_backward(cache.embedded, store.value(conv_w_), window_, cache.pre_activation, dh, grads[conv_w_],
                       grads[conv_b_].flat(), &dx);

  auto dxf = dx.flat();
  for (std::size_t j = 0; j < dxf.size(); ++j) dxf[j] *= cache.embed_keep[j];

  Mat& demb = grads[embedding_];
  for (std::size_t i = 0; i < n; ++i) {
    axpy(1.0, dx.row_span(i), demb.row_span(static_cast<std::size_t>(cache.tokens[i])));
  }
}

}  // namespace debiasrec
