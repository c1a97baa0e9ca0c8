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

#include "debiasrec/bias_repr.hpp"
#include "debiasrec/click.hpp"
#include "debiasrec/config.hpp"
#include "debiasrec/content_encoder.hpp"
#include "debiasrec/dataio.hpp"
#include "debiasrec/param_store.hpp"
#include "debiasrec/user_encoder.hpp"
#include "debiasrec/vocab.hpp"

namespace debiasrec {

// Real (unpadded) token ids of every catalog article, truncated to max_len.
struct NewsTokens {
  std::vector<std::vector<std::int32_t>> titles;
  std::size_t empty_titles = 0;

  std::span<const std::int32_t> operator[](std::size_t news) const { return titles.at(news); }
  std::size_t size() const { return titles.size(); }
};

NewsTokens tokenize_catalog(const NewsCatalog& catalog, const Vocab& vocab, std::size_t max_len);

// The last `max_history` entries of a click history.
std::span<const HistoryEntry> recent_history(const std::vector<HistoryEntry>& history, std::size_t max_history);

// The full network: content encoder, bias representation, bias-aware user
// encoder and bias-aware click predictor, all sharing one ParamStore.
class DebiasRecModel {
 public:
  DebiasRecModel(const ModelConfig& cfg, std::size_t vocab_size);

  DebiasRecModel(const DebiasRecModel&) = delete;
  DebiasRecModel& operator=(const DebiasRecModel&) = delete;

  void init(std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  std::size_t vocab_size() const { return vocab_size_; }
  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }

  const ContentEncoder& content() const { return content_; }
  const BiasRepr& bias_repr() const { return brm_; }
  const UserEncoder& user() const { return user_; }
  bool has_bacp() const { return bacp_w_.valid(); }
  ParamId bacp_weight() const { return bacp_w_; }
  ParamId bacp_bias() const { return bacp_b_; }
  BacpView bacp() const;

  // Loss of one training instance. When `grads` is non-null the gradient
  // of that loss is accumulated into it. Dropout is active when `training`.
  double instance_loss(const ImpressionRecord& impression, const TrainInstance& inst, const NewsTokens& news,
                       bool training, Rng& rng, Grads* grads) const;

  // Evaluation-mode encoders (no dropout).
  Vec encode_news(std::span<const std::int32_t> tokens) const;
  Vec bias_vector(const BiasFeatures& f) const;

  // Content vectors of every catalog article, one row per news.
  Mat encode_catalog(const NewsTokens& news) const;
  Mat encode_catalog_serial(const NewsTokens& news) const;

  struct UserAttention {
    Vec content_scores;
    Vec bias_scores;  // empty when the bias path is off
    Vec alpha;
  };
  // User vector from the (truncated) click history and precomputed news
  // vectors. Empty history gives the zero vector.
  Vec encode_user(const std::vector<HistoryEntry>& history, const Mat& news_vectors,
                  UserAttention* attention = nullptr) const;

  // Bias score s_b of a displayed item (0 when there is no BACP head).
  double bias_score(const BiasFeatures& f) const;

 private:
  ModelConfig cfg_;
  std::size_t vocab_size_;
  ParamStore store_;
  ContentEncoder content_;
  BiasRepr brm_;
  UserEncoder user_;
  ParamId bacp_w_, bacp_b_;
};

}  // namespace debiasrec
