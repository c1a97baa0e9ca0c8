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

#include "debiasrec/model.hpp"

#include <algorithm>

#include "debiasrec/parallel.hpp"

namespace debiasrec {

NewsTokens tokenize_catalog(const NewsCatalog& catalog, const Vocab& vocab, std::size_t max_len) {
  NewsTokens out;
  out.titles.reserve(catalog.size());
  for (const auto& a : catalog.articles()) {
    const TitleTokens t = tokenize(a.title, vocab, max_len);
    out.titles.emplace_back(t.ids.begin(), t.ids.begin() + static_cast<std::ptrdiff_t>(t.length));
    if (t.length == 0) ++out.empty_titles;
  }
  return out;
}

std::span<const HistoryEntry> recent_history(const std::vector<HistoryEntry>& history, std::size_t max_history) {
  const std::size_t n = std::min(history.size(), max_history);
  return {history.data() + (history.size() - n), n};
}

namespace {

ModelConfig brm_config(const ModelConfig& cfg) {
  ModelConfig c = cfg;
  if (!cfg.uses_brm_params()) c.brm = BrmVariant::None;
  return c;
}

}  // namespace

DebiasRecModel::DebiasRecModel(const ModelConfig& cfg, std::size_t vocab_size)
    : cfg_(cfg),
      vocab_size_(vocab_size),
      content_(store_, cfg, vocab_size),
      brm_(store_, brm_config(cfg)),
      user_(store_, brm_config(cfg)) {
  cfg_.validate();
  if (brm_.output_dim() != content_.output_dim()) {
    throw ShapeError("bias representation and content vectors must share one dimension");
  }
  if (cfg_.uses_bacp()) {
    bacp_w_ = store_.add("bacp.weight", 1, cfg.filters);
    bacp_b_ = store_.add("bacp.bias", 1, 1);
  }
}

void DebiasRecModel::init(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x1a17));
  content_.init(store_, rng);
  brm_.init(store_, rng);
  user_.init(store_, rng);
  if (bacp_w_.valid()) {
    Mat& w = store_.value(bacp_w_);
    glorot_init(w, w.cols(), 1, rng);
  }
}

BacpView DebiasRecModel::bacp() const {
  if (!bacp_w_.valid()) return {};
  return {store_.value(bacp_w_).flat(), store_.value(bacp_b_)(0, 0)};
}

double DebiasRecModel::instance_loss(const ImpressionRecord& impression, const TrainInstance& inst,
                                     const NewsTokens& news, bool training, Rng& rng, Grads* grads) const {
  const std::size_t f = cfg_.filters;
  const bool bias_aware = user_.bias_aware();
  const bool bacp_on = has_bacp();

  // History.
  const auto hist = recent_history(impression.history, cfg_.max_history);
  const std::size_t m = hist.size();
  std::vector<ContentEncoder::Cache> hist_cc(grads ? m : 0);
  std::vector<BiasRepr::Cache> hist_bc(grads && bias_aware ? m : 0);
  Mat contents(m, f);
  Mat biases(bias_aware ? m : 0, f);
  for (std::size_t i = 0; i < m; ++i) {
    Vec c = content_.forward(store_, news[hist[i].news], training, rng, grads ? &hist_cc[i] : nullptr);
    std::copy(c.begin(), c.end(), contents.row(i));
    if (bias_aware) {
      Vec b = brm_.forward(store_, hist[i].bias, grads ? &hist_bc[i] : nullptr);
      std::copy(b.begin(), b.end(), biases.row(i));
    }
  }
  UserEncoder::Cache ucache;
  const Vec u = user_.forward(store_, contents, bias_aware ? &biases : nullptr, grads ? &ucache : nullptr);

  // Candidates.
  const std::size_t n = inst.candidates.size();
  std::vector<ContentEncoder::Cache> cand_cc(grads ? n : 0);
  std::vector<BiasRepr::Cache> cand_bc(grads && bacp_on ? n : 0);
  std::vector<Vec> cand_c(n);
  std::vector<Vec> cand_b(bacp_on ? n : 0);
  std::vector<double> s_p(n, 0.0);
  std::vector<double> s_b(n, 0.0);
  std::vector<int> labels(n, 0);
  labels[0] = 1;
  const BacpView head = bacp();
  for (std::size_t j = 0; j < n; ++j) {
    const CandidateEntry& cand = impression.candidates.at(inst.candidates[j]);
    cand_c[j] = content_.forward(store_, news[cand.news], training, rng, grads ? &cand_cc[j] : nullptr);
    s_p[j] = dot(u.span(), cand_c[j].span());
    if (bacp_on) {
      cand_b[j] = brm_.forward(store_, cand.bias, grads ? &cand_bc[j] : nullptr);
      s_b[j] = dot(head.weight, cand_b[j].span()) + head.offset;
    }
  }

  std::vector<double> d_p(n, 0.0);
  std::vector<double> d_b(n, 0.0);
  double loss;
  if (cfg_.mode == ScoringMode::Pal) {
    loss = grads ? pal_loss(s_b, s_p, labels, d_b, d_p) : pal_loss(s_b, s_p, labels);
  } else {
    std::vector<double> s_c(n);
    for (std::size_t j = 0; j < n; ++j) s_c[j] = s_p[j] + (cfg_.mode == ScoringMode::Full ? s_b[j] : 0.0);
    loss = softmax_cross_entropy(s_c, 0, grads ? std::span<double>(d_p) : std::span<double>{});
    if (grads && cfg_.mode == ScoringMode::Full) d_b = d_p;
  }
  if (!grads) return loss;

  Grads& g = *grads;
  Vec du(f, 0.0);
  Vec dc(f);
  Vec db(f);
  for (std::size_t j = 0; j < n; ++j) {
    axpy(d_p[j], cand_c[j].span(), du.span());
    dc.fill(0.0);
    axpy(d_p[j], u.span(), dc.span());
    content_.backward(store_, cand_cc[j], dc.span(), g);
    if (bacp_on && d_b[j] != 0.0) {
      axpy(d_b[j], cand_b[j].span(), g[bacp_w_].flat());
      g[bacp_b_](0, 0) += d_b[j];
      db.fill(0.0);
      axpy(d_b[j], head.weight, db.span());
      brm_.backward(store_, cand_bc[j], db.span(), g);
    }
  }

  if (m > 0) {
    Mat d_contents(m, f);
    Mat d_biases(bias_aware ? m : 0, f);
    user_.backward(store_, ucache, du.span(), g, d_contents, bias_aware ? &d_biases : nullptr);
    for (std::size_t i = 0; i < m; ++i) {
      content_.backward(store_, hist_cc[i], d_contents.row_span(i), g);
      if (bias_aware) brm_.backward(store_, hist_bc[i], d_biases.row_span(i), g);
    }
  }
  return loss;
}

Vec DebiasRecModel::encode_news(std::span<const std::int32_t> tokens) const {
  Rng unused(0);
  return content_.forward(store_, tokens, false, unused);
}

Vec DebiasRecModel::bias_vector(const BiasFeatures& f) const { return brm_.forward(store_, f); }

Mat DebiasRecModel::encode_catalog_serial(const NewsTokens& news) const {
  Mat out(news.size(), cfg_.filters);
  for (std::size_t i = 0; i < news.size(); ++i) {
    const Vec c = encode_news(news[i]);
    std::copy(c.begin(), c.end(), out.row(i));
  }
  return out;
}

Mat DebiasRecModel::encode_catalog(const NewsTokens& news) const {
  Mat out(news.size(), cfg_.filters);
  const auto n = static_cast<long>(news.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(worker_threads())
  for (long i = 0; i < n; ++i) {
    const Vec c = encode_news(news[static_cast<std::size_t>(i)]);
    std::copy(c.begin(), c.end(), out.row(static_cast<std::size_t>(i)));
  }
  return out;
}

Vec DebiasRecModel::encode_user(const std::vector<HistoryEntry>& history, const Mat& news_vectors,
                                UserAttention* attention) const {
  const auto hist = recent_history(history, cfg_.max_history);
  const std::size_t f = cfg_.filters;
  const bool bias_aware = user_.bias_aware();
  Mat contents(hist.size(), f);
  Mat biases(bias_aware ? hist.size() : 0, f);
  for (std::size_t i = 0; i < hist.size(); ++i) {
    std::copy(news_vectors.row(hist[i].news), news_vectors.row(hist[i].news) + f, contents.row(i));
    if (bias_aware) {
      const Vec b = brm_.forward(store_, hist[i].bias);
      std::copy(b.begin(), b.end(), biases.row(i));
    }
  }
  if (!attention) return user_.forward(store_, contents, bias_aware ? &biases : nullptr);
  UserEncoder::Cache cache;
  Vec u = user_.forward(store_, contents, bias_aware ? &biases : nullptr, &cache);
  attention->content_scores = std::move(cache.content_scores);
  attention->bias_scores = std::move(cache.bias_scores);
  attention->alpha = std::move(cache.alpha);
  return u;
}

double DebiasRecModel::bias_score(const BiasFeatures& f) const {
  if (!has_bacp()) return 0.0;
  const Vec b = brm_.forward(store_, f);
  const BacpView head = bacp();
  return dot(head.weight, b.span()) + head.offset;
}

}  // namespace debiasrec
