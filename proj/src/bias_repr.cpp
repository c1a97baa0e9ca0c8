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

#include "debiasrec/bias_repr.hpp"

#include <stdexcept>

#include "debiasrec/content_encoder.hpp"

namespace debiasrec {

std::string size_name(NewsSize s) {
  switch (s) {
    case NewsSize::Mini: return "mini";
    case NewsSize::Small: return "small";
    case NewsSize::Medium: return "medium";
    case NewsSize::Large: return "large";
  }
  throw std::invalid_argument("bad size id");
}

NewsSize parse_size(const std::string& name) {
  if (name == "mini") return NewsSize::Mini;
  if (name == "small") return NewsSize::Small;
  if (name == "medium") return NewsSize::Medium;
  if (name == "large") return NewsSize::Large;
  throw std::invalid_argument("unknown size name: " + name);
}

NewsSize size_from_id(int id) {
  if (id < 0 || id >= kNumSizes) throw std::invalid_argument("size id out of range: " + std::to_string(id));
  return static_cast<NewsSize>(id);
}

namespace {

std::size_t input_blocks(BrmVariant v) {
  switch (v) {
    case BrmVariant::Interaction: return 3;
    case BrmVariant::LinearConcat: return 2;
    case BrmVariant::PositionOnly:
    case BrmVariant::SizeOnly: return 1;
    case BrmVariant::None: return 0;
  }
  return 0;
}

}  // namespace

BiasRepr::BiasRepr(ParamStore& store, const ModelConfig& cfg)
    : variant_(cfg.brm), bias_dim_(cfg.bias_dim), out_dim_(cfg.filters), max_position_(cfg.max_position) {
  if (variant_ == BrmVariant::None) return;
  if (variant_ != BrmVariant::SizeOnly) {
    pos_ = store.add("brm.position_embedding", static_cast<std::size_t>(cfg.max_position) + 1, cfg.bias_dim);
  }
  if (variant_ != BrmVariant::PositionOnly) {
    size_ = store.add("brm.size_embedding", kNumSizes, cfg.bias_dim);
  }
  w_ = store.add("brm.proj.weight", cfg.filters, input_blocks(variant_) * cfg.bias_dim);
  b_ = store.add("brm.proj.bias", cfg.filters, 1);
}

void BiasRepr::init(ParamStore& store, Rng& rng) const {
  if (variant_ == BrmVariant::None) return;
  if (pos_.valid()) {
    Mat& p = store.value(pos_);
    uniform_init(p, 0.1, rng);
    for (std::size_t j = 0; j < p.cols(); ++j) p(0, j) = 0.0;  // sentinel row
  }
  if (size_.valid()) uniform_init(store.value(size_), 0.1, rng);
  Mat& w = store.value(w_);
  glorot_init(w, w.cols(), w.rows(), rng);
  // Start near the multiplicative identity so user pooling begins as plain
  // content pooling.
  store.value(b_).fill(1.0);
}

void BiasRepr::check(const BiasFeatures& f) const {
  if (static_cast<int>(f.size) >= kNumSizes) throw std::invalid_argument("size id out of range");
  if (f.position < 1 || f.position > max_position_) throw std::invalid_argument("position out of range");
}

Vec BiasRepr::forward(const ParamStore& store, const BiasFeatures& f, Cache* cache) const {
  check(f);
  if (variant_ == BrmVariant::None) return Vec(out_dim_, 1.0);

  const std::size_t d = bias_dim_;
  Vec input(input_blocks(variant_) * d);
  const double* ep = pos_.valid() ? store.value(pos_).row(static_cast<std::size_t>(f.position)) : nullptr;
  const double* es = size_.valid() ? store.value(size_).row(static_cast<std::size_t>(f.size)) : nullptr;
  switch (variant_) {
    case BrmVariant::Interaction:
      for (std::size_t j = 0; j < d; ++j) {
        input[j] = ep[j];
        input[d + j] = es[j];
        input[2 * d + j] = ep[j] * es[j];
      }
      break;
    case BrmVariant::LinearConcat:
      for (std::size_t j = 0; j < d; ++j) {
        input[j] = ep[j];
        input[d + j] = es[j];
      }
      break;
    case BrmVariant::PositionOnly:
      for (std::size_t j = 0; j < d; ++j) input[j] = ep[j];
      break;
    case BrmVariant::SizeOnly:
      for (std::size_t j = 0; j < d; ++j) input[j] = es[j];
      break;
    case BrmVariant::None: break;
  }
  Vec out(out_dim_);
  matvec(store.value(w_), input.span(), out.span());
  const auto bias = store.value(b_).flat();
  for (std::size_t k = 0; k < out_dim_; ++k) out[k] += bias[k];
  if (cache) {
    cache->features = f;
    cache->input = std::move(input);
  }
  return out;
}

void BiasRepr::backward(const ParamStore& store, const Cache& cache, std::span<const double> d_bias,
                        Grads& grads) const {
  if (variant_ == BrmVariant::None) return;
  require_same(d_bias.size(), out_dim_, "bias_repr backward");
  outer_acc(grads[w_], d_bias, cache.input.span());
  axpy(1.0, d_bias, grads[b_].flat());

  const std::size_t d = bias_dim_;
  Vec din(cache.input.size());
  matvec_t_acc(store.value(w_), d_bias, din.span());

  double* dep = pos_.valid() ? grads[pos_].row(static_cast<std::size_t>(cache.features.position)) : nullptr;
  double* des = size_.valid() ? grads[size_].row(static_cast<std::size_t>(cache.features.size)) : nullptr;
  switch (variant_) {
    case BrmVariant::Interaction: {
      const double* ep = store.value(pos_).row(static_cast<std::size_t>(cache.features.position));
      const double* es = store.value(size_).row(static_cast<std::size_t>(cache.features.size));
      for (std::size_t j = 0; j < d; ++j) {
        dep[j] += din[j] + din[2 * d + j] * es[j];
        des[j] += din[d + j] + din[2 * d + j] * ep[j];
      }
      break;
    }
    case BrmVariant::LinearConcat:
      for (std::size_t j = 0; j < d; ++j) {
        dep[j] += din[j];
        des[j] += din[d + j];
      }
      break;
    case BrmVariant::PositionOnly:
      for (std::size_t j = 0; j < d; ++j) dep[j] += din[j];
      break;
    case BrmVariant::SizeOnly:
      for (std::size_t j = 0; j < d; ++j) des[j] += din[j];
      break;
    case BrmVariant::None: break;
  }
}

}  // namespace debiasrec
