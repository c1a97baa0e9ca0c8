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

#include "debiasrec/nn_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace debiasrec {

Vec softmax(std::span<const double> logits, std::optional<std::span<const bool>> mask) {
  if (logits.empty()) throw std::domain_error("empty support");
  if (mask) require_same(mask->size(), logits.size(), "softmax mask");
  auto live = [&](std::size_t i) { return !mask || (*mask)[i]; };

  double mx = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!live(i)) continue;
    if (!std::isfinite(logits[i])) throw NumericError("softmax: non-finite logit");
    mx = std::max(mx, logits[i]);
    any = true;
  }
  if (!any) throw std::domain_error("empty support");

  Vec out(logits.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!live(i)) continue;
    out[i] = std::exp(logits[i] - mx);
    total += out[i];
  }
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] /= total;
  return out;
}

void softmax_backward(std::span<const double> y, std::span<const double> dy, std::span<double> dx) {
  require_same(y.size(), dy.size(), "softmax_backward");
  require_same(y.size(), dx.size(), "softmax_backward");
  double inner = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) inner += y[i] * dy[i];
  for (std::size_t i = 0; i < y.size(); ++i) dx[i] += y[i] * (dy[i] - inner);
}

Vec attention_scores(const Mat& inputs, const AttentionParamsView& p, AttentionScoreCache* cache) {
  const std::size_t n = inputs.rows();
  const std::size_t a = p.proj.rows();
  require_same(p.proj.cols(), inputs.cols(), "attention input dim");
  require_same(p.bias.size(), a, "attention bias");
  require_same(p.query.size(), a, "attention query");

  Mat hidden(n, a);
  Vec scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    double* h = hidden.row(i);
    matvec(p.proj, inputs.row_span(i), hidden.row_span(i));
    double s = 0.0;
    for (std::size_t k = 0; k < a; ++k) {
      h[k] = std::tanh(h[k] + p.bias[k]);
      s += p.query[k] * h[k];
    }
    scores[i] = s;
  }
  if (cache) cache->hidden = std::move(hidden);
  return scores;
}

void attention_scores_backward(const Mat& inputs, const AttentionParamsView& p,
                               const AttentionScoreCache& cache, std::span<const double> d_scores,
                               AttentionGradsView grads, Mat* d_inputs) {
  const std::size_t n = inputs.rows();
  const std::size_t a = p.proj.rows();
  require_same(d_scores.size(), n, "attention d_scores");
  std::vector<double> d_pre(a);
  for (std::size_t i = 0; i < n; ++i) {
    const double ds = d_scores[i];
    if (ds == 0.0) continue;
    const double* h = cache.hidden.row(i);
    for (std::size_t k = 0; k < a; ++k) {
      grads.query[k] += ds * h[k];
      d_pre[k] = ds * p.query[k] * (1.0 - h[k] * h[k]);
      grads.bias[k] += d_pre[k];
    }
    outer_acc(grads.proj, d_pre, inputs.row_span(i));
    if (d_inputs) matvec_t_acc(p.proj, d_pre, d_inputs->row_span(i));
  }
}

AttentionResult additive_attention(const Mat& inputs, const AttentionParamsView& p,
                                   std::optional<std::span<const bool>> mask,
                                   AttentionScoreCache* cache) {
  AttentionResult r;
  r.scores = attention_scores(inputs, p, cache);
  r.weights = softmax(r.scores.span(), mask);
  r.pooled = Vec(inputs.cols(), 0.0);
  for (std::size_t i = 0; i < inputs.rows(); ++i) {
    if (r.weights[i] == 0.0) continue;
    axpy(r.weights[i], inputs.row_span(i), r.pooled.span());
  }
  return r;
}

Mat conv1d_same(const Mat& inputs, const Mat& filters, std::span<const double> bias, int window,
                Mat* pre_activation) {
  if (inputs.rows() == 0) throw std::invalid_argument("conv1d_same: empty sequence");
  if (window <= 0 || window % 2 == 0) throw std::invalid_argument("conv1d_same: window must be odd");
  const std::size_t n = inputs.rows();
  const std::size_t d = inputs.cols();
  const std::size_t f = filters.rows();
  require_same(filters.cols(), static_cast<std::size_t>(window) * d, "conv1d_same filters");
  require_same(bias.size(), f, "conv1d_same bias");
  const int half = window / 2;

  Mat pre(n, f);
  Mat out(n, f);
  for (std::size_t i = 0; i < n; ++i) {
    double* z = pre.row(i);
    for (std::size_t k = 0; k < f; ++k) z[k] = bias[k];
    for (int o = -half; o <= half; ++o) {
      const long src = static_cast<long>(i) + o;
      if (src < 0 || src >= static_cast<long>(n)) continue;  // zero padding
      const double* x = inputs.row(static_cast<std::size_t>(src));
      const std::size_t off = static_cast<std::size_t>(o + half) * d;
      for (std::size_t k = 0; k < f; ++k) {
        const double* w = filters.row(k) + off;
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += w[j] * x[j];
        z[k] += s;
      }
    }
    double* y = out.row(i);
    for (std::size_t k = 0; k < f; ++k) y[k] = z[k] > 0.0 ? z[k] : 0.0;
  }
  if (pre_activation) *pre_activation = std::move(pre);
  return out;
}

void conv1d_same_backward(const Mat& inputs, const Mat& filters, int window, const Mat& pre_activation,
                          const Mat& d_output, Mat& d_filters, std::span<double> d_bias, Mat* d_inputs) {
  const std::size_t n = inputs.rows();
  const std::size_t d = inputs.cols();
  const std::size_t f = filters.rows();
  const int half = window / 2;
  std::vector<double> dz(f);
  for (std::size_t i = 0; i < n; ++i) {
    const double* z = pre_activation.row(i);
    const double* dy = d_output.row(i);
    bool any = false;
    for (std::size_t k = 0; k < f; ++k) {
      dz[k] = z[k] > 0.0 ? dy[k] : 0.0;
      d_bias[k] += dz[k];
      any = any || dz[k] != 0.0;
    }
    if (!any) continue;
    for (int o = -half; o <= half; ++o) {
      const long src = static_cast<long>(i) + o;
      if (src < 0 || src >= static_cast<long>(n)) continue;
      const double* x = inputs.row(static_cast<std::size_t>(src));
      double* dx = d_inputs ? d_inputs->row(static_cast<std::size_t>(src)) : nullptr;
      const std::size_t off = static_cast<std::size_t>(o + half) * d;
      for (std::size_t k = 0; k < f; ++k) {
        const double g = dz[k];
        if (g == 0.0) continue;
        double* dw = d_filters.row(k) + off;
        for (std::size_t j = 0; j < d; ++j) dw[j] += g * x[j];
        if (dx) {
          const double* w = filters.row(k) + off;
          for (std::size_t j = 0; j < d; ++j) dx[j] += g * w[j];
        }
      }
    }
  }
}

void dropout_inplace(std::span<double> x, double rate, Rng& rng, bool training,
                     std::vector<double>* keep_scale) {
  if (!(rate >= 0.0) || rate >= 1.0) throw std::invalid_argument("dropout rate must be in [0, 1)");
  if (keep_scale) keep_scale->assign(x.size(), 1.0);
  if (!training || rate == 0.0) return;
  const double scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = rng.uniform() < rate ? 0.0 : scale;
    x[i] *= m;
    if (keep_scale) (*keep_scale)[i] = m;
  }
}

}  // namespace debiasrec
