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

#include "debiasrec/param_store.hpp"

#include <cmath>
#include <stdexcept>

namespace debiasrec {

void Grads::zero() {
  for (auto& b : buffers_) b.fill(0.0);
}

void Grads::add(const Grads& other) {
  require_same(buffers_.size(), other.buffers_.size(), "Grads::add count");
  for (std::size_t i = 0; i < buffers_.size(); ++i) {
    auto dst = buffers_[i].flat();
    auto src = other.buffers_[i].flat();
    require_same(dst.size(), src.size(), "Grads::add");
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
  }
}

void AdamHyper::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("adam: learning rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw std::invalid_argument("adam: beta1 must be in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw std::invalid_argument("adam: beta2 must be in (0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("adam: epsilon must be positive");
}

ParamId ParamStore::add(const std::string& name, std::size_t rows, std::size_t cols) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  const std::size_t i = values_.size();
  names_.push_back(name);
  index_[name] = i;
  values_.emplace_back(rows, cols);
  grads_.push_back(Mat(rows, cols));
  m_.emplace_back(rows, cols);
  v_.emplace_back(rows, cols);
  return ParamId{i};
}

ParamId ParamStore::id(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
  return ParamId{it->second};
}

Grads ParamStore::make_grads() const {
  Grads g;
  for (const auto& v : values_) g.push_back(Mat(v.rows(), v.cols()));
  return g;
}

std::size_t ParamStore::total_size() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

void adam_step(ParamStore& store, long step, const AdamHyper& hyper) {
  hyper.validate();
  if (step < 1) throw std::invalid_argument("adam: step must be >= 1");
  if (store.grads().size() != store.size()) throw std::logic_error("adam: missing gradient entry");
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < store.size(); ++i) {
    const ParamId id{i};
    auto theta = store.value(id).flat();
    auto g = store.grads()[id].flat();
    auto m = store.first_moment(id).flat();
    auto v = store.second_moment(id).flat();
    if (g.size() != theta.size()) throw std::logic_error("adam: missing gradient entry for " + store.name(id));
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double gj = g[j];
      if (!std::isfinite(gj)) throw NumericError("adam: non-finite gradient in " + store.name(id));
      m[j] = hyper.beta1 * m[j] + (1.0 - hyper.beta1) * gj;
      v[j] = hyper.beta2 * v[j] + (1.0 - hyper.beta2) * gj * gj;
      const double mhat = m[j] / c1;
      const double vhat = v[j] / c2;
      theta[j] -= hyper.lr * mhat / (std::sqrt(vhat) + hyper.epsilon);
      g[j] = 0.0;
    }
  }
}

}  // namespace debiasrec
