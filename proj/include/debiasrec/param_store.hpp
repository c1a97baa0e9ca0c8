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

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "debiasrec/tensor.hpp"

namespace debiasrec {

// Handle to a parameter inside a ParamStore.
struct ParamId {
  std::size_t index = static_cast<std::size_t>(-1);
  bool valid() const { return index != static_cast<std::size_t>(-1); }
};

// Gradient buffers shaped like the parameters of one ParamStore.
class Grads {
 public:
  Grads() = default;
  explicit Grads(std::vector<Mat> buffers) : buffers_(std::move(buffers)) {}

  Mat& operator[](ParamId id) { return buffers_.at(id.index); }
  const Mat& operator[](ParamId id) const { return buffers_.at(id.index); }
  std::size_t size() const { return buffers_.size(); }

  void push_back(Mat m) { buffers_.push_back(std::move(m)); }
  void zero();
  // this += other; shapes must agree.
  void add(const Grads& other);

 private:
  std::vector<Mat> buffers_;
};

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

// Named learnable tensors with their gradient accumulators and Adam moments.
// Names are unique; insertion order is the canonical iteration order.
class ParamStore {
 public:
  ParamId add(const std::string& name, std::size_t rows, std::size_t cols);

  ParamId id(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const std::string& name(ParamId id) const { return names_.at(id.index); }
  std::size_t size() const { return values_.size(); }
  ParamId at(std::size_t i) const { return ParamId{i}; }

  Mat& value(ParamId id) { return values_.at(id.index); }
  const Mat& value(ParamId id) const { return values_.at(id.index); }
  Mat& value(const std::string& name) { return value(id(name)); }
  const Mat& value(const std::string& name) const { return value(id(name)); }

  Grads& grads() { return grads_; }
  const Grads& grads() const { return grads_; }
  Mat& first_moment(ParamId id) { return m_.at(id.index); }
  Mat& second_moment(ParamId id) { return v_.at(id.index); }
  const Mat& first_moment(ParamId id) const { return m_.at(id.index); }
  const Mat& second_moment(ParamId id) const { return v_.at(id.index); }

  // Fresh zero-filled gradient buffers with this store's shapes.
  Grads make_grads() const;

  std::size_t total_size() const;

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> index_;
  std::vector<Mat> values_;
  Grads grads_;
  std::vector<Mat> m_;
  std::vector<Mat> v_;
};

// One bias-corrected Adam update for every parameter using store.grads(),
// then zeroes the gradients. `step` is the 1-based update count.
void adam_step(ParamStore& store, long step, const AdamHyper& hyper);

}  // namespace debiasrec
