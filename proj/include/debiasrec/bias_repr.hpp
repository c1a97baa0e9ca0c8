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
#include <string>

#include "debiasrec/config.hpp"
#include "debiasrec/param_store.hpp"
#include "debiasrec/rng.hpp"

namespace debiasrec {

enum class NewsSize : std::uint8_t { Mini = 0, Small = 1, Medium = 2, Large = 3 };
inline constexpr int kNumSizes = 4;

std::string size_name(NewsSize s);
// Throws std::invalid_argument for anything but mini/small/medium/large.
NewsSize parse_size(const std::string& name);
NewsSize size_from_id(int id);

// Presentation of one displayed item.
struct BiasFeatures {
  int position = 1;  // 1-based, clipped to [1, max_position] at ingestion
  NewsSize size = NewsSize::Small;

  friend bool operator==(const BiasFeatures&, const BiasFeatures&) = default;
};

inline int clip_position(long position, int max_position) {
  if (position < 1) return 1;
  if (position > max_position) return max_position;
  return static_cast<int>(position);
}

// Maps (position, size) to a bias vector of the content dimension.
//   Interaction:   b = W [e_p ; e_s ; e_p * e_s] + b_0
//   LinearConcat:  b = W [e_p ; e_s] + b_0
//   PositionOnly:  b = W e_p + b_0
//   SizeOnly:      b = W e_s + b_0
//   None:          b = 1
class BiasRepr {
 public:
  BiasRepr() = default;
  // Registers parameters unless the variant is None.
  BiasRepr(ParamStore& store, const ModelConfig& cfg);

  void init(ParamStore& store, Rng& rng) const;

  struct Cache {
    BiasFeatures features;
    Vec input;  // the vector fed to the projection
  };

  Vec forward(const ParamStore& store, const BiasFeatures& f, Cache* cache = nullptr) const;
  void backward(const ParamStore& store, const Cache& cache, std::span<const double> d_bias, Grads& grads) const;

  BrmVariant variant() const { return variant_; }
  std::size_t output_dim() const { return out_dim_; }

  ParamId position_table() const { return pos_; }
  ParamId size_table() const { return size_; }
  ParamId proj_weight() const { return w_; }
  ParamId proj_bias() const { return b_; }

 private:
  void check(const BiasFeatures& f) const;

  BrmVariant variant_ = BrmVariant::None;
  std::size_t bias_dim_ = 0;
  std::size_t out_dim_ = 0;
  int max_position_ = 1;
  ParamId pos_, size_, w_, b_;
};

}  // namespace debiasrec
