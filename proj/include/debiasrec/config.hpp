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
#include <cstdint>
#include <map>
#include <string>

namespace debiasrec {

// How click scores are formed during training and which score ranks at test time.
enum class ScoringMode {
  Full,      // train on s_b + s_p, rank by s_p
  NoBacp,    // train and rank on s_p
  NoDebias,  // bias features unused anywhere
  Pal,       // p = sigmoid(s_b) * sigmoid(s_p), pointwise loss, rank by sigmoid(s_p)
};

enum class BrmVariant { None, PositionOnly, SizeOnly, LinearConcat, Interaction };

std::string to_string(ScoringMode m);
std::string to_string(BrmVariant v);
ScoringMode parse_scoring_mode(const std::string& s);
BrmVariant parse_brm_variant(const std::string& s);

struct ModelConfig {
  std::size_t word_dim = 300;
  std::size_t filters = 400;
  int window = 3;
  std::size_t attn_dim = 200;
  std::size_t bias_dim = 200;
  std::size_t max_title_len = 30;
  std::size_t max_history = 50;
  int max_position = 400;
  double dropout = 0.2;
  ScoringMode mode = ScoringMode::Full;
  BrmVariant brm = BrmVariant::Interaction;
  bool baum_enabled = true;

  // Bias features reach the network only when this is true.
  bool uses_bias() const { return mode != ScoringMode::NoDebias; }
  bool uses_baum() const { return baum_enabled && uses_bias(); }
  bool uses_bacp() const { return mode == ScoringMode::Full || mode == ScoringMode::Pal; }
  bool uses_brm_params() const { return uses_bias() && brm != BrmVariant::None && (uses_baum() || uses_bacp()); }

  void validate() const;
};

struct TrainConfig {
  double lr = 1e-3;
  std::size_t batch_size = 32;
  std::size_t negatives = 4;
  std::size_t epochs = 5;
  std::size_t patience = 2;
  std::uint64_t seed = 42;
  double val_fraction = 0.2;
  int threads = 0;  // 0: DEBIASREC_THREADS or OpenMP default
  bool verbose = false;

  void validate() const;
};

}  // namespace debiasrec
