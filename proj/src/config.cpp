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

#include "debiasrec/config.hpp"

#include <stdexcept>

namespace debiasrec {

std::string to_string(ScoringMode m) {
  switch (m) {
    case ScoringMode::Full: return "full";
    case ScoringMode::NoBacp: return "no_bacp";
    case ScoringMode::NoDebias: return "no_debias";
    case ScoringMode::Pal: return "pal";
  }
  return "?";
}

std::string to_string(BrmVariant v) {
  switch (v) {
    case BrmVariant::None: return "none";
    case BrmVariant::PositionOnly: return "position_only";
    case BrmVariant::SizeOnly: return "size_only";
    case BrmVariant::LinearConcat: return "linear_concat";
    case BrmVariant::Interaction: return "interaction";
  }
  return "?";
}

ScoringMode parse_scoring_mode(const std::string& s) {
  if (s == "full") return ScoringMode::Full;
  if (s == "no_bacp") return ScoringMode::NoBacp;
  if (s == "no_debias") return ScoringMode::NoDebias;
  if (s == "pal") return ScoringMode::Pal;
  throw std::invalid_argument("unknown scoring mode: " + s);
}

BrmVariant parse_brm_variant(const std::string& s) {
  if (s == "none") return BrmVariant::None;
  if (s == "position_only") return BrmVariant::PositionOnly;
  if (s == "size_only") return BrmVariant::SizeOnly;
  if (s == "linear_concat") return BrmVariant::LinearConcat;
  if (s == "interaction") return BrmVariant::Interaction;
  throw std::invalid_argument("unknown brm variant: " + s);
}

void ModelConfig::validate() const {
  if (word_dim == 0 || filters == 0 || attn_dim == 0 || bias_dim == 0)
    throw std::invalid_argument("model dimensions must be positive");
  if (window <= 0 || window % 2 == 0) throw std::invalid_argument("window must be a positive odd number");
  if (max_title_len == 0) throw std::invalid_argument("max_title_len must be positive");
  if (max_history == 0) throw std::invalid_argument("max_history must be positive");
  if (max_position < 1) throw std::invalid_argument("max_position must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must be in [0, 1)");
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  if (negatives == 0) throw std::invalid_argument("negatives must be positive");
  if (epochs == 0) throw std::invalid_argument("epochs must be positive");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw std::invalid_argument("val_fraction must be in (0, 1)");
}

}  // namespace debiasrec
