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

#include <functional>
#include <string>
#include <vector>

#include "debiasrec/param_store.hpp"
#include "debiasrec/rng.hpp"

namespace debiasrec {

// Computes the loss at the store's current values. When `grads` is non-null
// the analytic gradient is accumulated into it.
using LossFn = std::function<double(const ParamStore&, Grads*)>;

struct ParamCheck {
  std::string name;
  std::size_t checked = 0;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
};

struct GradCheckReport {
  std::vector<ParamCheck> params;
  double max_rel_error = 0.0;
  std::string worst_param;

  bool passed(double tolerance) const { return max_rel_error < tolerance; }
};

// |a - n| / max(|a|, |n|, kGradCheckFloor)
inline constexpr double kGradCheckFloor = 1e-6;

// Compares analytic gradients against central differences on up to `sample`
// coordinates per parameter. Coordinates with a non-zero analytic gradient are
// preferred so sparse embedding tables get meaningful coverage.
GradCheckReport grad_check(const LossFn& loss_fn, ParamStore& store, double eps, std::size_t sample,
                           Rng& rng);

}  // namespace debiasrec
