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

#include "debiasrec/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace debiasrec {

namespace {

double finite_loss(const LossFn& fn, const ParamStore& store, Grads* g) {
  const double v = fn(store, g);
  if (!std::isfinite(v)) throw NumericError("grad_check: non-finite loss");
  return v;
}

}  // namespace

GradCheckReport grad_check(const LossFn& loss_fn, ParamStore& store, double eps, std::size_t sample,
                           Rng& rng) {
  Grads analytic = store.make_grads();
  finite_loss(loss_fn, store, &analytic);

  GradCheckReport report;
  for (std::size_t p = 0; p < store.size(); ++p) {
    const ParamId id{p};
    auto theta = store.value(id).flat();
    const auto g = analytic[id].flat();

    std::vector<std::size_t> nonzero;
    std::vector<std::size_t> zero;
    for (std::size_t j = 0; j < g.size(); ++j) (g[j] != 0.0 ? nonzero : zero).push_back(j);
    rng.shuffle(nonzero);
    rng.shuffle(zero);
    std::vector<std::size_t> coords;
    for (std::size_t j = 0; j < nonzero.size() && coords.size() < sample; ++j) coords.push_back(nonzero[j]);
    for (std::size_t j = 0; j < zero.size() && coords.size() < sample; ++j) coords.push_back(zero[j]);

    ParamCheck pc;
    pc.name = store.name(id);
    for (std::size_t j : coords) {
      const double saved = theta[j];
      theta[j] = saved + eps;
      const double up = finite_loss(loss_fn, store, nullptr);
      theta[j] = saved - eps;
      const double down = finite_loss(loss_fn, store, nullptr);
      theta[j] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double abs_err = std::abs(numeric - g[j]);
      const double denom = std::max({std::abs(numeric), std::abs(g[j]), kGradCheckFloor});
      pc.max_abs_error = std::max(pc.max_abs_error, abs_err);
      pc.max_rel_error = std::max(pc.max_rel_error, abs_err / denom);
      ++pc.checked;
    }
    if (pc.max_rel_error >= report.max_rel_error) {
      report.max_rel_error = pc.max_rel_error;
      report.worst_param = pc.name;
    }
    report.params.push_back(std::move(pc));
  }
  return report;
}

}  // namespace debiasrec
