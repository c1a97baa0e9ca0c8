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

#include "debiasrec/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "debiasrec/parallel.hpp"

namespace debiasrec {

namespace {

constexpr std::uint64_t kNegStream = 0x4e45;
constexpr std::uint64_t kShuffleStream = 0x5348;
constexpr std::uint64_t kDropoutStream = 0x4452;
constexpr std::size_t kInitialLossSample = 2000;

}  // namespace

std::string format_history_csv(const std::vector<EpochStats>& history) {
  std::string out = "epoch,train_loss,instances,val_auc,val_mrr,val_ndcg5,val_ndcg10\n";
  char buf[256];
  for (const auto& e : history) {
    std::snprintf(buf, sizeof(buf), "%zu,%.10f,%zu,%.10f,%.10f,%.10f,%.10f\n", e.epoch, e.train_loss, e.instances,
                  e.val_auc, e.val_mrr, e.val_ndcg5, e.val_ndcg10);
    out += buf;
  }
  return out;
}

double batch_gradient_serial(const DebiasRecModel& model, const std::vector<ImpressionRecord>& impressions,
                             const NewsTokens& news, std::span<const TrainInstance> batch,
                             std::span<const std::uint64_t> instance_seeds, Grads& out) {
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Rng rng(instance_seeds[i]);
    loss += model.instance_loss(impressions[batch[i].impression], batch[i], news, true, rng, &out);
  }
  return loss;
}

double batch_gradient(const DebiasRecModel& model, const std::vector<ImpressionRecord>& impressions,
                      const NewsTokens& news, std::span<const TrainInstance> batch,
                      std::span<const std::uint64_t> instance_seeds, Grads& out) {
  const std::size_t n = batch.size();
  const int shards = static_cast<int>(std::min<std::size_t>(kGradShards, n));
  if (shards <= 1 || worker_threads() <= 1) {
    // Same shard-wise summation order as the threaded path.
    double loss = 0.0;
    Grads partial = model.params().make_grads();
    for (int s = 0; s < shards; ++s) {
      const std::size_t lo = n * static_cast<std::size_t>(s) / static_cast<std::size_t>(shards);
      const std::size_t hi = n * static_cast<std::size_t>(s + 1) / static_cast<std::size_t>(shards);
      partial.zero();
      loss += batch_gradient_serial(model, impressions, news, batch.subspan(lo, hi - lo),
                                    instance_seeds.subspan(lo, hi - lo), partial);
      out.add(partial);
    }
    return loss;
  }

  std::vector<Grads> partial(static_cast<std::size_t>(shards));
  std::vector<double> losses(static_cast<std::size_t>(shards), 0.0);
  std::vector<std::string> errors(static_cast<std::size_t>(shards));
#pragma omp parallel for schedule(static, 1) num_threads(std::min(worker_threads(), shards))
  for (int s = 0; s < shards; ++s) {
    const auto us = static_cast<std::size_t>(s);
    const std::size_t lo = n * us / static_cast<std::size_t>(shards);
    const std::size_t hi = n * (us + 1) / static_cast<std::size_t>(shards);
    try {
      partial[us] = model.params().make_grads();
      losses[us] = batch_gradient_serial(model, impressions, news, batch.subspan(lo, hi - lo),
                                         instance_seeds.subspan(lo, hi - lo), partial[us]);
    } catch (const std::exception& e) {
      errors[us] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw NumericError(e);
  }
  double loss = 0.0;
  for (std::size_t s = 0; s < partial.size(); ++s) {
    out.add(partial[s]);
    loss += losses[s];
  }
  return loss;
}

Trainer::Trainer(DebiasRecModel& model, const NewsTokens& news, const std::vector<ImpressionRecord>& train,
                 const std::vector<ImpressionRecord>& validation, const TrainConfig& cfg)
    : model_(model), news_(news), train_(train), val_(validation), cfg_(cfg) {
  cfg_.validate();
  if (train_.empty()) throw std::invalid_argument("train: empty dataset");
  adam_.lr = cfg_.lr;
  adam_.validate();
}

std::vector<TrainInstance> Trainer::epoch_instances(std::size_t epoch) {
  std::vector<TrainInstance> out;
  SampleStats stats;
  for (std::size_t i = 0; i < train_.size(); ++i) {
    Rng rng(derive_seed(cfg_.seed, kNegStream + epoch, i));
    for (auto& inst : sample_negatives(train_[i], i, cfg_.negatives, rng, &stats)) out.push_back(std::move(inst));
  }
  Rng shuffle(derive_seed(cfg_.seed, kShuffleStream, epoch));
  shuffle.shuffle(out);
  sampling_ = stats;
  if (out.empty()) throw std::invalid_argument("train: no usable training instances");
  return out;
}

double Trainer::initial_loss() {
  const auto inst = epoch_instances(1);
  const std::size_t n = std::min(inst.size(), kInitialLossSample);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(0);
    total += model_.instance_loss(train_[inst[i].impression], inst[i], news_, false, rng, nullptr);
  }
  return total / static_cast<double>(n);
}

EvalReport Trainer::validate() const {
  if (val_.empty()) return {};
  return evaluate(model_, news_, val_).report;
}

bool Trainer::finished() const { return state_.stopped_early || state_.epochs_done >= cfg_.epochs; }

EpochStats Trainer::run_epoch() {
  const std::size_t epoch = state_.epochs_done + 1;
  const auto instances = epoch_instances(epoch);
  ParamStore& store = model_.params();
  Grads& grads = store.grads();
  grads.zero();

  double loss_sum = 0.0;
  std::vector<std::uint64_t> seeds;
  for (std::size_t start = 0; start < instances.size(); start += cfg_.batch_size) {
    const std::size_t len = std::min(cfg_.batch_size, instances.size() - start);
    std::span<const TrainInstance> batch(instances.data() + start, len);
    seeds.resize(len);
    for (std::size_t i = 0; i < len; ++i) seeds[i] = derive_seed(cfg_.seed, kDropoutStream + epoch, start + i);
    const double batch_loss = batch_gradient(model_, train_, news_, batch, seeds, grads);
    if (!std::isfinite(batch_loss)) {
      throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                         std::to_string(start));
    }
    loss_sum += batch_loss;
    const double scale = 1.0 / static_cast<double>(len);
    for (std::size_t p = 0; p < store.size(); ++p) {
      for (double& g : grads[ParamId{p}].flat()) g *= scale;
    }
    adam_step(store, ++state_.adam_step, adam_);
  }

  EpochStats st;
  st.epoch = epoch;
  st.instances = instances.size();
  st.train_loss = loss_sum / static_cast<double>(instances.size());
  const EvalReport v = validate();
  st.val_auc = v.auc;
  st.val_mrr = v.mrr;
  st.val_ndcg5 = v.ndcg5;
  st.val_ndcg10 = v.ndcg10;

  state_.epochs_done = epoch;
  state_.history.push_back(st);
  if (st.val_auc > state_.best_val_auc) {
    state_.best_val_auc = st.val_auc;
    state_.best_epoch = epoch;
    state_.bad_epochs = 0;
    state_.best_params.clear();
    for (std::size_t p = 0; p < store.size(); ++p) state_.best_params.push_back(store.value(ParamId{p}));
  } else if (++state_.bad_epochs >= cfg_.patience && cfg_.patience > 0) {
    state_.stopped_early = true;
  }
  if (cfg_.verbose) {
    std::fprintf(stderr, "epoch %zu  loss %.5f  val_auc %.4f\n", epoch, st.train_loss, st.val_auc);
  }
  return st;
}

void Trainer::restore_best() {
  if (state_.best_params.empty()) return;
  ParamStore& store = model_.params();
  for (std::size_t p = 0; p < store.size(); ++p) store.value(ParamId{p}) = state_.best_params[p];
}

const TrainState& Trainer::run(const std::function<void(const EpochStats&)>& on_epoch) {
  if (state_.history.empty()) {
    EpochStats e0;
    e0.train_loss = initial_loss();
    e0.instances = std::min(epoch_instances(1).size(), kInitialLossSample);
    const EvalReport v = validate();
    e0.val_auc = v.auc;
    e0.val_mrr = v.mrr;
    e0.val_ndcg5 = v.ndcg5;
    e0.val_ndcg10 = v.ndcg10;
    state_.history.push_back(e0);
    if (on_epoch) on_epoch(e0);
  }
  while (!finished()) {
    const EpochStats st = run_epoch();
    if (on_epoch) on_epoch(st);
  }
  restore_best();
  return state_;
}

}  // namespace debiasrec
