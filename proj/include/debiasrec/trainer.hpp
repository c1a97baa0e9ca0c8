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

#include "debiasrec/click.hpp"
#include "debiasrec/evaluation.hpp"
#include "debiasrec/model.hpp"

namespace debiasrec {

struct EpochStats {
  std::size_t epoch = 0;  // 0 is the untrained model
  double train_loss = 0.0;
  std::size_t instances = 0;
  double val_auc = 0.0;
  double val_mrr = 0.0;
  double val_ndcg5 = 0.0;
  double val_ndcg10 = 0.0;
};

std::string format_history_csv(const std::vector<EpochStats>& history);

// Everything needed to resume training exactly where it stopped.
struct TrainState {
  std::size_t epochs_done = 0;
  long adam_step = 0;
  double best_val_auc = -1.0;
  std::size_t best_epoch = 0;
  std::size_t bad_epochs = 0;
  bool stopped_early = false;
  std::vector<Mat> best_params;  // empty until the first validation
  std::vector<EpochStats> history;
};

// Summed loss and gradient of a batch. Instances are split into kGradShards
// contiguous shards whose partial gradients are reduced in shard order, so
// the result does not depend on the thread count.
double batch_gradient(const DebiasRecModel& model, const std::vector<ImpressionRecord>& impressions,
                      const NewsTokens& news, std::span<const TrainInstance> batch,
                      std::span<const std::uint64_t> instance_seeds, Grads& out);

// Single-threaded reference that accumulates instance by instance.
double batch_gradient_serial(const DebiasRecModel& model, const std::vector<ImpressionRecord>& impressions,
                             const NewsTokens& news, std::span<const TrainInstance> batch,
                             std::span<const std::uint64_t> instance_seeds, Grads& out);

// Mini-batch Adam with negative sampling, per-epoch validation and
// best-validation-AUC snapshotting.
class Trainer {
 public:
  Trainer(DebiasRecModel& model, const NewsTokens& news, const std::vector<ImpressionRecord>& train,
          const std::vector<ImpressionRecord>& validation, const TrainConfig& cfg);

  // Trains until cfg.epochs or early stop, then loads the best snapshot into
  // the model. `on_epoch` (optional) sees each epoch's stats.
  const TrainState& run(const std::function<void(const EpochStats&)>& on_epoch = {});

  // Mean eval-mode loss of the epoch-1 instances at the current parameters.
  double initial_loss();

  // One training epoch plus validation. Returns its stats.
  EpochStats run_epoch();

  bool finished() const;
  void restore_best();

  TrainState& state() { return state_; }
  const TrainState& state() const { return state_; }
  const SampleStats& sampling() const { return sampling_; }

  // Instances of a given epoch (negatives re-drawn per epoch), shuffled.
  std::vector<TrainInstance> epoch_instances(std::size_t epoch);

 private:
  EvalReport validate() const;

  DebiasRecModel& model_;
  const NewsTokens& news_;
  const std::vector<ImpressionRecord>& train_;
  const std::vector<ImpressionRecord>& val_;
  TrainConfig cfg_;
  AdamHyper adam_;
  TrainState state_;
  SampleStats sampling_;
};

}  // namespace debiasrec
