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

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "debiasrec/checkpoint.hpp"
#include "debiasrec/evaluation.hpp"
#include "debiasrec/grad_check.hpp"
#include "debiasrec/metrics.hpp"
#include "debiasrec/model.hpp"
#include "debiasrec/run_config.hpp"
#include "debiasrec/trainer.hpp"

namespace debiasrec {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumeric = 3 };

// ConfigError / invalid_argument -> usage, DataError / I/O -> data,
// NumericError -> numerical.
int exit_code_for(const std::exception& e);

// A dataset directory as written by cmd_simulate: news.tsv, behaviors.tsv,
// optional unbiased.tsv and truth sidecar.
struct Dataset {
  NewsCatalog catalog;
  std::vector<ImpressionRecord> behaviors;
  std::vector<ImpressionRecord> unbiased;
  std::optional<std::int64_t> test_start;  // from truth.txt when present
};

Dataset load_dataset(const std::string& dir, int max_position);

// Generates catalog + logs in memory.
Dataset simulate_dataset(const SimConfig& cfg);

struct TrainResult {
  Vocab vocab;
  NewsTokens tokens;
  std::unique_ptr<DebiasRecModel> model;
  DatasetSplit split;
  TrainState state;
  EvalReport test;
  std::optional<EvalReport> unbiased;
  std::int64_t test_start = 0;
};

// Vocabulary, split, training and final evaluation, without touching disk.
// `on_epoch` runs after every epoch (including epoch 0) with the result so
// far, whose model still holds the current (not best) parameters. A
// resumable checkpoint restores parameters, optimizer and trainer state.
TrainResult train_model(const RunConfig& cfg, const Dataset& data,
                        const std::function<void(const TrainResult&, const TrainState&)>& on_epoch = {},
                        const Checkpoint* resume_from = nullptr);

// Parameters plus the training configuration echo.
Checkpoint make_checkpoint(const DebiasRecModel& model, const RunConfig& cfg, const Vocab& vocab,
                           std::int64_t test_start);
// Rebuilds a model (and its config) from a checkpoint. Missing or misshaped
// tensors are a DataError.
std::unique_ptr<DebiasRecModel> model_from_checkpoint(const Checkpoint& ckpt, std::size_t vocab_size,
                                                      RunConfig* cfg_out = nullptr);

// Refuses a non-empty out_dir unless `force`; the parent must exist.
void cmd_simulate(const RunConfig& cfg, const std::string& out_dir, bool force);

// Writes model.ckpt (best validation AUC), last.ckpt (resumable state),
// history.csv, vocab.tsv, test_report.csv, unbiased_report.csv (when the
// dataset has an unbiased log), config.resolved and manifest.txt.
TrainResult cmd_train(const RunConfig& cfg, const std::string& data_dir, const std::string& out_dir, bool resume);

struct EvalRequest {
  std::string checkpoint;
  std::string data;   // behaviors-format file
  std::string news;   // default: news.tsv next to `data`
  std::string vocab;  // default: vocab.tsv next to the checkpoint
  std::string out;    // report CSV (stdout table when empty)
  std::string dump_scores;
  std::string dump_attention;
  std::optional<ScoringMode> expect_mode;
  bool test_window = false;  // keep impressions at or after the checkpoint's test_start
};

EvalReport cmd_eval(const EvalRequest& req);

struct GradCheckRequest {
  RunConfig cfg;
  double eps = 1e-5;
  double tolerance = 1e-4;
  std::size_t sample = 24;  // coordinates per parameter
  std::size_t instances = 4;
  bool corrupt = false;     // negative control: perturb one analytic gradient
};

// Full training loss on a small simulated batch; dropout masks are fixed per
// evaluation so the loss is a deterministic function of the parameters.
GradCheckReport cmd_gradcheck(const GradCheckRequest& req);

// Profile used by gradcheck: dims 16, vocab 200, M = 4, L = 8, K = 2.
RunConfig gradcheck_profile();

struct AnalyzeResult {
  CtrTables ctr;
  ContingencyTable table;
  ChiSquareResult chi;
};

// CTR by position and size plus a size x position chi-square test. Writes
// ctr_position.csv, ctr_size.csv and chi_square.csv into out_dir.
AnalyzeResult cmd_analyze(const std::string& behaviors, const std::string& news, const std::string& out_dir,
                          int max_position);

struct AblationVariant {
  std::string name;  // full, no_baum, no_bacp, no_both, no_debias, pal
  ScoringMode mode = ScoringMode::Full;
  bool baum = true;
};

AblationVariant parse_ablation_variant(const std::string& name);

struct AblationRun {
  std::string variant;
  BrmVariant brm = BrmVariant::Interaction;
  std::uint64_t seed = 0;
  EvalReport test;
  double unbiased_auc = 0.0;
};

struct AblationCell {
  std::string variant;
  BrmVariant brm = BrmVariant::Interaction;
  std::size_t runs = 0;
  std::array<double, 5> mean{};  // auc, mrr, ndcg5, ndcg10, unbiased_auc
  std::array<double, 5> stddev{};
};

std::vector<AblationCell> summarize_ablation(const std::vector<AblationRun>& runs);
std::string format_ablation_csv(const std::vector<AblationCell>& cells);

// Trains variants x brms x repeats (seed, seed + 1, ...). Writes
// ablation.csv (mean and sample std per cell) and ablation_runs.csv.
std::vector<AblationCell> cmd_ablate(const RunConfig& cfg, const std::string& data_dir, const std::string& out_dir,
                                     const std::vector<std::string>& variants,
                                     const std::vector<BrmVariant>& brms, std::size_t repeats);

// "key = value" manifest of command, inputs (with FNV-1a hashes), config and
// code version. Contains no timestamps so reruns are byte-identical.
void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::vector<std::string>& inputs, const RunConfig& cfg);

}  // namespace debiasrec
