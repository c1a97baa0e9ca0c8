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

#include <benchmark/benchmark.h>

#include "debiasrec/commands.hpp"
#include "debiasrec/parallel.hpp"
#include "debiasrec/trainer.hpp"

using namespace debiasrec;

namespace {

// Desk-profile model on a reduced simulated world.
struct Fixture {
  RunConfig cfg = desk_profile();
  Dataset data;
  Vocab vocab;
  NewsTokens tokens;
  std::unique_ptr<DebiasRecModel> model;
  std::vector<TrainInstance> batch;
  std::vector<std::uint64_t> seeds;

  Fixture() {
    cfg.sim.n_users = 100;
    data = simulate_dataset(cfg.sim);
    std::vector<std::string> titles;
    for (const auto& a : data.catalog.articles()) titles.push_back(a.title);
    vocab = build_vocab(titles, 1);
    tokens = tokenize_catalog(data.catalog, vocab, cfg.model.max_title_len);
    model = std::make_unique<DebiasRecModel>(cfg.model, vocab.size());
    model->init(1);
    for (std::size_t i = 0; i < data.behaviors.size() && batch.size() < 256; ++i) {
      Rng rng(i);
      for (auto& inst : sample_negatives(data.behaviors[i], i, cfg.train.negatives, rng)) batch.push_back(inst);
    }
    for (std::size_t i = 0; i < batch.size(); ++i) seeds.push_back(derive_seed(1, 2, i));
  }
};

Fixture& fx() {
  static Fixture f;
  return f;
}

void BM_EncodeCatalogSerial(benchmark::State& state) {
  auto& f = fx();
  for (auto _ : state) benchmark::DoNotOptimize(f.model->encode_catalog_serial(f.tokens));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.tokens.size()));
}

void BM_EncodeCatalog(benchmark::State& state) {
  auto& f = fx();
  set_worker_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(f.model->encode_catalog(f.tokens));
  set_worker_threads(0);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.tokens.size()));
}

void BM_EvaluateSerial(benchmark::State& state) {
  auto& f = fx();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_serial(*f.model, f.tokens, f.data.unbiased));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.data.unbiased.size()));
}

void BM_Evaluate(benchmark::State& state) {
  auto& f = fx();
  set_worker_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(*f.model, f.tokens, f.data.unbiased));
  set_worker_threads(0);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.data.unbiased.size()));
}

void BM_BatchGradientSerial(benchmark::State& state) {
  auto& f = fx();
  Grads g = f.model->params().make_grads();
  for (auto _ : state) {
    g.zero();
    benchmark::DoNotOptimize(batch_gradient_serial(*f.model, f.data.behaviors, f.tokens, f.batch, f.seeds, g));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.batch.size()));
}

void BM_BatchGradient(benchmark::State& state) {
  auto& f = fx();
  set_worker_threads(static_cast<int>(state.range(0)));
  Grads g = f.model->params().make_grads();
  for (auto _ : state) {
    g.zero();
    benchmark::DoNotOptimize(batch_gradient(*f.model, f.data.behaviors, f.tokens, f.batch, f.seeds, g));
  }
  set_worker_threads(0);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.batch.size()));
}

}  // namespace

BENCHMARK(BM_EncodeCatalogSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EncodeCatalog)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Evaluate)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BatchGradientSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchGradient)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
