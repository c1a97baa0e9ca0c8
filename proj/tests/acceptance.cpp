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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Criteria 4, 5, 7 and 10 share the trained desk-scale runs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "debiasrec/commands.hpp"
#include "debiasrec/evaluation.hpp"
#include "debiasrec/metrics.hpp"
#include "debiasrec/nn_ops.hpp"

using namespace debiasrec;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void progress(const std::string& s) { std::fprintf(stderr, "  .. %s\n", s.c_str()); }

const std::uint64_t kSeeds[] = {1, 2, 3};

// ---------------------------------------------------------------- 1

Verdict gradient_integrity() {
  const auto t0 = std::chrono::steady_clock::now();
  GradCheckRequest req;
  req.cfg = gradcheck_profile();
  req.eps = 1e-5;
  req.tolerance = 1e-4;
  req.sample = 64;
  const GradCheckReport rep = cmd_gradcheck(req);
  const double secs = seconds_since(t0);
  bool every = !rep.params.empty();
  for (const auto& p : rep.params) every = every && p.checked > 0 && p.max_rel_error < 1e-4;
  const auto& m = req.cfg.model;
  const bool shape = m.word_dim == 16 && m.filters == 16 && m.max_history == 4 && m.max_title_len == 8 &&
                     req.cfg.train.negatives == 2;
  return {every && shape && secs < 60.0,
          fmt("%zu params, max rel err %.2e (%s), vocab %zu, %.1fs", rep.params.size(), rep.max_rel_error,
              rep.worst_param.c_str(), req.cfg.sim.vocab_size + 2, secs)};
}

// ---------------------------------------------------------------- 2

std::size_t brute_rank(const std::vector<double>& s, std::size_t i) {
  std::size_t r = 1;
  for (std::size_t j = 0; j < s.size(); ++j) r += (s[j] > s[i] || (s[j] == s[i] && j < i)) ? 1 : 0;
  return r;
}

Verdict metric_oracles() {
  bool ok = true;
  auto v = [](std::initializer_list<double> x) { return std::vector<double>(x); };
  auto l = [](std::initializer_list<int> x) { return std::vector<int>(x); };
  ok = ok && *auc(v({2, 1}), l({1, 0})) == 1.0;
  ok = ok && *auc(v({0.9, 0.8, 0.7}), l({1, 0, 1})) == 0.5;
  ok = ok && *auc(v({1, 1}), l({1, 0})) == 0.5;
  ok = ok && *mrr(v({3, 2, 1}), l({1, 0, 0})) == 1.0;
  ok = ok && *mrr(v({4, 3, 2, 1}), l({0, 1, 0, 0})) == 0.5;
  ok = ok && *mrr(v({3, 1, 2}), l({1, 1, 0})) == (1.0 + 1.0 / 3.0) / 2.0;
  ok = ok && *ndcg_at_k(v({2, 1}), l({1, 0}), 5) == 1.0;
  ok = ok && *ndcg_at_k(v({2, 1}), l({0, 1}), 5) == 1.0 / std::log2(3.0);
  ok = ok && *ndcg_at_k(v({3, 2, 1}), l({0, 0, 1}), 2) == 0.0;
  const bool examples = ok;

  Rng rng(31337);
  double worst = 0.0;
  int instances = 0;
  while (instances < 1000) {
    const std::size_t n = 2 + rng.index(7);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = rng.index(3) == 0 ? 0.5 : rng.uniform();
      y[i] = rng.uniform() < 0.4;
    }
    const int pos = std::accumulate(y.begin(), y.end(), 0);
    if (pos == 0 || pos == static_cast<int>(n)) continue;
    ++instances;
    double good = 0, pairs = 0, rr = 0, dcg5 = 0, idcg5 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!y[i]) continue;
      const std::size_t r = brute_rank(s, i);
      rr += 1.0 / static_cast<double>(r);
      if (r <= 5) dcg5 += 1.0 / std::log2(static_cast<double>(r) + 1.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (y[j]) continue;
        pairs += 1;
        good += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
    }
    for (int i = 1; i <= std::min(pos, 5); ++i) idcg5 += 1.0 / std::log2(i + 1.0);
    worst = std::max({worst, std::abs(*auc(s, y) - good / pairs), std::abs(*mrr(s, y) - rr / pos),
                      std::abs(*ndcg_at_k(s, y, 5) - dcg5 / idcg5)});
  }
  return {examples && worst < 1e-9,
          fmt("worked examples %s, %d random instances, max |diff| %.1e", examples ? "exact" : "MISMATCH", instances,
              worst)};
}

// ---------------------------------------------------------------- 3

Verdict attention_invariants() {
  Rng rng(2718);
  int bad_sum = 0, bad_mask = 0, bad_shift = 0, bad_pool = 0;
  const int cases = 10000;
  for (int t = 0; t < cases; ++t) {
    const std::size_t n = 1 + rng.index(12);
    std::vector<double> logits(n);
    bool mask[12];
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      logits[i] = rng.uniform(-30, 30);
      mask[i] = rng.uniform() < 0.7;
      any = any || mask[i];
    }
    if (!any) mask[rng.index(n)] = true;
    const std::span<const bool> m(mask, n);
    const Vec w = softmax(logits, m);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      total += w[i];
      if (!mask[i] && w[i] != 0.0) ++bad_mask;
    }
    if (std::abs(total - 1.0) > 1e-9) ++bad_sum;

    const double c = rng.uniform(-100, 100);
    std::vector<double> shifted(n);
    for (std::size_t i = 0; i < n; ++i) shifted[i] = logits[i] + c;
    const Vec w2 = softmax(shifted, m);
    auto argmax = [&](const Vec& x) {
      return std::distance(x.values().begin(), std::max_element(x.values().begin(), x.values().end()));
    };
    if (argmax(w) != argmax(w2)) ++bad_shift;

    // masked rows may hold anything without changing the pooled vector
    Mat inputs(n, 3), junk(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < 3; ++k) {
        inputs(i, k) = rng.uniform(-1, 1);
        junk(i, k) = mask[i] ? inputs(i, k) : rng.uniform(-1e3, 1e3);
      }
    }
    Mat proj(2, 3);
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t k = 0; k < 3; ++k) proj(r, k) = rng.uniform(-0.5, 0.5);
    }
    const std::vector<double> bias{0.1, -0.2}, query{0.5, 0.3};
    const AttentionParamsView p{proj, bias, query};
    const AttentionResult a = additive_attention(inputs, p, m);
    const AttentionResult b = additive_attention(junk, p, m);
    if (a.pooled.values() != b.pooled.values()) ++bad_pool;
  }
  return {bad_sum + bad_mask + bad_shift + bad_pool == 0,
          fmt("%d cases: sum violations %d, masked nonzero %d, argmax flips %d, masked-row leaks %d", cases, bad_sum,
              bad_mask, bad_shift, bad_pool)};
}

// ---------------------------------------------------------------- shared runs

struct Run {
  std::string variant;
  std::uint64_t seed = 0;
  double unbiased_auc = 0.0;
  double seconds = 0.0;
  std::shared_ptr<TrainResult> result;  // kept for Full runs only
};

RunConfig desk(std::uint64_t seed, bool biased) {
  RunConfig c = desk_profile();
  c.sim.seed = seed;
  c.train.seed = seed;
  if (!biased) {
    c.sim.eta = 1.0;
    c.sim.size_factors = {1.0, 1.0, 1.0, 1.0};
  }
  return c;
}

Run train_variant(const std::string& name, std::uint64_t seed, bool biased, const Dataset& data) {
  RunConfig c = desk(seed, biased);
  const AblationVariant v = parse_ablation_variant(name);
  c.model.mode = v.mode;
  c.model.baum_enabled = v.baum;
  const auto t0 = std::chrono::steady_clock::now();
  auto tr = std::make_shared<TrainResult>(train_model(c, data));
  Run r{name, seed, tr->unbiased ? tr->unbiased->auc : 0.0, seconds_since(t0), nullptr};
  if (name == "full") r.result = std::move(tr);
  progress(fmt("%s world, seed %llu, %-9s unbiased AUC %.4f (%.0fs)", biased ? "biased" : "no-bias",
               static_cast<unsigned long long>(seed), name.c_str(), r.unbiased_auc, r.seconds));
  return r;
}

double mean_auc(const std::vector<Run>& runs, const std::string& variant) {
  double s = 0;
  int n = 0;
  for (const auto& r : runs) {
    if (r.variant == variant) s += r.unbiased_auc, ++n;
  }
  return s / n;
}

// ---------------------------------------------------------------- 4

Verdict debiasing_contract(const std::vector<Run>& biased) {
  const Run& run = *std::find_if(biased.begin(), biased.end(), [](const Run& r) { return r.variant == "full"; });
  TrainResult& tr = *run.result;
  DebiasRecModel& model = *tr.model;
  const auto& test = tr.split.test;
  const auto base = rank_impressions(model, tr.tokens, test);

  // (a) zero the bias-score head
  ParamStore& ps = model.params();
  const Mat w = ps.value(model.bacp_weight()), b = ps.value(model.bacp_bias());
  ps.value(model.bacp_weight()).fill(0.0);
  ps.value(model.bacp_bias()).fill(0.0);
  const auto zeroed = rank_impressions(model, tr.tokens, test);
  ps.value(model.bacp_weight()) = w;
  ps.value(model.bacp_bias()) = b;
  std::size_t changed_a = 0;
  for (std::size_t i = 0; i < base.size(); ++i) changed_a += zeroed[i] != base[i];

  // (b) permute candidate positions and sizes
  Rng rng(404);
  auto cand = test;
  for (auto& r : cand) {
    std::vector<int> pos;
    std::vector<NewsSize> sz;
    for (const auto& c : r.candidates) pos.push_back(c.bias.position), sz.push_back(c.bias.size);
    rng.shuffle(pos);
    rng.shuffle(sz);
    for (std::size_t j = 0; j < r.candidates.size(); ++j) r.candidates[j].bias = {pos[j], sz[j]};
  }
  const auto cand_ranks = rank_impressions(model, tr.tokens, cand);
  std::size_t changed_b = 0;
  for (std::size_t i = 0; i < base.size(); ++i) changed_b += cand_ranks[i] != base[i];

  // (c) permute history positions and sizes
  auto hist = test;
  for (auto& r : hist) {
    std::vector<int> pos;
    std::vector<NewsSize> sz;
    for (const auto& h : r.history) pos.push_back(h.bias.position), sz.push_back(h.bias.size);
    rng.shuffle(pos);
    rng.shuffle(sz);
    for (std::size_t j = 0; j < r.history.size(); ++j) r.history[j].bias = {pos[j], sz[j]};
  }
  const auto hist_ranks = rank_impressions(model, tr.tokens, hist);
  std::size_t changed_c = 0;
  for (std::size_t i = 0; i < base.size(); ++i) changed_c += hist_ranks[i] != base[i];

  return {changed_a == 0 && changed_b == 0 && changed_c >= 1,
          fmt("%zu test impressions: (a) zeroed head changed %zu, (b) permuted candidate bias changed %zu, "
              "(c) permuted history bias changed %zu",
              base.size(), changed_a, changed_b, changed_c)};
}

// ---------------------------------------------------------------- 7

Verdict bias_score_fidelity(const std::vector<Run>& biased) {
  int good_seeds = 0;
  std::string detail;
  for (const auto& r : biased) {
    if (r.variant != "full") continue;
    const TrainResult& tr = *r.result;
    std::vector<double> pos_sum(6, 0), pos_n(6, 0), size_sum(kNumSizes, 0), size_n(kNumSizes, 0);
    for (const auto& imp : tr.split.test) {
      for (const auto& c : imp.candidates) {
        const double sb = tr.model->bias_score(c.bias);
        if (c.bias.position <= 5) {
          pos_sum[static_cast<std::size_t>(c.bias.position)] += sb;
          pos_n[static_cast<std::size_t>(c.bias.position)] += 1;
        }
        size_sum[static_cast<std::size_t>(c.bias.size)] += sb;
        size_n[static_cast<std::size_t>(c.bias.size)] += 1;
      }
    }
    bool dec = true, inc = true;
    std::string p_str, s_str;
    for (std::size_t p = 1; p <= 5; ++p) {
      p_str += fmt("%s%.3f", p > 1 ? " " : "", pos_sum[p] / pos_n[p]);
      if (p > 1) dec = dec && pos_sum[p] / pos_n[p] < pos_sum[p - 1] / pos_n[p - 1];
    }
    for (std::size_t s = 0; s < kNumSizes; ++s) {
      s_str += fmt("%s%.3f", s ? " " : "", size_sum[s] / size_n[s]);
      if (s > 0) inc = inc && size_sum[s] / size_n[s] > size_sum[s - 1] / size_n[s - 1];
    }
    good_seeds += dec && inc;
    detail += fmt("%sseed %llu pos[%s] size[%s]", detail.empty() ? "" : "; ", static_cast<unsigned long long>(r.seed),
                  p_str.c_str(), s_str.c_str());
  }
  return {good_seeds >= 2, fmt("%d/3 seeds monotone: ", good_seeds) + detail};
}

// ---------------------------------------------------------------- 8

Verdict chi_square_position_size() {
  const ContingencyTable logged{{
      {10989, 12659, 14399, 72671, 46262, 37664, 17379, 63947, 244801, 254513},
      {472250, 283015, 407429, 298987, 279691, 296784, 218015, 93482, 133607, 115277},
      {10893, 10454, 38405, 73495, 51084, 24293, 18094, 11873, 18650, 25685},
      {16876, 5315, 12166, 26533, 34471, 21106, 22500, 10495, 10080, 8620},
  }};
  const ChiSquareResult r = chi_square(logged);
  std::vector<double> rows(4, 0), cols(10, 0);
  double total = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 10; ++j) {
      rows[i] += logged.counts[i][j];
      cols[j] += logged.counts[i][j];
      total += logged.counts[i][j];
    }
  }
  ContingencyTable ind;
  for (std::size_t i = 0; i < 4; ++i) {
    ind.counts.emplace_back();
    for (std::size_t j = 0; j < 10; ++j) ind.counts.back().push_back(rows[i] * cols[j] / total);
  }
  const ChiSquareResult ri = chi_square(ind);
  return {r.significant_at_001 && ri.statistic < ri.critical_001,
          fmt("logged position-size table statistic %.1f (dof %d, critical %.3f, significant %s); outer product statistic %.2e",
              r.statistic, r.dof, r.critical_001, r.significant_at_001 ? "yes" : "no", ri.statistic)};
}

// ---------------------------------------------------------------- 9

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
  for (const auto& e : fs::directory_iterator(a)) {
    const fs::path other = b / e.path().filename();
    if (!fs::exists(other) || read_text_file(e.path().string()) != read_text_file(other.string())) return false;
    ++files;
  }
  return true;
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "debiasrec_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  RunConfig c = desk(1, true);
  c.train.epochs = 1;
  cmd_simulate(c, (root / "sim1").string(), false);
  cmd_simulate(c, (root / "sim2").string(), false);
  std::size_t sim_files = 0, train_files = 0;
  const bool sim_ok = same_tree(root / "sim1", root / "sim2", sim_files);
  cmd_train(c, (root / "sim1").string(), (root / "run1").string(), false);
  cmd_train(c, (root / "sim1").string(), (root / "run2").string(), false);
  const bool train_ok = same_tree(root / "run1", root / "run2", train_files);
  fs::remove_all(root);
  return {sim_ok && train_ok, fmt("simulate: %zu files %s; train: %zu files %s", sim_files,
                                  sim_ok ? "identical" : "DIFFER", train_files, train_ok ? "identical" : "DIFFER")};
}

// ---------------------------------------------------------------- 10

Verdict training_sanity(const std::vector<Run>& biased) {
  const Run& run = *std::find_if(biased.begin(), biased.end(), [](const Run& r) { return r.variant == "full"; });
  const auto& h = run.result->state.history;
  const double k1 = std::log(static_cast<double>(desk_profile().train.negatives + 1));
  const double initial = h.front().train_loss, epoch1 = h.size() > 1 ? h[1].train_loss : initial;
  const double final_loss = h.back().train_loss;
  const double init_gap = std::abs(initial - k1) / k1;
  const double drop = (initial - final_loss) / initial;
  return {init_gap < 0.05 && drop >= 0.20,
          fmt("initial loss %.4f vs ln(K+1) %.4f (%.1f%% off), epoch 1 %.4f, final %.4f after %zu epochs (%.1f%% lower)",
              initial, k1, 100 * init_gap, epoch1, final_loss, h.size() - 1, 100 * drop)};
}

}  // namespace

int main() {
  const auto t_all = std::chrono::steady_clock::now();
  std::map<int, Verdict> verdicts;
  auto report = [&](int id, const char* name, Verdict v) {
    std::printf("criterion %2d %s  %s: %s\n", id, v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
    verdicts[id] = std::move(v);
  };
  auto guarded = [&](int id, const char* name, const std::function<Verdict()>& fn) {
    try {
      report(id, name, fn());
    } catch (const std::exception& e) {
      report(id, name, {false, std::string("exception: ") + e.what()});
    }
  };

  guarded(1, "gradient integrity", gradient_integrity);
  guarded(2, "metric oracles", metric_oracles);
  guarded(3, "attention/softmax invariants", attention_invariants);
  guarded(8, "chi-square", chi_square_position_size);

  std::vector<Run> biased, unbiased_world;
  double grid_secs = 0.0;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t seed : kSeeds) {
      const RunConfig c = desk(seed, true);
      const Dataset data = simulate_dataset(c.sim);
      for (const char* v : {"full", "no_baum", "no_bacp", "no_debias"}) biased.push_back(train_variant(v, seed, true, data));
      const RunConfig u = desk(seed, false);
      const Dataset flat = simulate_dataset(u.sim);
      for (const char* v : {"full", "no_debias"}) unbiased_world.push_back(train_variant(v, seed, false, flat));
    }
    grid_secs = seconds_since(t0);
  } catch (const std::exception& e) {
    std::printf("training grid failed: %s\n", e.what());
  }
  const bool grid = biased.size() == 12 && unbiased_world.size() == 6;

  if (grid) {
    guarded(4, "test-time debiasing contract", [&] { return debiasing_contract(biased); });
    guarded(5, "synthetic debiasing recovery", [&] {
      const SimConfig s = desk(1, true).sim;
      const double full = mean_auc(biased, "full"), nd = mean_auc(biased, "no_debias");
      const double nb = mean_auc(biased, "no_baum"), nc = mean_auc(biased, "no_bacp");
      const bool scale = s.n_news == 2000 && s.n_users == 500 && s.n_users * s.train_impressions_per_user == 20000 &&
                         s.eta == 0.85 && s.size_factors == std::array<double, kNumSizes>{0.5, 0.7, 0.85, 1.0};
      return Verdict{scale && full - nd >= 0.01 && full >= nb && full >= nc,
                     fmt("mean unbiased AUC over 3 seeds: full %.4f, no_debias %.4f (+%.4f), no_baum %.4f, "
                         "no_bacp %.4f; 2000 news, 500 users, 20000 train impressions; grid %.0fs",
                         full, nd, full - nd, nb, nc, grid_secs)};
    });
    guarded(6, "no-bias regime sanity", [&] {
      const double full = mean_auc(unbiased_world, "full"), nd = mean_auc(unbiased_world, "no_debias");
      return Verdict{std::abs(full - nd) < 0.01,
                     fmt("eta = 1, unit size factors, mean unbiased AUC over 3 seeds: full %.4f, no_debias %.4f, "
                         "|diff| %.4f",
                         full, nd, std::abs(full - nd))};
    });
    guarded(7, "bias-score fidelity", [&] { return bias_score_fidelity(biased); });
  } else {
    for (int id : {4, 5, 6, 7}) report(id, "training grid", {false, "training grid did not complete"});
  }
  guarded(9, "determinism", determinism);
  if (grid) {
    guarded(10, "training sanity", [&] { return training_sanity(biased); });
  } else {
    report(10, "training sanity", {false, "training grid did not complete"});
  }

  int failed = 0;
  for (const auto& [id, v] : verdicts) failed += !v.pass;
  std::printf("%d/%zu criteria passed in %.0fs\n", static_cast<int>(verdicts.size()) - failed, verdicts.size(),
              seconds_since(t_all));
  return failed == 0 ? 0 : 1;
}
