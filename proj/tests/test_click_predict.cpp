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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "debiasrec/click.hpp"
#include "debiasrec/commands.hpp"
#include "debiasrec/trainer.hpp"

using namespace debiasrec;

namespace {

ImpressionRecord impression(std::vector<int> labels) {
  ImpressionRecord r;
  r.impression_id = "I1";
  r.user_id = "U1";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    r.candidates.push_back({i, {static_cast<int>(i) + 1, NewsSize::Small}, labels[i]});
  }
  return r;
}

struct ToyWorld {
  RunConfig cfg = gradcheck_profile();
  Dataset data;
  Vocab vocab;
  NewsTokens tokens;

  explicit ToyWorld(std::size_t users = 6) {
    cfg.sim.n_users = users;
    data = simulate_dataset(cfg.sim);
    std::vector<std::string> titles;
    for (const auto& a : data.catalog.articles()) titles.push_back(a.title);
    vocab = build_vocab(titles, 1);
    tokens = tokenize_catalog(data.catalog, vocab, cfg.model.max_title_len);
  }
};

}  // namespace

TEST_CASE("score decomposition") {
  const std::vector<double> u{0.5, -1.0, 2.0}, c{1.0, 0.25, -0.5}, b{0.3, 0.7, -0.2}, w{1.5, -2.0, 0.5};
  const double sp = 0.5 * 1.0 - 1.0 * 0.25 + 2.0 * -0.5;
  const double sb = 1.5 * 0.3 - 2.0 * 0.7 + 0.5 * -0.2 + 0.1;

  const Scores full = score(u, c, b, {w, 0.1}, ScoringMode::Full);
  CHECK(full.preference == doctest::Approx(sp).epsilon(1e-15));
  CHECK(full.bias == doctest::Approx(sb).epsilon(1e-15));
  CHECK(full.click == doctest::Approx(sp + sb).epsilon(1e-15));

  for (ScoringMode m : {ScoringMode::NoBacp, ScoringMode::NoDebias}) {
    const Scores s = score(u, c, b, {w, 0.1}, m);
    CHECK(s.bias == 0.0);
    CHECK(s.click == s.preference);
  }

  const Scores pal = score(u, c, b, {w, 0.1}, ScoringMode::Pal);
  const double ps = 1.0 / (1.0 + std::exp(-sp)), pb = 1.0 / (1.0 + std::exp(-sb));
  CHECK(pal.preference == doctest::Approx(ps));
  CHECK(pal.bias == doctest::Approx(pb));
  CHECK(pal.click == doctest::Approx(ps * pb));

  const std::vector<double> zw(3, 0.0);
  CHECK(score(u, c, b, {zw, 0.0}, ScoringMode::Full).click == score(u, c, b, {zw, 0.0}, ScoringMode::Full).preference);
  const std::vector<double> zu(3, 0.0);
  const Scores cold = score(zu, c, b, {w, 0.1}, ScoringMode::Full);
  CHECK(cold.preference == 0.0);
  CHECK(cold.click == cold.bias);
}

TEST_CASE("random dot products match the oracle") {
  Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> u(5), c(5), b(5), w(5);
    for (auto* v : {&u, &c, &b, &w})
      for (double& x : *v) x = rng.uniform(-1, 1);
    double sp = 0, sb = -0.3;
    for (int k = 0; k < 5; ++k) {
      sp += u[k] * c[k];
      sb += w[k] * b[k];
    }
    const Scores s = score(u, c, b, {w, -0.3}, ScoringMode::Full);
    CHECK(std::abs(s.preference - sp) < 1e-12);
    CHECK(std::abs(s.bias - sb) < 1e-12);
  }
}

TEST_CASE("sample_negatives") {
  SUBCASE("exactly K negatives are all used") {
    Rng rng(1);
    const auto inst = sample_negatives(impression({0, 1, 0, 0, 0}), 3, 4, rng);
    REQUIRE(inst.size() == 1);
    CHECK(inst[0].impression == 3);
    CHECK(inst[0].candidates[0] == 1);
    const std::set<std::size_t> negs(inst[0].candidates.begin() + 1, inst[0].candidates.end());
    CHECK(negs == std::set<std::size_t>{0, 2, 3, 4});
  }
  SUBCASE("one instance per positive") {
    Rng rng(2);
    const auto inst = sample_negatives(impression({1, 0, 1, 0, 0, 0}), 0, 4, rng);
    REQUIRE(inst.size() == 2);
    CHECK(inst[0].candidates[0] == 0);
    CHECK(inst[1].candidates[0] == 2);
    for (const auto& i : inst) CHECK(i.candidates.size() == 5);
  }
  SUBCASE("fewer than K negatives draw with replacement uniformly") {
    Rng rng(3);
    std::size_t count1 = 0, total = 0;
    for (int t = 0; t < 10000; ++t) {
      const auto inst = sample_negatives(impression({1, 0, 0}), 0, 4, rng);
      REQUIRE(inst[0].candidates.size() == 5);
      for (std::size_t j = 1; j < 5; ++j) {
        const std::size_t c = inst[0].candidates[j];
        REQUIRE((c == 1 || c == 2));
        count1 += c == 1;
        ++total;
      }
    }
    const double p = static_cast<double>(count1) / static_cast<double>(total);
    // binomial sd over 40000 draws is 0.0025
    CHECK(std::abs(p - 0.5) < 0.01);
  }
  SUBCASE("no negatives: skipped and counted") {
    Rng rng(4);
    SampleStats stats;
    CHECK(sample_negatives(impression({1, 1}), 0, 4, rng, &stats).empty());
    CHECK(stats.skipped_no_negative == 1);
    CHECK(sample_negatives(impression({0, 0}), 0, 4, rng, &stats).empty());
    CHECK(stats.skipped_no_positive == 1);
  }
}

TEST_CASE("softmax cross-entropy examples") {
  const std::vector<double> equal(5, 0.3);
  CHECK(softmax_cross_entropy(equal, 2) == doctest::Approx(std::log(5.0)).epsilon(1e-14));
  const std::vector<double> s{2, 0, 0, 0, 0};
  CHECK(softmax_cross_entropy(s, 0) == doctest::Approx(-std::log(std::exp(2.0) / (std::exp(2.0) + 4.0))));
  CHECK(std::abs(softmax_cross_entropy(s, 0) - 0.4326529) < 1e-7);
  const std::vector<double> gap{50, 0, 0, 0, 0};
  CHECK(softmax_cross_entropy(gap, 0) < 1e-20);
  CHECK(softmax_cross_entropy(gap, 0) >= 0.0);

  std::vector<double> d(5);
  softmax_cross_entropy(s, 0, d);
  CHECK(std::abs(std::accumulate(d.begin(), d.end(), 0.0)) < 1e-15);
  CHECK(d[0] < 0.0);
}

TEST_CASE("loss is shift invariant and non-negative") {
  Rng rng(5);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> s(5), shifted(5);
    const double c = rng.uniform(-20, 20);
    for (std::size_t i = 0; i < 5; ++i) {
      s[i] = rng.uniform(-5, 5);
      shifted[i] = s[i] + c;
    }
    const std::size_t pos = rng.index(5);
    const double l = softmax_cross_entropy(s, pos);
    CHECK(l > 0.0);
    CHECK(softmax_cross_entropy(shifted, pos) == doctest::Approx(l).epsilon(1e-9));
  }
}

TEST_CASE("instance_loss per mode") {
  const std::vector<double> sp{1.0, 0.2, -0.5}, sb{0.4, -0.1, 0.3};
  const std::vector<int> labels{1, 0, 0};
  const std::vector<double> sc{1.4, 0.1, -0.2};
  CHECK(instance_loss(sp, sb, labels, ScoringMode::Full) == doctest::Approx(softmax_cross_entropy(sc, 0)));
  CHECK(instance_loss(sp, sb, labels, ScoringMode::NoBacp) == doctest::Approx(softmax_cross_entropy(sp, 0)));
  double bce = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double p = 1.0 / (1.0 + std::exp(-sb[i])) / (1.0 + std::exp(-sp[i]));
    bce += labels[i] ? -std::log(p) : -std::log(1.0 - p);
  }
  CHECK(instance_loss(sp, sb, labels, ScoringMode::Pal) == doctest::Approx(bce / 3.0).epsilon(1e-12));
}

TEST_CASE("ranking") {
  const std::vector<double> two{1.0, 2.0};
  CHECK(rank_by_scores(two) == std::vector<std::size_t>{1, 0});
  const std::vector<double> ties{0.5, 0.5, 0.5};
  CHECK(rank_by_scores(ties) == std::vector<std::size_t>{0, 1, 2});
  CHECK(rank_by_scores(std::vector<double>{}).empty());
  CHECK_THROWS(rank_candidates(two, {}, ScoringMode::Full));

  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> u(4);
    for (double& x : u) x = rng.uniform(-1, 1);
    std::vector<Vec> cands(5, Vec(4));
    std::vector<double> sp(5);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t k = 0; k < 4; ++k) {
        cands[i][k] = rng.uniform(-1, 1);
        sp[i] += u[k] * cands[i][k];
      }
    }
    std::vector<std::size_t> oracle(5);
    std::iota(oracle.begin(), oracle.end(), 0);
    std::stable_sort(oracle.begin(), oracle.end(), [&](std::size_t a, std::size_t b) { return sp[a] > sp[b]; });
    CHECK(rank_candidates(u, cands, ScoringMode::Full) == oracle);
    CHECK(rank_candidates(u, cands, ScoringMode::Pal) == oracle);
  }
}

TEST_CASE("training plumbing") {
  ToyWorld w;
  const auto split = split_dataset(w.data.behaviors, w.cfg.sim.test_start(), 0.2, 1);

  SUBCASE("one epoch on ten impressions") {
    std::vector<ImpressionRecord> tiny;
    for (const auto& r : split.train) {
      if (r.num_clicked() > 0 && r.num_clicked() < r.candidates.size()) tiny.push_back(r);
      if (tiny.size() == 10) break;
    }
    REQUIRE(tiny.size() == 10);
    DebiasRecModel model(w.cfg.model, w.vocab.size());
    model.init(1);
    TrainConfig tc = w.cfg.train;
    tc.epochs = 1;
    Trainer trainer(model, w.tokens, tiny, split.validation, tc);
    const TrainState& st = trainer.run();
    REQUIRE(st.history.size() == 2);
    CHECK(st.history[1].epoch == 1);
    CHECK(std::isfinite(st.history[1].train_loss));
  }

  SUBCASE("empty dataset") {
    DebiasRecModel model(w.cfg.model, w.vocab.size());
    const std::vector<ImpressionRecord> none;
    CHECK_THROWS(Trainer(model, w.tokens, none, split.validation, w.cfg.train));
  }

  SUBCASE("five epochs lower the loss and reruns are bit-identical") {
    TrainConfig tc = w.cfg.train;
    tc.epochs = 5;
    tc.patience = 5;
    tc.lr = 5e-3;
    std::vector<std::vector<Mat>> finals;
    for (int rep = 0; rep < 2; ++rep) {
      DebiasRecModel model(w.cfg.model, w.vocab.size());
      model.init(7);
      Trainer trainer(model, w.tokens, split.train, split.validation, tc);
      const TrainState& st = trainer.run();
      CHECK(st.history.back().train_loss < st.history.front().train_loss);
      std::vector<Mat> params;
      for (std::size_t i = 0; i < model.params().size(); ++i) params.push_back(model.params().value(model.params().at(i)));
      finals.push_back(std::move(params));
    }
    REQUIRE(finals[0].size() == finals[1].size());
    for (std::size_t i = 0; i < finals[0].size(); ++i) CHECK(std::ranges::equal(finals[0][i].flat(), finals[1][i].flat()));
  }
}

TEST_CASE("full-model loss passes the gradient check in every mode") {
  for (ScoringMode m : {ScoringMode::Full, ScoringMode::NoBacp, ScoringMode::NoDebias, ScoringMode::Pal}) {
    CAPTURE(to_string(m));
    GradCheckRequest req;
    req.cfg = gradcheck_profile();
    req.cfg.model.mode = m;
    req.sample = 8;
    const GradCheckReport rep = cmd_gradcheck(req);
    CHECK(rep.passed(1e-4));
  }
  GradCheckRequest bad;
  bad.cfg = gradcheck_profile();
  bad.sample = 8;
  bad.corrupt = true;
  CHECK_FALSE(cmd_gradcheck(bad).passed(1e-4));
}
