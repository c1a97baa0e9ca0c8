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

#include <cmath>
#include <vector>

#include "debiasrec/grad_check.hpp"
#include "debiasrec/nn_ops.hpp"
#include "debiasrec/param_store.hpp"

using namespace debiasrec;

namespace {

Mat random_mat(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
  Mat m(r, c);
  for (double& x : m.flat()) x = rng.uniform(-scale, scale);
  return m;
}

// Scalar-loop reference for q . tanh(V h + v) followed by softmax pooling.
void attention_oracle(const std::vector<std::vector<double>>& h, const std::vector<std::vector<double>>& V,
                      const std::vector<double>& v, const std::vector<double>& q, std::vector<double>& weights,
                      std::vector<double>& pooled) {
  std::vector<double> s(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    double acc = 0.0;
    for (std::size_t a = 0; a < V.size(); ++a) {
      double z = v[a];
      for (std::size_t j = 0; j < h[i].size(); ++j) z += V[a][j] * h[i][j];
      acc += q[a] * std::tanh(z);
    }
    s[i] = acc;
  }
  double total = 0.0;
  weights.assign(h.size(), 0.0);
  for (std::size_t i = 0; i < h.size(); ++i) total += (weights[i] = std::exp(s[i]));
  for (double& w : weights) w /= total;
  pooled.assign(h[0].size(), 0.0);
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = 0; j < h[i].size(); ++j) pooled[j] += weights[i] * h[i][j];
  }
}

}  // namespace

TEST_CASE("softmax examples") {
  const Vec a = softmax(std::vector<double>{0.0, 0.0});
  CHECK(a[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a[1] == doctest::Approx(0.5).epsilon(1e-15));

  for (double x : {-700.0, 0.0, 3.5, 800.0}) {
    const Vec s = softmax(std::vector<double>{x});
    CHECK(s[0] == 1.0);
  }

  const Vec b = softmax(std::vector<double>{1.0, 2.0, 3.0});
  CHECK(b[0] == doctest::Approx(0.09003057).epsilon(1e-7));
  CHECK(b[1] == doctest::Approx(0.24472847).epsilon(1e-7));
  CHECK(b[2] == doctest::Approx(0.66524096).epsilon(1e-7));
}

TEST_CASE("softmax mask and empty support") {
  const bool mask[3] = {true, false, true};
  const Vec s = softmax(std::vector<double>{1.0, 50.0, 1.0}, std::span<const bool>(mask, 3));
  CHECK(s[1] == 0.0);
  CHECK(s[0] == doctest::Approx(0.5));
  const bool none[2] = {false, false};
  CHECK_THROWS_WITH_AS(softmax(std::vector<double>{1.0, 2.0}, std::span<const bool>(none, 2)), "empty support",
                       std::domain_error);
  CHECK_THROWS_AS(softmax(std::vector<double>{}), std::domain_error);
}

TEST_CASE("softmax sums to one and is shift invariant") {
  Rng rng(11);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> x(1 + rng.index(12));
    for (double& v : x) v = rng.uniform(-30, 30);
    const Vec y = softmax(x);
    double total = 0.0;
    for (double v : y) total += v;
    CHECK(std::abs(total - 1.0) < 1e-9);
    std::vector<double> shifted = x;
    const double c = rng.uniform(-100, 100);
    for (double& v : shifted) v += c;
    const Vec z = softmax(shifted);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(y[i] - z[i]) < 1e-12);
  }
}

TEST_CASE("additive attention") {
  Rng rng(5);
  SUBCASE("single input") {
    Mat h = random_mat(1, 4, rng);
    Mat V = random_mat(3, 4, rng);
    std::vector<double> v{0.1, -0.2, 0.3}, q{0.5, 0.5, -1.0};
    const auto r = additive_attention(h, {V, v, q});
    CHECK(r.weights[0] == 1.0);
    for (std::size_t j = 0; j < 4; ++j) CHECK(r.pooled[j] == h(0, j));
  }
  SUBCASE("zero projection gives uniform weights and the mean") {
    Mat h = random_mat(5, 4, rng);
    Mat V(3, 4, 0.0);
    std::vector<double> v(3, 0.0), q{2.0, -7.0, 1.0};
    const auto r = additive_attention(h, {V, v, q});
    for (std::size_t i = 0; i < 5; ++i) CHECK(r.weights[i] == doctest::Approx(0.2).epsilon(1e-14));
    for (std::size_t j = 0; j < 4; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < 5; ++i) mean += h(i, j) / 5.0;
      CHECK(r.pooled[j] == doctest::Approx(mean).epsilon(1e-13));
    }
  }
  SUBCASE("matches scalar oracle") {
    Mat h = random_mat(3, 4, rng);
    Mat V = random_mat(5, 4, rng);
    std::vector<double> v(5), q(5);
    for (double& x : v) x = rng.uniform(-1, 1);
    for (double& x : q) x = rng.uniform(-1, 1);
    std::vector<std::vector<double>> hh(3, std::vector<double>(4)), VV(5, std::vector<double>(4));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 4; ++j) hh[i][j] = h(i, j);
    for (std::size_t a = 0; a < 5; ++a)
      for (std::size_t j = 0; j < 4; ++j) VV[a][j] = V(a, j);
    std::vector<double> w, pooled;
    attention_oracle(hh, VV, v, q, w, pooled);
    const auto r = additive_attention(h, {V, v, q});
    for (std::size_t i = 0; i < 3; ++i) CHECK(r.weights[i] == doctest::Approx(w[i]).epsilon(1e-12));
    for (std::size_t j = 0; j < 4; ++j) CHECK(r.pooled[j] == doctest::Approx(pooled[j]).epsilon(1e-12));
  }
  SUBCASE("shape mismatch") {
    Mat h = random_mat(2, 4, rng);
    Mat V = random_mat(3, 5, rng);
    std::vector<double> v(3), q(3);
    CHECK_THROWS_AS(additive_attention(h, {V, v, q}), ShapeError);
  }
}

TEST_CASE("conv1d same padding") {
  Rng rng(3);
  SUBCASE("zero input and bias") {
    Mat x(4, 3, 0.0);
    Mat w = random_mat(2, 9, rng);
    std::vector<double> b(2, 0.0);
    const Mat y = conv1d_same(x, w, b, 3);
    for (double v : y.flat()) CHECK(v == 0.0);
  }
  SUBCASE("length one uses zero padding") {
    Mat x = random_mat(1, 2, rng);
    Mat w = random_mat(3, 6, rng);
    std::vector<double> b{0.1, 0.2, -0.3};
    const Mat y = conv1d_same(x, w, b, 3);
    REQUIRE(y.rows() == 1);
    for (std::size_t k = 0; k < 3; ++k) {
      const double z = b[k] + w(k, 2) * x(0, 0) + w(k, 3) * x(0, 1);  // centre tap only
      CHECK(y(0, k) == doctest::Approx(std::max(z, 0.0)).epsilon(1e-14));
    }
  }
  SUBCASE("matches direct convolution oracle") {
    const std::size_t n = 5, d = 3, f = 2;
    Mat x = random_mat(n, d, rng);
    Mat w = random_mat(f, 3 * d, rng);
    std::vector<double> b{0.05, -0.05};
    const Mat y = conv1d_same(x, w, b, 3);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < f; ++k) {
        double z = b[k];
        for (int o = 0; o < 3; ++o) {
          const long src = static_cast<long>(i) + o - 1;
          for (std::size_t j = 0; j < d; ++j) {
            const double xv = (src < 0 || src >= static_cast<long>(n)) ? 0.0 : x(static_cast<std::size_t>(src), j);
            z += w(k, static_cast<std::size_t>(o) * d + j) * xv;
          }
        }
        CHECK(y(i, k) == doctest::Approx(z > 0 ? z : 0.0).epsilon(1e-13));
      }
    }
  }
  SUBCASE("errors") {
    Mat empty(0, 3);
    Mat w(2, 9);
    std::vector<double> b(2);
    CHECK_THROWS_AS(conv1d_same(empty, w, b, 3), std::invalid_argument);
    Mat x(2, 3);
    Mat w2(2, 6);
    CHECK_THROWS_AS(conv1d_same(x, w2, b, 2), std::invalid_argument);
  }
}

TEST_CASE("dropout") {
  Rng rng(17);
  std::vector<double> x(1000, 1.5);
  SUBCASE("rate zero is identity") {
    auto y = x;
    dropout_inplace(y, 0.0, rng, true);
    CHECK(y == x);
  }
  SUBCASE("eval mode is identity") {
    auto y = x;
    dropout_inplace(y, 0.2, rng, false);
    CHECK(y == x);
  }
  SUBCASE("training zero fraction and scaling") {
    std::vector<double> y(100000, 1.0);
    dropout_inplace(y, 0.2, rng, true);
    std::size_t zeros = 0;
    for (double v : y) {
      if (v == 0.0) {
        ++zeros;
      } else {
        CHECK(v == doctest::Approx(1.25));
      }
    }
    CHECK(std::abs(static_cast<double>(zeros) / 1e5 - 0.2) < 0.01);
  }
  SUBCASE("bad rate") {
    auto y = x;
    CHECK_THROWS_AS(dropout_inplace(y, 1.0, rng, true), std::invalid_argument);
    CHECK_THROWS_AS(dropout_inplace(y, -0.1, rng, true), std::invalid_argument);
  }
}

TEST_CASE("adam") {
  ParamStore store;
  const ParamId p = store.add("theta", 1, 1);
  store.value(p)(0, 0) = 0.5;
  AdamHyper h;

  SUBCASE("first step moves by about lr") {
    store.grads()[p](0, 0) = 1.0;
    adam_step(store, 1, h);
    CHECK(store.value(p)(0, 0) - 0.5 == doctest::Approx(-0.001).epsilon(1e-6));
    CHECK(store.grads()[p](0, 0) == 0.0);
  }
  SUBCASE("two constant steps match a scalar reference") {
    double theta = 0.5, m = 0.0, v = 0.0;
    for (int t = 1; t <= 2; ++t) {
      const double g = 0.3;
      store.grads()[p](0, 0) = g;
      adam_step(store, t, h);
      m = 0.9 * m + 0.1 * g;
      v = 0.999 * v + 0.001 * g * g;
      const double mh = m / (1 - std::pow(0.9, t));
      const double vh = v / (1 - std::pow(0.999, t));
      theta -= 0.001 * mh / (std::sqrt(vh) + 1e-8);
    }
    CHECK(store.value(p)(0, 0) == doctest::Approx(theta).epsilon(1e-14));
  }
  SUBCASE("zero gradient from fresh state leaves parameters unchanged") {
    for (int t = 1; t <= 5; ++t) adam_step(store, t, h);
    CHECK(store.value(p)(0, 0) == 0.5);
  }
  SUBCASE("zero gradient decays the moments") {
    store.grads()[p](0, 0) = 1.0;
    adam_step(store, 1, h);
    const double m1 = store.first_moment(p)(0, 0);
    const double v1 = store.second_moment(p)(0, 0);
    adam_step(store, 2, h);
    CHECK(store.first_moment(p)(0, 0) == doctest::Approx(0.9 * m1));
    CHECK(store.second_moment(p)(0, 0) == doctest::Approx(0.999 * v1));
  }
  SUBCASE("bad hyperparameters and non-finite gradient") {
    AdamHyper bad;
    bad.beta1 = 1.0;
    CHECK_THROWS(adam_step(store, 1, bad));
    store.grads()[p](0, 0) = std::nan("");
    CHECK_THROWS_AS(adam_step(store, 1, h), NumericError);
  }
}

TEST_CASE("param store") {
  ParamStore store;
  const ParamId a = store.add("a", 2, 3);
  store.add("b", 4, 1);
  CHECK_THROWS(store.add("a", 1, 1));
  CHECK(store.id("a").index == a.index);
  CHECK(store.grads()[a].rows() == 2);
  CHECK(store.first_moment(a).cols() == 3);
  CHECK(store.total_size() == 10);
}

TEST_CASE("grad check") {
  ParamStore store;
  const ParamId p = store.add("theta", 3, 2);
  Rng rng(1);
  for (double& x : store.value(p).flat()) x = rng.uniform(-2, 2);
  const LossFn quad = [&](const ParamStore& s, Grads* g) {
    double l = 0.0;
    const auto t = s.value(p).flat();
    for (std::size_t j = 0; j < t.size(); ++j) {
      l += 0.5 * t[j] * t[j];
      if (g) (*g)[p].flat()[j] += t[j];
    }
    return l;
  };
  Rng pick(2);
  const auto ok = grad_check(quad, store, 1e-5, 6, pick);
  CHECK(ok.passed(1e-8));

  const LossFn doubled = [&](const ParamStore& s, Grads* g) {
    const double l = quad(s, g);
    if (g) {
      for (double& x : (*g)[p].flat()) x *= 2.0;
    }
    return l;
  };
  const auto bad = grad_check(doubled, store, 1e-5, 6, pick);
  CHECK_FALSE(bad.passed(1e-4));
  CHECK(bad.worst_param == "theta");

  const LossFn nan_loss = [](const ParamStore&, Grads*) { return std::nan(""); };
  CHECK_THROWS_AS(grad_check(nan_loss, store, 1e-5, 2, pick), NumericError);
}

TEST_CASE("rng streams are reproducible") {
  Rng a(derive_seed(9, 1, 2)), b(derive_seed(9, 1, 2)), c(derive_seed(9, 1, 3));
  bool differs = false;
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);
}
