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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "debiasrec/content_encoder.hpp"
#include "debiasrec/grad_check.hpp"
#include "debiasrec/vocab.hpp"

using namespace debiasrec;

namespace {

ModelConfig tiny_config() {
  ModelConfig c;
  c.word_dim = 4;
  c.filters = 3;
  c.attn_dim = 2;
  c.bias_dim = 2;
  c.dropout = 0.2;
  return c;
}

}  // namespace

TEST_CASE("tokenizer") {
  CHECK(tokenize_text("Hello, World!") == std::vector<std::string>{"hello", "world"});
  CHECK(tokenize_text("  a\tb\n") == std::vector<std::string>{"a", "b"});
  CHECK(tokenize_text("x\xC2\xA0y\xE3\x80\x80z") == std::vector<std::string>{"x", "y", "z"});
  CHECK(tokenize_text("\"quoted\" ... it's") == std::vector<std::string>{"quoted", "it's"});
  CHECK(tokenize_text("").empty());
}

TEST_CASE("build_vocab") {
  const Vocab v1 = build_vocab({"a b", "a"}, 1);
  CHECK(v1.size() == 4);
  CHECK(v1.lookup("<pad>") == kPadId);
  CHECK(v1.token(kUnkId) == "<unk>");
  CHECK(v1.lookup("a") == 2);
  CHECK(v1.lookup("b") == 3);

  const Vocab v2 = build_vocab({"a b", "a"}, 2);
  CHECK(v2.size() == 3);
  CHECK(v2.lookup("b") == kUnkId);
  CHECK(v2.lookup("zzz") == kUnkId);

  CHECK_THROWS(build_vocab({}, 1));
}

TEST_CASE("build_vocab matches a frequency count on random titles") {
  Rng rng(4);
  std::vector<std::string> corpus;
  std::map<std::string, int> counts;
  for (int i = 0; i < 1000; ++i) {
    std::string title;
    const int len = 1 + static_cast<int>(rng.index(8));
    for (int w = 0; w < len; ++w) {
      const std::string tok = "w" + std::to_string(rng.index(3000));
      ++counts[tok];
      title += (w ? " " : "") + tok;
    }
    corpus.push_back(title);
  }
  for (int min_count : {1, 2, 3}) {
    std::size_t expected = 0;
    for (const auto& [tok, n] : counts) expected += n >= min_count ? 1 : 0;
    CHECK(build_vocab(corpus, min_count).size() == expected + 2);
  }
}

TEST_CASE("vocab serialization round trip") {
  const Vocab v = build_vocab({"the cat", "sat on the mat"}, 1);
  const Vocab w = Vocab::parse(v.serialize());
  CHECK(w.size() == v.size());
  CHECK(w.hash() == v.hash());
  CHECK(w.lookup("mat") == v.lookup("mat"));
}

TEST_CASE("tokenize to fixed length") {
  const Vocab v = build_vocab({"hello world", "another title here"}, 1);
  const TitleTokens t = tokenize("Hello World", v, 4);
  CHECK(t.ids == std::vector<std::int32_t>{v.lookup("hello"), v.lookup("world"), 0, 0});
  CHECK(t.mask == std::vector<bool>{true, true, false, false});
  CHECK(t.length == 2);

  const TitleTokens longer = tokenize("another title here hello world", v, 3);
  CHECK(longer.ids == std::vector<std::int32_t>{v.lookup("another"), v.lookup("title"), v.lookup("here")});

  const TitleTokens oov = tokenize("hello unseen", v, 3);
  CHECK(oov.ids[1] == kUnkId);

  const TitleTokens empty = tokenize("", v, 3);
  CHECK(empty.length == 0);
  CHECK(empty.ids == std::vector<std::int32_t>{0, 0, 0});
}

TEST_CASE("pretrained embeddings") {
  const Vocab v = build_vocab({"alpha beta"}, 1);
  const auto path = std::filesystem::temp_directory_path() / "debiasrec_emb.txt";
  {
    std::ofstream out(path);
    out << "alpha 1 2 3\nunknownword 9 9 9\nbeta 4 5 6\n";
  }
  Mat emb(v.size(), 3, 0.0);
  CHECK(load_pretrained_embeddings(path.string(), v, emb) == 2);
  CHECK(emb(static_cast<std::size_t>(v.lookup("beta")), 2) == 6.0);
  std::filesystem::remove(path);
}

TEST_CASE("content encoder") {
  const ModelConfig cfg = tiny_config();
  ParamStore store;
  ContentEncoder enc(store, cfg, 10);
  Rng rng(8);
  enc.init(store, rng);
  CHECK(store.value(enc.embedding()).row_span(0)[0] == 0.0);

  SUBCASE("empty title gives the zero vector") {
    const Vec c = enc.forward(store, {}, false, rng);
    REQUIRE(c.size() == 3);
    for (double x : c) CHECK(x == 0.0);
  }

  SUBCASE("single token equals its post-CNN vector") {
    const std::vector<std::int32_t> tok{4};
    const Vec c = enc.forward(store, tok, false, rng);
    Mat x(1, 4);
    for (std::size_t j = 0; j < 4; ++j) x(0, j) = store.value(enc.embedding())(4, j);
    const Mat h = conv1d_same(x, store.value(enc.conv_weight()), store.value(enc.conv_bias()).flat(), 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(c[k] == h(0, k));
  }

  SUBCASE("zero attention projection gives the mean contextual vector") {
    store.value(enc.attn_proj()).fill(0.0);
    const std::vector<std::int32_t> toks{2, 3, 5};
    const Vec c = enc.forward(store, toks, false, rng);
    Mat x(3, 4);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 4; ++j) x(i, j) = store.value(enc.embedding())(static_cast<std::size_t>(toks[i]), j);
    const Mat h = conv1d_same(x, store.value(enc.conv_weight()), store.value(enc.conv_bias()).flat(), 3);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(c[k] == doctest::Approx((h(0, k) + h(1, k) + h(2, k)) / 3.0).epsilon(1e-13));
    }
  }

  SUBCASE("five-token title matches a composed scalar oracle") {
    const std::vector<std::int32_t> toks{2, 7, 3, 9, 5};
    const Vec c = enc.forward(store, toks, false, rng);
    const Mat& E = store.value(enc.embedding());
    const Mat& W = store.value(enc.conv_weight());
    const auto b = store.value(enc.conv_bias()).flat();
    const Mat& V = store.value(enc.attn_proj());
    const auto v = store.value("content.attn.bias").flat();
    const auto q = store.value("content.attn.query").flat();
    double h[5][3];
    for (int i = 0; i < 5; ++i) {
      for (int k = 0; k < 3; ++k) {
        double z = b[static_cast<std::size_t>(k)];
        for (int o = -1; o <= 1; ++o) {
          if (i + o < 0 || i + o >= 5) continue;
          for (int j = 0; j < 4; ++j) {
            z += W(static_cast<std::size_t>(k), static_cast<std::size_t>((o + 1) * 4 + j)) *
                 E(static_cast<std::size_t>(toks[static_cast<std::size_t>(i + o)]), static_cast<std::size_t>(j));
          }
        }
        h[i][k] = z > 0 ? z : 0;
      }
    }
    double s[5], total = 0;
    for (int i = 0; i < 5; ++i) {
      s[i] = 0;
      for (int a = 0; a < 2; ++a) {
        double z = v[static_cast<std::size_t>(a)];
        for (int k = 0; k < 3; ++k) z += V(static_cast<std::size_t>(a), static_cast<std::size_t>(k)) * h[i][k];
        s[i] += q[static_cast<std::size_t>(a)] * std::tanh(z);
      }
      total += std::exp(s[i]);
    }
    for (int k = 0; k < 3; ++k) {
      double pooled = 0;
      for (int i = 0; i < 5; ++i) pooled += std::exp(s[i]) / total * h[i][k];
      CHECK(c[static_cast<std::size_t>(k)] == doctest::Approx(pooled).epsilon(1e-12));
    }
  }

  SUBCASE("padding never changes the content vector") {
    const Vocab v = build_vocab({"a b c d e f g h"}, 1);
    const TitleTokens short_t = tokenize("a b c", v, 3);
    const TitleTokens padded = tokenize("a b c", v, 12);
    const Vec c1 = enc.forward(store, short_t.real(), false, rng);
    const Vec c2 = enc.forward(store, padded.real(), false, rng);
    CHECK(c1.values() == c2.values());
  }

  SUBCASE("word attention weights sum to one") {
    ContentEncoder::Cache cache;
    const std::vector<std::int32_t> toks{2, 3, 4, 5, 6, 7};
    enc.forward(store, toks, false, rng, &cache);
    double total = 0;
    for (double w : cache.weights) total += w;
    CHECK(std::abs(total - 1.0) < 1e-9);
  }

  SUBCASE("eval mode is deterministic") {
    const std::vector<std::int32_t> toks{2, 3, 4};
    Rng r1(1), r2(2);
    CHECK(enc.forward(store, toks, false, r1).values() == enc.forward(store, toks, false, r2).values());
  }

  SUBCASE("out-of-range token id") {
    const std::vector<std::int32_t> toks{42};
    CHECK_THROWS(enc.forward(store, toks, false, rng));
  }
}

TEST_CASE("content encoder gradients pass a probe-loss check") {
  ModelConfig cfg = tiny_config();
  ParamStore store;
  ContentEncoder enc(store, cfg, 12);
  Rng rng(21);
  enc.init(store, rng);
  for (double& x : store.value(enc.conv_bias()).flat()) x = rng.uniform(0.05, 0.2);
  const std::vector<std::int32_t> toks{2, 5, 7, 3, 11};
  const std::vector<double> probe{0.7, -1.3, 0.4};
  const LossFn loss = [&](const ParamStore& s, Grads* g) {
    Rng dropout(99);  // same mask on every evaluation
    ContentEncoder::Cache cache;
    const Vec c = enc.forward(s, toks, true, dropout, g ? &cache : nullptr);
    double l = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) l += probe[k] * c[k];
    if (g) enc.backward(s, cache, probe, *g);
    return l;
  };
  Rng pick(5);
  const auto report = grad_check(loss, store, 1e-5, 40, pick);
  for (const auto& p : report.params) INFO(p.name << " " << p.max_rel_error);
  CHECK(report.passed(1e-4));
}
