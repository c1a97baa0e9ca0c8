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

#include "debiasrec/synthsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "debiasrec/nn_ops.hpp"
#include "debiasrec/parallel.hpp"
#include "debiasrec/rng.hpp"

namespace debiasrec {

namespace {

constexpr std::uint64_t kCatalogStream = 0xCA7A;
constexpr std::uint64_t kUserStream = 0x05E2;

// P(size | position) by page region: large and medium items cluster near the top.
std::array<double, kNumSizes> size_distribution(int position, std::size_t n_positions) {
  const double rel = static_cast<double>(position - 1) / static_cast<double>(std::max<std::size_t>(n_positions, 1));
  if (rel < 1.0 / 3.0) return {0.10, 0.30, 0.30, 0.30};  // mini, small, medium, large
  if (rel < 2.0 / 3.0) return {0.20, 0.45, 0.25, 0.10};
  return {0.40, 0.45, 0.10, 0.05};
}

NewsSize draw_size(const std::array<double, kNumSizes>& probs, Rng& rng) {
  double u = rng.uniform();
  for (int s = 0; s < kNumSizes; ++s) {
    u -= probs[static_cast<std::size_t>(s)];
    if (u < 0.0) return static_cast<NewsSize>(s);
  }
  return NewsSize::Large;
}

std::vector<std::size_t> draw_slate(std::size_t n_news, std::size_t k, Rng& rng) {
  // Floyd's algorithm: k distinct indices.
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t j = n_news - k; j < n_news; ++j) {
    const std::size_t t = static_cast<std::size_t>(rng.index(j + 1));
    if (std::find(out.begin(), out.end(), t) == out.end()) {
      out.push_back(t);
    } else {
      out.push_back(j);
    }
  }
  rng.shuffle(out);
  return out;
}

// Logging policy: order by noisy prominence, sizes by position.
std::vector<CandidateEntry> biased_slate(const SimConfig& cfg, const GroundTruth& truth, std::size_t user, Rng& rng) {
  const auto news = draw_slate(truth.news_topic.size(), cfg.slate_size, rng);
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(news.size());
  for (std::size_t n : news) keyed.emplace_back(truth.news_prominence[n] + rng.normal(0.0, cfg.placement_noise), n);
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<CandidateEntry> slate;
  slate.reserve(keyed.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    CandidateEntry c;
    c.news = keyed[i].second;
    c.bias.position = static_cast<int>(i + 1);
    c.bias.size = draw_size(size_distribution(c.bias.position, cfg.n_positions), rng);
    c.label = rng.bernoulli(truth.click_probability(user, c.news, c.bias)) ? 1 : 0;
    slate.push_back(c);
  }
  return slate;
}

struct UserLogs {
  std::vector<ImpressionRecord> behaviors;
  std::vector<ImpressionRecord> unbiased;
};

UserLogs simulate_user(const SimConfig& cfg, const GroundTruth& truth, std::size_t user) {
  Rng rng(derive_seed(cfg.seed, kUserStream, user));
  UserLogs out;

  std::vector<HistoryEntry> history;
  const std::size_t target = cfg.history_min + static_cast<std::size_t>(rng.index(cfg.history_max - cfg.history_min + 1));
  for (int attempt = 0; attempt < 2000 && history.size() < target; ++attempt) {
    for (const auto& c : biased_slate(cfg, truth, user, rng)) {
      if (c.label == 1 && history.size() < target) history.push_back({c.news, c.bias});
    }
  }

  const std::int64_t t0 = cfg.start_time;
  const std::int64_t t1 = cfg.test_start();
  const std::int64_t t2 = t1 + cfg.test_days * 86400;
  auto stamp = [&](std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng.index(static_cast<std::uint64_t>(hi - lo)));
  };
  auto biased = [&](std::int64_t lo, std::int64_t hi) {
    ImpressionRecord r;
    r.user_id = user_id(user);
    r.timestamp = stamp(lo, hi);
    r.history = history;
    r.candidates = biased_slate(cfg, truth, user, rng);
    out.behaviors.push_back(std::move(r));
  };
  for (std::size_t i = 0; i < cfg.train_impressions_per_user; ++i) biased(t0, t1);
  for (std::size_t i = 0; i < cfg.test_impressions_per_user; ++i) biased(t1, t2);

  for (std::size_t i = 0; i < cfg.unbiased_impressions_per_user; ++i) {
    ImpressionRecord r;
    r.user_id = user_id(user);
    r.timestamp = stamp(t1, t2);
    r.history = history;
    const auto news = draw_slate(truth.news_topic.size(), cfg.slate_size, rng);
    std::vector<int> positions(cfg.slate_size);
    std::iota(positions.begin(), positions.end(), 1);
    rng.shuffle(positions);
    for (std::size_t j = 0; j < news.size(); ++j) {
      CandidateEntry c;
      c.news = news[j];
      c.bias.position = positions[j];
      c.bias.size = static_cast<NewsSize>(rng.index(kNumSizes));
      c.label = truth.relevance(user, c.news) > truth.relevance_threshold ? 1 : 0;
      r.candidates.push_back(c);
    }
    out.unbiased.push_back(std::move(r));
  }
  return out;
}

void order_and_name(std::vector<ImpressionRecord>& recs, const std::string& prefix) {
  std::stable_sort(recs.begin(), recs.end(),
                   [](const ImpressionRecord& a, const ImpressionRecord& b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 0; i < recs.size(); ++i) recs[i].impression_id = prefix + std::to_string(i + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void SimConfig::validate() const {
  if (n_users == 0 || n_news == 0 || n_topics == 0 || vocab_size == 0) throw std::invalid_argument("sim: counts must be positive");
  if (slate_size == 0 || n_positions == 0) throw std::invalid_argument("sim: slate_size and n_positions must be positive");
  if (slate_size > n_positions) throw std::invalid_argument("sim: slate_size exceeds n_positions");
  if (slate_size > n_news) throw std::invalid_argument("sim: slate_size exceeds n_news");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("sim: eta must be in (0, 1]");
  for (double f : size_factors) {
    if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("sim: size factors must be in (0, 1]");
  }
  if (title_len_min == 0 || title_len_min > title_len_max) throw std::invalid_argument("sim: bad title length range");
  if (history_min > history_max) throw std::invalid_argument("sim: bad history range");
  if (train_impressions_per_user == 0 || test_impressions_per_user == 0)
    throw std::invalid_argument("sim: impressions per user must be positive");
  if (!(topic_word_prob >= 0.0 && topic_word_prob <= 1.0)) throw std::invalid_argument("sim: topic_word_prob must be in [0, 1]");
  if (common_words == 0 || common_words >= vocab_size) throw std::invalid_argument("sim: common_words must be in [1, vocab_size)");
  if ((vocab_size - common_words) / n_topics < 5) {
    throw std::invalid_argument("sim: vocabulary too small for topic exclusivity (need >= 5 exclusive words per topic)");
  }
  if (train_days <= 0 || test_days <= 0) throw std::invalid_argument("sim: windows must be positive");
}

double GroundTruth::relevance(std::size_t user, std::size_t news) const {
  return sigmoid(user_pref[user][news_topic[news]] + news_quality[news] + relevance_offset);
}

double GroundTruth::examination(const BiasFeatures& f) const {
  return std::pow(eta, f.position - 1) * size_factors[static_cast<std::size_t>(f.size)];
}

std::string user_id(std::size_t user) { return "U" + std::to_string(user + 1); }

std::size_t parse_user_id(const std::string& id) {
  if (id.size() < 2 || id[0] != 'U') throw std::invalid_argument("not a simulator user id: " + id);
  return static_cast<std::size_t>(std::stoul(id.substr(1))) - 1;
}

SimCatalog generate_catalog(const SimConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, kCatalogStream));
  SimCatalog out;
  GroundTruth& t = out.truth;
  t.eta = cfg.eta;
  t.size_factors = cfg.size_factors;
  t.relevance_offset = cfg.relevance_offset;
  t.relevance_threshold = cfg.relevance_threshold;
  t.test_start = cfg.test_start();

  const std::size_t per_topic = (cfg.vocab_size - cfg.common_words) / cfg.n_topics;
  std::vector<double> topic_prominence(cfg.n_topics);
  for (double& p : topic_prominence) p = rng.normal(0.0, cfg.prominence_scale);

  for (std::size_t i = 0; i < cfg.n_news; ++i) {
    const std::size_t topic = static_cast<std::size_t>(rng.index(cfg.n_topics));
    const std::size_t len = cfg.title_len_min + static_cast<std::size_t>(rng.index(cfg.title_len_max - cfg.title_len_min + 1));
    std::string title;
    for (std::size_t w = 0; w < len; ++w) {
      std::size_t word;
      if (rng.bernoulli(cfg.topic_word_prob)) {
        word = cfg.common_words + topic * per_topic + static_cast<std::size_t>(rng.index(per_topic));
      } else {
        word = static_cast<std::size_t>(rng.index(cfg.common_words));
      }
      if (w) title += ' ';
      title += "w" + std::to_string(word);
    }
    out.catalog.add({"N" + std::to_string(i + 1), title});
    t.news_topic.push_back(topic);
    t.news_quality.push_back(rng.normal(0.0, cfg.quality_scale));
    t.news_prominence.push_back(topic_prominence[topic] + rng.normal(0.0, 0.5 * cfg.prominence_scale));
  }
  t.user_pref.assign(cfg.n_users, std::vector<double>(cfg.n_topics));
  for (auto& pref : t.user_pref) {
    for (double& p : pref) p = rng.normal(0.0, cfg.pref_scale);
  }
  return out;
}

SimLogs generate_logs(const SimConfig& cfg, const GroundTruth& truth) {
  cfg.validate();
  std::vector<UserLogs> per_user(cfg.n_users);
  const auto n = static_cast<long>(cfg.n_users);
#pragma omp parallel for schedule(dynamic, 8) num_threads(worker_threads())
  for (long u = 0; u < n; ++u) per_user[static_cast<std::size_t>(u)] = simulate_user(cfg, truth, static_cast<std::size_t>(u));

  SimLogs logs;
  for (auto& ul : per_user) {
    for (auto& r : ul.behaviors) logs.behaviors.push_back(std::move(r));
    for (auto& r : ul.unbiased) logs.unbiased.push_back(std::move(r));
  }
  order_and_name(logs.behaviors, "I");
  order_and_name(logs.unbiased, "X");
  return logs;
}

void write_truth(const std::string& dir, const GroundTruth& truth, const NewsCatalog& catalog) {
  namespace fs = std::filesystem;
  std::string kv;
  kv += "eta = " + fmt(truth.eta) + "\n";
  for (int s = 0; s < kNumSizes; ++s) {
    kv += "size_factor_" + size_name(static_cast<NewsSize>(s)) + " = " + fmt(truth.size_factors[static_cast<std::size_t>(s)]) + "\n";
  }
  kv += "relevance_offset = " + fmt(truth.relevance_offset) + "\n";
  kv += "relevance_threshold = " + fmt(truth.relevance_threshold) + "\n";
  kv += "test_start = " + std::to_string(truth.test_start) + "\n";
  kv += "n_topics = " + std::to_string(truth.user_pref.empty() ? 0 : truth.user_pref[0].size()) + "\n";
  kv += "n_users = " + std::to_string(truth.user_pref.size()) + "\n";
  kv += "# click probability = eta^(position-1) * size_factor[size] * sigmoid(pref[user][topic] + quality + offset)\n";
  write_text_file((fs::path(dir) / "truth.txt").string(), kv);

  std::string news = "news_id,topic,quality,prominence\n";
  for (std::size_t i = 0; i < truth.news_topic.size(); ++i) {
    news += catalog[i].id + "," + std::to_string(truth.news_topic[i]) + "," + fmt(truth.news_quality[i]) + "," +
            fmt(truth.news_prominence[i]) + "\n";
  }
  write_text_file((fs::path(dir) / "truth_news.csv").string(), news);

  std::string users = "user_id";
  const std::size_t topics = truth.user_pref.empty() ? 0 : truth.user_pref[0].size();
  for (std::size_t t = 0; t < topics; ++t) users += ",pref_" + std::to_string(t);
  users += "\n";
  for (std::size_t u = 0; u < truth.user_pref.size(); ++u) {
    users += user_id(u);
    for (double p : truth.user_pref[u]) users += "," + fmt(p);
    users += "\n";
  }
  write_text_file((fs::path(dir) / "truth_users.csv").string(), users);
}

GroundTruth read_truth(const std::string& dir, const NewsCatalog& catalog) {
  namespace fs = std::filesystem;
  GroundTruth t;
  std::istringstream kv(read_text_file((fs::path(dir) / "truth.txt").string()));
  std::string line;
  while (std::getline(kv, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw DataError("truth.txt: bad line " + line);
    const std::string k = line.substr(0, eq);
    const std::string v = line.substr(eq + 3);
    if (k == "eta") t.eta = std::stod(v);
    else if (k.rfind("size_factor_", 0) == 0) t.size_factors[static_cast<std::size_t>(parse_size(k.substr(12)))] = std::stod(v);
    else if (k == "relevance_offset") t.relevance_offset = std::stod(v);
    else if (k == "relevance_threshold") t.relevance_threshold = std::stod(v);
    else if (k == "test_start") t.test_start = std::stoll(v);
  }

  std::istringstream news(read_text_file((fs::path(dir) / "truth_news.csv").string()));
  std::getline(news, line);
  t.news_topic.assign(catalog.size(), 0);
  t.news_quality.assign(catalog.size(), 0.0);
  t.news_prominence.assign(catalog.size(), 0.0);
  while (std::getline(news, line)) {
    std::istringstream ls(line);
    std::string id, topic, quality, prominence;
    std::getline(ls, id, ',');
    std::getline(ls, topic, ',');
    std::getline(ls, quality, ',');
    std::getline(ls, prominence, ',');
    const auto idx = catalog.find(id);
    if (!idx) throw DataError("truth_news.csv: unknown news id " + id);
    t.news_topic[*idx] = std::stoul(topic);
    t.news_quality[*idx] = std::stod(quality);
    t.news_prominence[*idx] = std::stod(prominence);
  }

  std::istringstream users(read_text_file((fs::path(dir) / "truth_users.csv").string()));
  std::getline(users, line);
  while (std::getline(users, line)) {
    std::istringstream ls(line);
    std::string field;
    std::getline(ls, field, ',');
    const std::size_t u = parse_user_id(field);
    if (t.user_pref.size() <= u) t.user_pref.resize(u + 1);
    std::vector<double> pref;
    while (std::getline(ls, field, ',')) pref.push_back(std::stod(field));
    t.user_pref[u] = std::move(pref);
  }
  return t;
}

std::string format_sim_config(const SimConfig& c) {
  std::ostringstream o;
  o << "sim.n_users = " << c.n_users << "\n"
    << "sim.n_news = " << c.n_news << "\n"
    << "sim.n_topics = " << c.n_topics << "\n"
    << "sim.vocab_size = " << c.vocab_size << "\n"
    << "sim.common_words = " << c.common_words << "\n"
    << "sim.topic_word_prob = " << fmt(c.topic_word_prob) << "\n"
    << "sim.title_len_min = " << c.title_len_min << "\n"
    << "sim.title_len_max = " << c.title_len_max << "\n"
    << "sim.n_positions = " << c.n_positions << "\n"
    << "sim.slate_size = " << c.slate_size << "\n"
    << "sim.eta = " << fmt(c.eta) << "\n"
    << "sim.size_factors = " << fmt(c.size_factors[0]) << "," << fmt(c.size_factors[1]) << ","
    << fmt(c.size_factors[2]) << "," << fmt(c.size_factors[3]) << "\n"
    << "sim.pref_scale = " << fmt(c.pref_scale) << "\n"
    << "sim.quality_scale = " << fmt(c.quality_scale) << "\n"
    << "sim.relevance_offset = " << fmt(c.relevance_offset) << "\n"
    << "sim.prominence_scale = " << fmt(c.prominence_scale) << "\n"
    << "sim.placement_noise = " << fmt(c.placement_noise) << "\n"
    << "sim.history_min = " << c.history_min << "\n"
    << "sim.history_max = " << c.history_max << "\n"
    << "sim.train_impressions_per_user = " << c.train_impressions_per_user << "\n"
    << "sim.test_impressions_per_user = " << c.test_impressions_per_user << "\n"
    << "sim.unbiased_impressions_per_user = " << c.unbiased_impressions_per_user << "\n"
    << "sim.relevance_threshold = " << fmt(c.relevance_threshold) << "\n"
    << "sim.start_time = " << c.start_time << "\n"
    << "sim.train_days = " << c.train_days << "\n"
    << "sim.test_days = " << c.test_days << "\n"
    << "sim.seed = " << c.seed << "\n";
  return o.str();
}

}  // namespace debiasrec
