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

#include "debiasrec/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <sstream>
#include <vector>

#include "debiasrec/dataio.hpp"

namespace debiasrec {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + v + "'");
  }
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  if (!v.empty() && v[0] == '-') throw ConfigError("config key '" + key + "': must be non-negative");
  return parse_number<std::size_t>(key, v);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

std::string fmt(double d) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", d);
  return buf;
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define COUNT_KEY(NAME, FIELD)                                                      \
  Key {                                                                             \
    NAME, [](RunConfig& c, const std::string& v) { c.FIELD = parse_count(NAME, v); }, \
        [](const RunConfig& c) { return std::to_string(c.FIELD); }                  \
  }
#define INT_KEY(NAME, FIELD, TYPE)                                                               \
  Key {                                                                                          \
    NAME, [](RunConfig& c, const std::string& v) { c.FIELD = parse_number<TYPE>(NAME, v); },     \
        [](const RunConfig& c) { return std::to_string(c.FIELD); }                               \
  }
#define REAL_KEY(NAME, FIELD)                                                                     \
  Key {                                                                                           \
    NAME, [](RunConfig& c, const std::string& v) { c.FIELD = parse_number<double>(NAME, v); },    \
        [](const RunConfig& c) { return fmt(c.FIELD); }                                           \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      COUNT_KEY("word_dim", model.word_dim),
      COUNT_KEY("filters", model.filters),
      INT_KEY("window", model.window, int),
      COUNT_KEY("attn_dim", model.attn_dim),
      COUNT_KEY("bias_dim", model.bias_dim),
      COUNT_KEY("max_title_len", model.max_title_len),
      COUNT_KEY("max_history", model.max_history),
      INT_KEY("max_position", model.max_position, int),
      REAL_KEY("dropout", model.dropout),
      Key{"mode", [](RunConfig& c, const std::string& v) {
            try {
              c.model.mode = parse_scoring_mode(v);
            } catch (const std::exception& e) {
              throw ConfigError("config key 'mode': " + std::string(e.what()));
            }
          },
          [](const RunConfig& c) { return to_string(c.model.mode); }},
      Key{"brm", [](RunConfig& c, const std::string& v) {
            try {
              c.model.brm = parse_brm_variant(v);
            } catch (const std::exception& e) {
              throw ConfigError("config key 'brm': " + std::string(e.what()));
            }
          },
          [](const RunConfig& c) { return to_string(c.model.brm); }},
      Key{"baum_enabled", [](RunConfig& c, const std::string& v) { c.model.baum_enabled = parse_bool("baum_enabled", v); },
          [](const RunConfig& c) { return std::string(c.model.baum_enabled ? "true" : "false"); }},
      REAL_KEY("lr", train.lr),
      COUNT_KEY("batch_size", train.batch_size),
      COUNT_KEY("negatives", train.negatives),
      COUNT_KEY("epochs", train.epochs),
      COUNT_KEY("patience", train.patience),
      INT_KEY("seed", train.seed, std::uint64_t),
      REAL_KEY("val_fraction", train.val_fraction),
      INT_KEY("min_count", min_count, int),
      Key{"pretrained_embeddings", [](RunConfig& c, const std::string& v) { c.pretrained_embeddings = v; },
          [](const RunConfig& c) { return c.pretrained_embeddings; }},
      Key{"test_start",
          [](RunConfig& c, const std::string& v) {
            if (v.empty() || v == "auto") {
              c.test_start.reset();
            } else {
              c.test_start = parse_number<std::int64_t>("test_start", v);
            }
          },
          [](const RunConfig& c) { return c.test_start ? std::to_string(*c.test_start) : std::string("auto"); }},
      COUNT_KEY("sim.n_users", sim.n_users),
      COUNT_KEY("sim.n_news", sim.n_news),
      COUNT_KEY("sim.n_topics", sim.n_topics),
      COUNT_KEY("sim.vocab_size", sim.vocab_size),
      COUNT_KEY("sim.common_words", sim.common_words),
      REAL_KEY("sim.topic_word_prob", sim.topic_word_prob),
      COUNT_KEY("sim.title_len_min", sim.title_len_min),
      COUNT_KEY("sim.title_len_max", sim.title_len_max),
      COUNT_KEY("sim.n_positions", sim.n_positions),
      COUNT_KEY("sim.slate_size", sim.slate_size),
      REAL_KEY("sim.eta", sim.eta),
      Key{"sim.size_factors",
          [](RunConfig& c, const std::string& v) {
            std::istringstream in(v);
            std::string part;
            std::size_t i = 0;
            while (std::getline(in, part, ',')) {
              if (i >= kNumSizes) throw ConfigError("config key 'sim.size_factors': expected 4 values");
              c.sim.size_factors[i++] = parse_number<double>("sim.size_factors", trim(part));
            }
            if (i != kNumSizes) throw ConfigError("config key 'sim.size_factors': expected 4 values");
          },
          [](const RunConfig& c) {
            const auto& f = c.sim.size_factors;
            return fmt(f[0]) + "," + fmt(f[1]) + "," + fmt(f[2]) + "," + fmt(f[3]);
          }},
      REAL_KEY("sim.pref_scale", sim.pref_scale),
      REAL_KEY("sim.quality_scale", sim.quality_scale),
      REAL_KEY("sim.relevance_offset", sim.relevance_offset),
      REAL_KEY("sim.prominence_scale", sim.prominence_scale),
      REAL_KEY("sim.placement_noise", sim.placement_noise),
      COUNT_KEY("sim.history_min", sim.history_min),
      COUNT_KEY("sim.history_max", sim.history_max),
      COUNT_KEY("sim.train_impressions_per_user", sim.train_impressions_per_user),
      COUNT_KEY("sim.test_impressions_per_user", sim.test_impressions_per_user),
      COUNT_KEY("sim.unbiased_impressions_per_user", sim.unbiased_impressions_per_user),
      REAL_KEY("sim.relevance_threshold", sim.relevance_threshold),
      INT_KEY("sim.start_time", sim.start_time, std::int64_t),
      INT_KEY("sim.train_days", sim.train_days, std::int64_t),
      INT_KEY("sim.test_days", sim.test_days, std::int64_t),
      INT_KEY("sim.seed", sim.seed, std::uint64_t),
  };
  return table;
}

#undef COUNT_KEY
#undef INT_KEY
#undef REAL_KEY

std::string canonical(const std::string& key) {
  if (key == "L_max") return "max_title_len";
  if (key == "M_max") return "max_history";
  if (key == "P_max") return "max_position";
  if (key == "K") return "negatives";
  if (key == "batch") return "batch_size";
  return key;
}

}  // namespace

RunConfig paper_profile() { return RunConfig{}; }

RunConfig desk_profile() {
  RunConfig c;
  c.profile = "desk";
  c.model.word_dim = 32;
  c.model.filters = 32;
  c.model.attn_dim = 16;
  c.model.bias_dim = 16;
  c.model.max_title_len = 10;
  c.model.max_history = 20;
  c.model.max_position = 20;
  c.train.epochs = 5;
  c.train.batch_size = 32;
  c.train.lr = 5e-3;
  return c;
}

RunConfig profile_by_name(const std::string& name) {
  if (name == "paper") return paper_profile();
  if (name == "desk") return desk_profile();
  throw ConfigError("unknown profile '" + name + "' (expected paper or desk)");
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string k = canonical(key);
  if (k == "profile") {
    if (value != cfg.profile) throw ConfigError("config key 'profile' must come first");
    return;
  }
  for (const auto& entry : keys()) {
    if (entry.name == k) {
      entry.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_run_config(std::string_view text, const std::string& source) {
  std::vector<std::pair<std::string, std::string>> assignments;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  std::string profile = "paper";
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key == "profile") {
      profile = value;
    } else {
      assignments.emplace_back(std::move(key), std::move(value));
    }
  }
  RunConfig cfg = profile_by_name(profile);
  for (const auto& [k, v] : assignments) set_config_value(cfg, k, v);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return parse_run_config(text, path);
}

std::string format_run_config(const RunConfig& cfg) {
  std::string out = "profile = " + cfg.profile + "\n";
  for (const auto& entry : keys()) out += entry.name + " = " + entry.get(cfg) + "\n";
  return out;
}

void validate_run_config(const RunConfig& cfg) {
  try {
    cfg.model.validate();
    cfg.train.validate();
    cfg.sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.min_count < 1) throw ConfigError("min_count must be >= 1");
}

}  // namespace debiasrec
