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

#include "debiasrec/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "debiasrec/parallel.hpp"

#ifndef DEBIASREC_VERSION
#define DEBIASREC_VERSION "dev"
#endif

namespace debiasrec {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kInitStream = 0x1417;

std::string fmt(double d) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", d);
  return buf;
}

std::string path_in(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

std::int64_t resolve_test_start(const RunConfig& cfg, const Dataset& data) {
  if (cfg.test_start) return *cfg.test_start;
  if (data.test_start) return *data.test_start;
  throw ConfigError("test_start is not set and the dataset has no truth.txt");
}

void ensure_out_dir(const std::string& dir) {
  const fs::path p(dir);
  if (fs::exists(p) && !fs::is_directory(p)) throw DataError(dir + " exists and is not a directory");
  const fs::path parent = fs::absolute(p).parent_path();
  if (!fs::exists(parent)) throw DataError("parent directory of " + dir + " does not exist");
  fs::create_directories(p);
}

// Config keys that may change between a run and its resumption.
bool resumable_key(const std::string& key) {
  return key == "config.epochs" || key == "config.patience";
}

Mat history_to_mat(const std::vector<EpochStats>& h) {
  Mat m(h.size(), 7);
  for (std::size_t i = 0; i < h.size(); ++i) {
    m(i, 0) = static_cast<double>(h[i].epoch);
    m(i, 1) = h[i].train_loss;
    m(i, 2) = static_cast<double>(h[i].instances);
    m(i, 3) = h[i].val_auc;
    m(i, 4) = h[i].val_mrr;
    m(i, 5) = h[i].val_ndcg5;
    m(i, 6) = h[i].val_ndcg10;
  }
  return m;
}

std::vector<EpochStats> history_from_mat(const Mat& m) {
  if (m.rows() > 0 && m.cols() != 7) throw DataError("checkpoint: malformed training history");
  std::vector<EpochStats> h(m.rows());
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i].epoch = static_cast<std::size_t>(m(i, 0));
    h[i].train_loss = m(i, 1);
    h[i].instances = static_cast<std::size_t>(m(i, 2));
    h[i].val_auc = m(i, 3);
    h[i].val_mrr = m(i, 4);
    h[i].val_ndcg5 = m(i, 5);
    h[i].val_ndcg10 = m(i, 6);
  }
  return h;
}

Checkpoint resumable_checkpoint(const DebiasRecModel& model, const RunConfig& cfg, const Vocab& vocab,
                                std::int64_t test_start, const TrainState& st) {
  Checkpoint c = make_checkpoint(model, cfg, vocab, test_start);
  c.meta["kind"] = "last";
  c.meta["state.epochs_done"] = std::to_string(st.epochs_done);
  c.meta["state.adam_step"] = std::to_string(st.adam_step);
  c.meta["state.best_val_auc"] = fmt(st.best_val_auc);
  c.meta["state.best_epoch"] = std::to_string(st.best_epoch);
  c.meta["state.bad_epochs"] = std::to_string(st.bad_epochs);
  c.meta["state.stopped_early"] = st.stopped_early ? "1" : "0";
  const ParamStore& store = model.params();
  for (std::size_t p = 0; p < store.size(); ++p) {
    const ParamId id{p};
    c.tensors.emplace_back("adam.m/" + store.name(id), store.first_moment(id));
    c.tensors.emplace_back("adam.v/" + store.name(id), store.second_moment(id));
  }
  for (std::size_t p = 0; p < st.best_params.size(); ++p) {
    c.tensors.emplace_back("best/" + store.name(ParamId{p}), st.best_params[p]);
  }
  c.tensors.emplace_back("history", history_to_mat(st.history));
  return c;
}

void restore_state(const Checkpoint& c, DebiasRecModel& model, TrainState& st) {
  auto meta = [&](const std::string& k) {
    const auto it = c.meta.find(k);
    if (it == c.meta.end()) throw DataError("checkpoint: missing metadata " + k);
    return it->second;
  };
  st.epochs_done = std::stoul(meta("state.epochs_done"));
  st.adam_step = std::stol(meta("state.adam_step"));
  st.best_val_auc = std::stod(meta("state.best_val_auc"));
  st.best_epoch = std::stoul(meta("state.best_epoch"));
  st.bad_epochs = std::stoul(meta("state.bad_epochs"));
  st.stopped_early = meta("state.stopped_early") == "1";
  ParamStore& store = model.params();
  st.best_params.clear();
  for (std::size_t p = 0; p < store.size(); ++p) {
    const ParamId id{p};
    const Mat* m = c.find("adam.m/" + store.name(id));
    const Mat* v = c.find("adam.v/" + store.name(id));
    if (!m || !v) throw DataError("checkpoint: missing optimizer state for " + store.name(id));
    store.first_moment(id) = *m;
    store.second_moment(id) = *v;
    if (const Mat* b = c.find("best/" + store.name(id))) st.best_params.push_back(*b);
  }
  if (!st.best_params.empty() && st.best_params.size() != store.size()) {
    throw DataError("checkpoint: incomplete best-parameter snapshot");
  }
  const Mat* h = c.find("history");
  if (!h) throw DataError("checkpoint: missing training history");
  st.history = history_from_mat(*h);
}

std::map<std::string, std::string> config_meta(const RunConfig& cfg) {
  std::map<std::string, std::string> meta;
  std::istringstream lines(format_run_config(cfg));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find(" = ");
    meta["config." + line.substr(0, eq)] = line.substr(eq + 3);
  }
  return meta;
}

void write_report(const std::string& path, const EvalReport& r) { write_text_file(path, r.to_csv()); }

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  if (dynamic_cast<const DataError*>(&e)) return kExitData;
  if (dynamic_cast<const ConfigError*>(&e)) return kExitUsage;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return kExitUsage;
  return kExitData;
}

Dataset load_dataset(const std::string& dir, int max_position) {
  Dataset d;
  d.catalog = load_news(path_in(dir, "news.tsv"));
  d.behaviors = load_behaviors(path_in(dir, "behaviors.tsv"), d.catalog, max_position);
  if (fs::exists(path_in(dir, "unbiased.tsv"))) {
    d.unbiased = load_behaviors(path_in(dir, "unbiased.tsv"), d.catalog, max_position);
  }
  if (fs::exists(path_in(dir, "truth.txt"))) d.test_start = read_truth(dir, d.catalog).test_start;
  return d;
}

Dataset simulate_dataset(const SimConfig& cfg) {
  SimCatalog cat = generate_catalog(cfg);
  SimLogs logs = generate_logs(cfg, cat.truth);
  Dataset d;
  d.catalog = std::move(cat.catalog);
  d.behaviors = std::move(logs.behaviors);
  d.unbiased = std::move(logs.unbiased);
  d.test_start = cat.truth.test_start;
  return d;
}

TrainResult train_model(const RunConfig& cfg, const Dataset& data,
                        const std::function<void(const TrainResult&, const TrainState&)>& on_epoch,
                        const Checkpoint* resume_from) {
  validate_run_config(cfg);
  TrainResult r;
  r.test_start = resolve_test_start(cfg, data);
  r.split = split_dataset(data.behaviors, r.test_start, cfg.train.val_fraction, cfg.train.seed);

  std::vector<std::string> corpus;
  corpus.reserve(data.catalog.size());
  for (const auto& a : data.catalog.articles()) corpus.push_back(a.title);
  r.vocab = build_vocab(corpus, cfg.min_count);
  r.tokens = tokenize_catalog(data.catalog, r.vocab, cfg.model.max_title_len);

  r.model = std::make_unique<DebiasRecModel>(cfg.model, r.vocab.size());
  r.model->init(derive_seed(cfg.train.seed, kInitStream));
  if (!cfg.pretrained_embeddings.empty()) {
    load_pretrained_embeddings(cfg.pretrained_embeddings, r.vocab,
                               r.model->params().value("content.word_embedding"));
  }

  Trainer trainer(*r.model, r.tokens, r.split.train, r.split.validation, cfg.train);
  if (resume_from) {
    if (resume_from->vocab_hash != r.vocab.hash()) throw DataError("cannot resume: vocabulary differs");
    const auto restored = model_from_checkpoint(*resume_from, r.vocab.size());
    for (std::size_t p = 0; p < r.model->params().size(); ++p) {
      r.model->params().value(ParamId{p}) = restored->params().value(ParamId{p});
    }
    restore_state(*resume_from, *r.model, trainer.state());
    if (trainer.state().epochs_done < cfg.train.epochs) trainer.state().stopped_early = false;
  }
  trainer.run([&](const EpochStats&) {
    if (on_epoch) on_epoch(r, trainer.state());
  });
  r.state = trainer.state();
  r.test = evaluate(*r.model, r.tokens, r.split.test).report;
  if (!data.unbiased.empty()) r.unbiased = evaluate(*r.model, r.tokens, data.unbiased).report;
  return r;
}

Checkpoint make_checkpoint(const DebiasRecModel& model, const RunConfig& cfg, const Vocab& vocab,
                           std::int64_t test_start) {
  Checkpoint c;
  c.vocab_hash = vocab.hash();
  c.meta = config_meta(cfg);
  c.meta["kind"] = "model";
  c.meta["mode"] = to_string(cfg.model.mode);
  c.meta["test_start"] = std::to_string(test_start);
  c.meta["vocab_size"] = std::to_string(vocab.size());
  c.meta["version"] = DEBIASREC_VERSION;
  const ParamStore& store = model.params();
  for (std::size_t p = 0; p < store.size(); ++p) c.tensors.emplace_back(store.name(ParamId{p}), store.value(ParamId{p}));
  return c;
}

std::unique_ptr<DebiasRecModel> model_from_checkpoint(const Checkpoint& ckpt, std::size_t vocab_size,
                                                      RunConfig* cfg_out) {
  const auto prof = ckpt.meta.find("config.profile");
  RunConfig cfg = profile_by_name(prof == ckpt.meta.end() ? "paper" : prof->second);
  for (const auto& [k, v] : ckpt.meta) {
    if (k.rfind("config.", 0) == 0 && k != "config.profile") set_config_value(cfg, k.substr(7), v);
  }
  auto model = std::make_unique<DebiasRecModel>(cfg.model, vocab_size);
  ParamStore& store = model->params();
  for (std::size_t p = 0; p < store.size(); ++p) {
    const ParamId id{p};
    const Mat* m = ckpt.find(store.name(id));
    if (!m) throw DataError("checkpoint: missing tensor " + store.name(id));
    if (m->rows() != store.value(id).rows() || m->cols() != store.value(id).cols()) {
      throw DataError("checkpoint: tensor " + store.name(id) + " has the wrong shape");
    }
    store.value(id) = *m;
  }
  if (cfg_out) *cfg_out = cfg;
  return model;
}

void write_manifest(const std::string& out_dir, const std::string& command, const std::vector<std::string>& inputs,
                    const RunConfig& cfg) {
  std::string m = "command = " + command + "\n";
  m += "code_version = " DEBIASREC_VERSION "\n";
  m += "config = config.resolved\n";
  m += "config_hash = " + std::to_string(fnv1a64(format_run_config(cfg))) + "\n";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    m += "input." + std::to_string(i) + " = " + inputs[i] + "\n";
    m += "input." + std::to_string(i) + ".fnv1a64 = " + std::to_string(fnv1a64(read_text_file(inputs[i]))) + "\n";
  }
  write_text_file(path_in(out_dir, "manifest.txt"), m);
  write_text_file(path_in(out_dir, "config.resolved"), format_run_config(cfg));
}

void cmd_simulate(const RunConfig& cfg, const std::string& out_dir, bool force) {
  validate_run_config(cfg);
  const fs::path p(out_dir);
  if (fs::exists(p) && fs::is_directory(p) && !fs::is_empty(p) && !force) {
    throw ConfigError(out_dir + " is not empty (use --force to overwrite)");
  }
  ensure_out_dir(out_dir);
  SimCatalog cat = generate_catalog(cfg.sim);
  SimLogs logs = generate_logs(cfg.sim, cat.truth);
  write_news(path_in(out_dir, "news.tsv"), cat.catalog);
  write_behaviors(path_in(out_dir, "behaviors.tsv"), logs.behaviors, cat.catalog);
  write_behaviors(path_in(out_dir, "unbiased.tsv"), logs.unbiased, cat.catalog);
  write_truth(out_dir, cat.truth, cat.catalog);
  write_manifest(out_dir, "simulate", {}, cfg);
}

TrainResult cmd_train(const RunConfig& cfg, const std::string& data_dir, const std::string& out_dir, bool resume) {
  validate_run_config(cfg);
  const Dataset data = load_dataset(data_dir, cfg.model.max_position);
  ensure_out_dir(out_dir);
  const std::string last_path = path_in(out_dir, "last.ckpt");

  std::optional<Checkpoint> previous;
  if (resume) {
    if (!fs::exists(last_path)) throw DataError("nothing to resume: " + last_path + " not found");
    previous = load_checkpoint(last_path);
    for (const auto& [k, v] : config_meta(cfg)) {
      if (resumable_key(k)) continue;
      const auto it = previous->meta.find(k);
      if (it == previous->meta.end() || it->second != v) {
        throw ConfigError("cannot resume: config key '" + k.substr(7) + "' differs from " + last_path);
      }
    }
  }

  const std::string vocab_path = path_in(out_dir, "vocab.tsv");
  TrainResult r = train_model(
      cfg, data,
      [&](const TrainResult& progress, const TrainState& state) {
        progress.vocab.save(vocab_path);
        save_checkpoint(last_path, resumable_checkpoint(*progress.model, cfg, progress.vocab, progress.test_start, state));
        write_text_file(path_in(out_dir, "history.csv"), format_history_csv(state.history));
      },
      previous ? &*previous : nullptr);
  save_checkpoint(path_in(out_dir, "model.ckpt"), make_checkpoint(*r.model, cfg, r.vocab, r.test_start));
  write_report(path_in(out_dir, "test_report.csv"), r.test);
  if (r.unbiased) write_report(path_in(out_dir, "unbiased_report.csv"), *r.unbiased);
  std::vector<std::string> inputs = {path_in(data_dir, "news.tsv"), path_in(data_dir, "behaviors.tsv")};
  if (!data.unbiased.empty()) inputs.push_back(path_in(data_dir, "unbiased.tsv"));
  write_manifest(out_dir, resume ? "train --resume" : "train", inputs, cfg);
  return r;
}

EvalReport cmd_eval(const EvalRequest& req) {
  const Checkpoint ckpt = load_checkpoint(req.checkpoint);
  const auto mode_it = ckpt.meta.find("mode");
  if (mode_it == ckpt.meta.end()) throw DataError("checkpoint: missing mode metadata");
  if (req.expect_mode && to_string(*req.expect_mode) != mode_it->second) {
    throw ConfigError("mode mismatch with checkpoint metadata: requested " + to_string(*req.expect_mode) +
                      ", checkpoint was trained as " + mode_it->second);
  }
  const std::string vocab_path =
      req.vocab.empty() ? (fs::path(req.checkpoint).parent_path() / "vocab.tsv").string() : req.vocab;
  const Vocab vocab = Vocab::load(vocab_path);
  if (vocab.hash() != ckpt.vocab_hash) throw DataError("vocabulary " + vocab_path + " does not match the checkpoint");
  RunConfig cfg;
  const auto model = model_from_checkpoint(ckpt, vocab.size(), &cfg);

  const std::string news_path =
      req.news.empty() ? (fs::path(req.data).parent_path() / "news.tsv").string() : req.news;
  const NewsCatalog catalog = load_news(news_path);
  std::vector<ImpressionRecord> imps = load_behaviors(req.data, catalog, cfg.model.max_position);
  if (req.test_window) {
    const auto ts = ckpt.meta.find("test_start");
    if (ts == ckpt.meta.end()) throw DataError("checkpoint: missing test_start metadata");
    const std::int64_t start = std::stoll(ts->second);
    std::erase_if(imps, [&](const ImpressionRecord& r) { return r.timestamp < start; });
  }
  if (imps.empty()) throw DataError(req.data + ": no impressions to evaluate");
  const NewsTokens tokens = tokenize_catalog(catalog, vocab, cfg.model.max_title_len);

  EvalOptions opt;
  opt.collect_scores = !req.dump_scores.empty();
  opt.collect_attention = !req.dump_attention.empty();
  const EvalOutput out = evaluate(*model, tokens, imps, opt);
  if (!req.out.empty()) write_report(req.out, out.report);
  if (opt.collect_scores) write_text_file(req.dump_scores, format_score_dump(out.scores, catalog));
  if (opt.collect_attention) write_text_file(req.dump_attention, format_attention_dump(out.attention, catalog));
  return out.report;
}

RunConfig gradcheck_profile() {
  RunConfig c = desk_profile();
  c.profile = "desk";
  c.model.word_dim = 16;
  c.model.filters = 16;
  c.model.attn_dim = 16;
  c.model.bias_dim = 16;
  c.model.max_title_len = 8;
  c.model.max_history = 4;
  c.model.max_position = 10;
  c.train.negatives = 2;
  c.sim.n_users = 6;
  c.sim.n_news = 80;
  c.sim.n_topics = 4;
  c.sim.vocab_size = 198;  // + padding and unknown = 200 ids
  c.sim.common_words = 38;
  c.sim.history_min = 4;
  c.sim.history_max = 8;
  c.sim.train_impressions_per_user = 4;
  c.sim.test_impressions_per_user = 1;
  c.sim.unbiased_impressions_per_user = 0;
  return c;
}

GradCheckReport cmd_gradcheck(const GradCheckRequest& req) {
  validate_run_config(req.cfg);
  const Dataset data = simulate_dataset(req.cfg.sim);
  std::vector<std::string> corpus;
  for (const auto& a : data.catalog.articles()) corpus.push_back(a.title);
  const Vocab vocab = build_vocab(corpus, req.cfg.min_count);
  const NewsTokens tokens = tokenize_catalog(data.catalog, vocab, req.cfg.model.max_title_len);
  DebiasRecModel model(req.cfg.model, vocab.size());
  model.init(derive_seed(req.cfg.train.seed, kInitStream));

  std::vector<TrainInstance> batch;
  Rng rng(derive_seed(req.cfg.train.seed, 0x6C));
  for (std::size_t i = 0; i < data.behaviors.size() && batch.size() < req.instances; ++i) {
    for (auto& inst : sample_negatives(data.behaviors[i], i, req.cfg.train.negatives, rng)) {
      if (batch.size() < req.instances) batch.push_back(std::move(inst));
    }
  }
  if (batch.empty()) throw DataError("gradcheck: simulated batch has no clicks");

  const ParamId corrupted = model.params().id("content.attn.query");
  const LossFn loss = [&](const ParamStore&, Grads* g) {
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      Rng dropout(derive_seed(req.cfg.train.seed, 0xD0, i));
      total += model.instance_loss(data.behaviors[batch[i].impression], batch[i], tokens, true, dropout, g);
    }
    if (g && req.corrupt) {
      for (double& x : (*g)[corrupted].flat()) x *= 1.5;
    }
    return total;
  };
  Rng pick(derive_seed(req.cfg.train.seed, 0x9C));
  return grad_check(loss, model.params(), req.eps, req.sample, pick);
}

AnalyzeResult cmd_analyze(const std::string& behaviors, const std::string& news, const std::string& out_dir,
                          int max_position) {
  const NewsCatalog catalog = load_news(news);
  const auto imps = load_behaviors(behaviors, catalog, std::max(max_position, 1 << 20));
  std::size_t displays = 0;
  for (const auto& r : imps) displays += r.candidates.size();
  if (displays == 0) throw DataError(behaviors + ": empty log (no displayed candidates)");

  AnalyzeResult a;
  a.ctr = ctr_by_bucket(imps);
  a.table = size_position_table(imps, max_position);
  ContingencyTable trimmed;
  std::vector<bool> keep_col(a.table.counts.empty() ? 0 : a.table.counts[0].size(), false);
  for (const auto& row : a.table.counts) {
    for (std::size_t j = 0; j < row.size(); ++j) keep_col[j] = keep_col[j] || row[j] > 0.0;
  }
  for (const auto& row : a.table.counts) {
    double sum = 0.0;
    std::vector<double> r;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (keep_col[j]) r.push_back(row[j]);
      sum += row[j];
    }
    if (sum > 0.0) trimmed.counts.push_back(std::move(r));
  }
  a.chi = chi_square(trimmed);

  ensure_out_dir(out_dir);
  write_text_file(path_in(out_dir, "ctr_position.csv"), a.ctr.position_csv());
  write_text_file(path_in(out_dir, "ctr_size.csv"), a.ctr.size_csv());
  char buf[256];
  std::snprintf(buf, sizeof(buf), "statistic,dof,critical_001,significant_at_001\n%.10f,%d,%.10f,%s\n",
                a.chi.statistic, a.chi.dof, a.chi.critical_001, a.chi.significant_at_001 ? "true" : "false");
  write_text_file(path_in(out_dir, "chi_square.csv"), buf);
  return a;
}

AblationVariant parse_ablation_variant(const std::string& name) {
  if (name == "full") return {name, ScoringMode::Full, true};
  if (name == "no_baum") return {name, ScoringMode::Full, false};
  if (name == "no_bacp") return {name, ScoringMode::NoBacp, true};
  if (name == "no_both") return {name, ScoringMode::NoBacp, false};
  if (name == "no_debias") return {name, ScoringMode::NoDebias, true};
  if (name == "pal") return {name, ScoringMode::Pal, true};
  throw ConfigError("unknown ablation variant '" + name + "' (full, no_baum, no_bacp, no_both, no_debias, pal)");
}

std::vector<AblationCell> summarize_ablation(const std::vector<AblationRun>& runs) {
  std::vector<AblationCell> cells;
  std::vector<std::vector<std::array<double, 5>>> values;
  for (const auto& r : runs) {
    std::size_t c = 0;
    while (c < cells.size() && !(cells[c].variant == r.variant && cells[c].brm == r.brm)) ++c;
    if (c == cells.size()) {
      cells.push_back({r.variant, r.brm, 0, {}, {}});
      values.emplace_back();
    }
    values[c].push_back({r.test.auc, r.test.mrr, r.test.ndcg5, r.test.ndcg10, r.unbiased_auc});
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& v = values[c];
    const double n = static_cast<double>(v.size());
    cells[c].runs = v.size();
    for (std::size_t k = 0; k < 5; ++k) {
      double mean = 0.0;
      for (const auto& x : v) mean += x[k];
      mean /= n;
      double ss = 0.0;
      for (const auto& x : v) ss += (x[k] - mean) * (x[k] - mean);
      cells[c].mean[k] = mean;
      cells[c].stddev[k] = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
  }
  return cells;
}

std::string format_ablation_csv(const std::vector<AblationCell>& cells) {
  std::string out =
      "variant,brm,runs,auc_mean,auc_std,mrr_mean,mrr_std,ndcg5_mean,ndcg5_std,ndcg10_mean,ndcg10_std,"
      "unbiased_auc_mean,unbiased_auc_std\n";
  char buf[64];
  for (const auto& c : cells) {
    out += c.variant + "," + to_string(c.brm) + "," + std::to_string(c.runs);
    for (std::size_t k = 0; k < 5; ++k) {
      std::snprintf(buf, sizeof(buf), ",%.6f,%.6f", c.mean[k], c.stddev[k]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::vector<AblationCell> cmd_ablate(const RunConfig& cfg, const std::string& data_dir, const std::string& out_dir,
                                     const std::vector<std::string>& variants, const std::vector<BrmVariant>& brms,
                                     std::size_t repeats) {
  validate_run_config(cfg);
  if (variants.empty() || brms.empty() || repeats == 0) throw ConfigError("ablate: empty grid");
  std::vector<AblationVariant> vs;
  for (const auto& v : variants) vs.push_back(parse_ablation_variant(v));
  const Dataset data = load_dataset(data_dir, cfg.model.max_position);
  ensure_out_dir(out_dir);

  std::vector<AblationRun> runs;
  std::string per_run = "variant,brm,seed,auc,mrr,ndcg5,ndcg10,unbiased_auc\n";
  for (const auto& v : vs) {
    for (BrmVariant brm : brms) {
      for (std::size_t rep = 0; rep < repeats; ++rep) {
        RunConfig c = cfg;
        c.model.mode = v.mode;
        c.model.baum_enabled = v.baum;
        c.model.brm = brm;
        c.train.seed = cfg.train.seed + rep;
        const TrainResult tr = train_model(c, data);
        AblationRun run{v.name, brm, c.train.seed, tr.test, tr.unbiased ? tr.unbiased->auc : 0.0};
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%s,%s,%llu,%.6f,%.6f,%.6f,%.6f,%.6f\n", v.name.c_str(),
                      to_string(brm).c_str(), static_cast<unsigned long long>(run.seed), run.test.auc, run.test.mrr,
                      run.test.ndcg5, run.test.ndcg10, run.unbiased_auc);
        per_run += buf;
        if (cfg.train.verbose) std::cerr << buf;
        runs.push_back(std::move(run));
      }
    }
  }
  const auto cells = summarize_ablation(runs);
  write_text_file(path_in(out_dir, "ablation.csv"), format_ablation_csv(cells));
  write_text_file(path_in(out_dir, "ablation_runs.csv"), per_run);
  std::vector<std::string> inputs = {path_in(data_dir, "news.tsv"), path_in(data_dir, "behaviors.tsv")};
  if (!data.unbiased.empty()) inputs.push_back(path_in(data_dir, "unbiased.tsv"));
  write_manifest(out_dir, "ablate", inputs, cfg);
  return cells;
}

}  // namespace debiasrec
