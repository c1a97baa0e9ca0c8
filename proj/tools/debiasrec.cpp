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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "debiasrec/commands.hpp"
#include "debiasrec/parallel.hpp"

using namespace debiasrec;

namespace {

struct ConfigFlags {
  std::string config_path;
  std::string profile;
  std::vector<std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "key = value config file");
    app->add_option("--profile", profile, "base profile when no config file names one (paper, desk)");
    app->add_option("--set", overrides, "override one key: --set key=value (repeatable)");
  }

  RunConfig resolve(const RunConfig& fallback) const {
    RunConfig cfg;
    if (!config_path.empty()) {
      cfg = load_run_config(config_path);
      if (!profile.empty() && profile != cfg.profile) throw ConfigError("--profile conflicts with " + config_path);
    } else {
      cfg = profile.empty() ? fallback : profile_by_name(profile);
    }
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(' '));
        s.erase(s.find_last_not_of(' ') + 1);
        return s;
      };
      set_config_value(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    validate_run_config(cfg);
    return cfg;
  }
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DebiasRec: bias-aware news recommendation with a biased-click simulator"};
  app.require_subcommand(1);
  int threads = 0;
  bool verbose = false;
  app.add_option("--threads", threads, "worker threads (default: DEBIASREC_THREADS or all cores)");
  app.add_flag("-v,--verbose", verbose, "progress on stderr");

  ConfigFlags sim_flags, train_flags, grad_flags, ablate_flags;

  auto* sim = app.add_subcommand("simulate", "generate a synthetic biased-click dataset");
  std::string sim_out;
  bool force = false;
  sim_flags.attach(sim);
  sim->add_option("-o,--out", sim_out, "output directory")->required();
  sim->add_flag("--force", force, "overwrite a non-empty output directory");

  auto* train = app.add_subcommand("train", "train a model on a dataset directory");
  std::string train_data, train_out;
  bool resume = false;
  train_flags.attach(train);
  train->add_option("-d,--data", train_data, "dataset directory")->required();
  train->add_option("-o,--out", train_out, "run directory")->required();
  train->add_flag("--resume", resume, "continue from <out>/last.ckpt");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a behaviors file");
  EvalRequest req;
  std::string expect_mode;
  eval->add_option("--checkpoint", req.checkpoint, "model checkpoint")->required();
  eval->add_option("-d,--data", req.data, "behaviors-format file")->required();
  eval->add_option("--news", req.news, "news file (default: news.tsv beside --data)");
  eval->add_option("--vocab", req.vocab, "vocabulary (default: vocab.tsv beside --checkpoint)");
  eval->add_option("-o,--out", req.out, "report CSV (default: table on stdout)");
  eval->add_option("--dump-scores", req.dump_scores, "CSV of s_p, s_b, s_c per candidate");
  eval->add_option("--dump-attention", req.dump_attention, "CSV of history attention per user");
  eval->add_option("--mode", expect_mode, "expected scoring mode; must match the checkpoint");
  eval->add_flag("--test-window", req.test_window, "only impressions at or after the training split boundary");

  auto* grad = app.add_subcommand("gradcheck", "compare analytic and finite-difference gradients");
  GradCheckRequest greq;
  grad_flags.attach(grad);
  grad->add_option("--eps", greq.eps, "finite-difference step");
  grad->add_option("--tol", greq.tolerance, "maximum relative error");
  grad->add_option("--sample", greq.sample, "coordinates checked per parameter");
  grad->add_flag("--corrupt", greq.corrupt, "negative control: corrupt one analytic gradient");

  auto* analyze = app.add_subcommand("analyze", "CTR by position/size and a chi-square dependence test");
  std::string an_data, an_news, an_out;
  int an_positions = 10;
  analyze->add_option("-d,--data", an_data, "behaviors-format file")->required();
  analyze->add_option("--news", an_news, "news file (default: news.tsv beside --data)");
  analyze->add_option("-o,--out", an_out, "output directory")->required();
  analyze->add_option("--positions", an_positions, "position columns in the contingency table");

  auto* ablate = app.add_subcommand("ablate", "train a grid of variants and report mean and std");
  std::string ab_data, ab_out, ab_variants = "full,no_baum,no_bacp,no_both", ab_brms = "interaction";
  std::size_t repeats = 3;
  ablate_flags.attach(ablate);
  ablate->add_option("-d,--data", ab_data, "dataset directory")->required();
  ablate->add_option("-o,--out", ab_out, "output directory")->required();
  ablate->add_option("--variants", ab_variants, "comma list: full,no_baum,no_bacp,no_both,no_debias,pal");
  ablate->add_option("--brms", ab_brms, "comma list: interaction,linear_concat,position_only,size_only,none");
  ablate->add_option("--repeats", repeats, "runs per cell (seeds seed, seed+1, ...)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (threads > 0) set_worker_threads(threads);
    if (*sim) {
      cmd_simulate(sim_flags.resolve(desk_profile()), sim_out, force);
    } else if (*train) {
      RunConfig cfg = train_flags.resolve(desk_profile());
      cfg.train.verbose = verbose;
      const TrainResult r = cmd_train(cfg, train_data, train_out, resume);
      std::cout << "test\n" << r.test.to_table();
      if (r.unbiased) std::cout << "unbiased\n" << r.unbiased->to_table();
    } else if (*eval) {
      if (!expect_mode.empty()) req.expect_mode = parse_scoring_mode(expect_mode);
      const EvalReport r = cmd_eval(req);
      if (req.out.empty()) std::cout << r.to_table();
    } else if (*grad) {
      greq.cfg = grad_flags.resolve(gradcheck_profile());
      const GradCheckReport rep = cmd_gradcheck(greq);
      for (const auto& p : rep.params) {
        std::printf("%-32s checked %3zu  max_rel %.3e  max_abs %.3e\n", p.name.c_str(), p.checked, p.max_rel_error,
                    p.max_abs_error);
      }
      const bool ok = rep.passed(greq.tolerance);
      std::printf("%s: max relative error %.3e (%s), tolerance %.1e\n", ok ? "PASS" : "FAIL", rep.max_rel_error,
                  rep.worst_param.c_str(), greq.tolerance);
      return ok ? kExitOk : kExitNumeric;
    } else if (*analyze) {
      if (an_news.empty()) an_news = (std::filesystem::path(an_data).parent_path() / "news.tsv").string();
      const AnalyzeResult a = cmd_analyze(an_data, an_news, an_out, an_positions);
      std::printf("chi-square %.4f  dof %d  critical(0.01) %.4f  significant %s\n", a.chi.statistic, a.chi.dof,
                  a.chi.critical_001, a.chi.significant_at_001 ? "yes" : "no");
    } else if (*ablate) {
      RunConfig cfg = ablate_flags.resolve(desk_profile());
      cfg.train.verbose = verbose;
      std::vector<BrmVariant> brms;
      for (const auto& b : split_list(ab_brms)) brms.push_back(parse_brm_variant(b));
      const auto cells = cmd_ablate(cfg, ab_data, ab_out, split_list(ab_variants), brms, repeats);
      std::cout << format_ablation_csv(cells);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  }
  return kExitOk;
}
