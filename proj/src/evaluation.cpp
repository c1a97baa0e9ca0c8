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

#include "debiasrec/evaluation.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include "debiasrec/parallel.hpp"

namespace debiasrec {

std::vector<double> ranking_scores(const DebiasRecModel& model, const Mat& news_vectors,
                                   const ImpressionRecord& impression) {
  const Vec u = model.encode_user(impression.history, news_vectors);
  std::vector<double> s(impression.candidates.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    s[j] = ranking_score(dot(u.span(), news_vectors.row_span(impression.candidates[j].news)), model.config().mode);
  }
  return s;
}

std::vector<std::vector<std::size_t>> rank_impressions(const DebiasRecModel& model, const NewsTokens& news,
                                                       const std::vector<ImpressionRecord>& impressions) {
  for (const auto& imp : impressions) {
    if (imp.candidates.empty()) throw std::invalid_argument("rank: empty candidate list");
  }
  const Mat vecs = model.encode_catalog(news);
  std::vector<std::vector<std::size_t>> out(impressions.size());
  const auto n = static_cast<long>(impressions.size());
#pragma omp parallel for schedule(dynamic, 32) num_threads(worker_threads())
  for (long i = 0; i < n; ++i) {
    const auto& imp = impressions[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = rank_by_scores(ranking_scores(model, vecs, imp));
  }
  return out;
}

namespace {

struct PerImpression {
  ImpressionMetrics metrics;
  std::vector<ScoreRow> scores;
};

PerImpression evaluate_one(const DebiasRecModel& model, const Mat& vecs, const ImpressionRecord& imp,
                           const EvalOptions& options) {
  PerImpression out;
  const std::vector<double> s = ranking_scores(model, vecs, imp);
  std::vector<int> labels(imp.candidates.size());
  for (std::size_t j = 0; j < labels.size(); ++j) labels[j] = imp.candidates[j].label;
  out.metrics = impression_metrics(s, labels);
  out.metrics.impression_id = imp.impression_id;
  if (options.collect_scores) {
    const ScoringMode mode = model.config().mode;
    const Vec u = model.encode_user(imp.history, vecs);
    for (std::size_t j = 0; j < labels.size(); ++j) {
      const auto& c = imp.candidates[j];
      ScoreRow row;
      row.impression_id = imp.impression_id;
      row.news = c.news;
      // The bias score is reported for inspection only; it never ranks.
      const double raw_p = dot(u.span(), vecs.row_span(c.news));
      const double raw_b = model.bias_score(c.bias);
      if (mode == ScoringMode::Pal) {
        row.preference = sigmoid(raw_p);
        row.bias = sigmoid(raw_b);
        row.click = row.preference * row.bias;
      } else {
        row.preference = raw_p;
        row.bias = mode == ScoringMode::Full ? raw_b : 0.0;
        row.click = row.preference + row.bias;
      }
      row.label = c.label;
      out.scores.push_back(std::move(row));
    }
  }
  return out;
}

std::vector<AttentionRow> attention_rows(const DebiasRecModel& model, const Mat& vecs,
                                         const std::vector<ImpressionRecord>& impressions) {
  std::vector<AttentionRow> rows;
  std::set<std::string> seen;
  for (const auto& imp : impressions) {
    if (!seen.insert(imp.user_id).second) continue;
    DebiasRecModel::UserAttention att;
    model.encode_user(imp.history, vecs, &att);
    const auto hist = recent_history(imp.history, model.config().max_history);
    for (std::size_t i = 0; i < hist.size(); ++i) {
      AttentionRow r;
      r.user_id = imp.user_id;
      r.news = hist[i].news;
      r.bias = hist[i].bias;
      r.content_score = att.content_scores[i];
      r.bias_score = att.bias_scores.empty() ? 0.0 : att.bias_scores[i];
      r.alpha = att.alpha[i];
      rows.push_back(r);
    }
  }
  return rows;
}

EvalOutput finish(const DebiasRecModel& model, const Mat& vecs, const std::vector<ImpressionRecord>& impressions,
                  std::vector<PerImpression>& per, const EvalOptions& options) {
  EvalOutput out;
  std::vector<ImpressionMetrics> rows;
  rows.reserve(per.size());
  for (auto& p : per) {
    rows.push_back(std::move(p.metrics));
    for (auto& s : p.scores) out.scores.push_back(std::move(s));
  }
  out.report = aggregate(std::move(rows), options.keep_rows);
  if (options.collect_attention) out.attention = attention_rows(model, vecs, impressions);
  return out;
}

}  // namespace

EvalOutput evaluate(const DebiasRecModel& model, const NewsTokens& news,
                    const std::vector<ImpressionRecord>& impressions, const EvalOptions& options) {
  if (impressions.empty()) throw std::invalid_argument("evaluate: no impressions");
  const Mat vecs = model.encode_catalog(news);
  std::vector<PerImpression> per(impressions.size());
  const auto n = static_cast<long>(impressions.size());
#pragma omp parallel for schedule(dynamic, 32) num_threads(worker_threads())
  for (long i = 0; i < n; ++i) {
    per[static_cast<std::size_t>(i)] = evaluate_one(model, vecs, impressions[static_cast<std::size_t>(i)], options);
  }
  return finish(model, vecs, impressions, per, options);
}

EvalOutput evaluate_serial(const DebiasRecModel& model, const NewsTokens& news,
                           const std::vector<ImpressionRecord>& impressions, const EvalOptions& options) {
  if (impressions.empty()) throw std::invalid_argument("evaluate: no impressions");
  const Mat vecs = model.encode_catalog_serial(news);
  std::vector<PerImpression> per;
  per.reserve(impressions.size());
  for (const auto& imp : impressions) per.push_back(evaluate_one(model, vecs, imp, options));
  return finish(model, vecs, impressions, per, options);
}

std::string format_score_dump(const std::vector<ScoreRow>& rows, const NewsCatalog& catalog) {
  std::string out = "impression_id,news_id,s_p,s_b,s_c,label\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), ",%.10g,%.10g,%.10g,%d\n", r.preference, r.bias, r.click, r.label);
    out += r.impression_id;
    out += ',';
    out += catalog[r.news].id;
    out += buf;
  }
  return out;
}

std::string format_attention_dump(const std::vector<AttentionRow>& rows, const NewsCatalog& catalog) {
  std::string out = "user_id,news_id,position,size,a_c,a_b,alpha\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), ",%d,%s,%.10g,%.10g,%.10g\n", r.bias.position, size_name(r.bias.size).c_str(),
                  r.content_score, r.bias_score, r.alpha);
    out += r.user_id;
    out += ',';
    out += catalog[r.news].id;
    out += buf;
  }
  return out;
}

}  // namespace debiasrec
