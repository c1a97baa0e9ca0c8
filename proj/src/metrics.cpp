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

#include "debiasrec/metrics.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "debiasrec/click.hpp"

namespace debiasrec {

std::optional<double> auc(std::span<const double> scores, std::span<const int> labels) {
  require_same(scores.size(), labels.size(), "auc");
  // Rank-sum with average ranks for ties: equivalent to pairwise counting
  // with half credit for tied pairs.
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) {
        pos_rank_sum += avg_rank;
        ++n_pos;
      }
    }
    i = j + 1;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

std::optional<double> mrr(std::span<const double> scores, std::span<const int> labels) {
  require_same(scores.size(), labels.size(), "mrr");
  const auto order = rank_by_scores(scores);
  double sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (labels[order[r]] == 1) {
      sum += 1.0 / static_cast<double>(r + 1);
      ++n_pos;
    }
  }
  if (n_pos == 0) return std::nullopt;
  return sum / static_cast<double>(n_pos);
}

std::optional<double> ndcg_at_k(std::span<const double> scores, std::span<const int> labels, std::size_t k) {
  require_same(scores.size(), labels.size(), "ndcg");
  const auto order = rank_by_scores(scores);
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += (y == 1);
  if (n_pos == 0) return std::nullopt;
  double dcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, order.size()); ++r) {
    if (labels[order[r]] == 1) dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  }
  double ideal = 0.0;
  for (std::size_t r = 0; r < std::min(k, n_pos); ++r) ideal += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  return dcg / ideal;
}

ImpressionMetrics impression_metrics(std::span<const double> scores, std::span<const int> labels) {
  ImpressionMetrics m;
  m.auc = auc(scores, labels);
  m.mrr = mrr(scores, labels);
  m.ndcg5 = ndcg_at_k(scores, labels, 5);
  m.ndcg10 = ndcg_at_k(scores, labels, 10);
  return m;
}

EvalReport aggregate(std::vector<ImpressionMetrics> rows, bool keep_rows) {
  EvalReport r;
  r.impressions = rows.size();
  double s_auc = 0.0, s_mrr = 0.0, s5 = 0.0, s10 = 0.0;
  for (const auto& m : rows) {
    if (m.auc) {
      s_auc += *m.auc;
      ++r.auc_count;
    } else {
      ++r.skipped_auc;
    }
    if (m.mrr) {
      s_mrr += *m.mrr;
      s5 += *m.ndcg5;
      s10 += *m.ndcg10;
      ++r.rank_count;
    } else {
      ++r.skipped_rank;
    }
  }
  if (r.auc_count == 0 && r.rank_count == 0) throw std::invalid_argument("evaluate: no valid impressions");
  if (r.auc_count) r.auc = s_auc / static_cast<double>(r.auc_count);
  if (r.rank_count) {
    const double n = static_cast<double>(r.rank_count);
    r.mrr = s_mrr / n;
    r.ndcg5 = s5 / n;
    r.ndcg10 = s10 / n;
  }
  if (keep_rows) r.rows = std::move(rows);
  return r;
}

std::string EvalReport::to_csv() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "auc,mrr,ndcg5,ndcg10,impressions,auc_impressions,rank_impressions,skipped_auc,skipped_rank\n"
                "%.10f,%.10f,%.10f,%.10f,%zu,%zu,%zu,%zu,%zu\n",
                auc, mrr, ndcg5, ndcg10, impressions, auc_count, rank_count, skipped_auc, skipped_rank);
  return buf;
}

std::string EvalReport::to_table() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "  AUC      %.4f\n  MRR      %.4f\n  nDCG@5   %.4f\n  nDCG@10  %.4f\n"
                "  impressions %zu (auc %zu, ranked %zu, skipped auc %zu, skipped rank %zu)\n",
                auc, mrr, ndcg5, ndcg10, impressions, auc_count, rank_count, skipped_auc, skipped_rank);
  return buf;
}

CtrTables ctr_by_bucket(const std::vector<ImpressionRecord>& impressions) {
  CtrTables t;
  for (const auto& r : impressions) {
    for (const auto& c : r.candidates) {
      auto& p = t.by_position[c.bias.position];
      auto& s = t.by_size[static_cast<std::size_t>(c.bias.size)];
      ++p.displays;
      ++s.displays;
      if (c.label == 1) {
        ++p.clicks;
        ++s.clicks;
      }
    }
  }
  return t;
}

std::string CtrTables::position_csv() const {
  std::ostringstream out;
  out << "position,displays,clicks,ctr\n";
  char buf[64];
  for (const auto& [pos, b] : by_position) {
    std::snprintf(buf, sizeof(buf), "%.10f", b.ctr());
    out << pos << ',' << b.displays << ',' << b.clicks << ',' << buf << '\n';
  }
  return out.str();
}

std::string CtrTables::size_csv() const {
  std::ostringstream out;
  out << "size,displays,clicks,ctr\n";
  char buf[64];
  for (int s = 0; s < kNumSizes; ++s) {
    const auto& b = by_size[static_cast<std::size_t>(s)];
    if (b.displays == 0) continue;
    std::snprintf(buf, sizeof(buf), "%.10f", b.ctr());
    out << size_name(static_cast<NewsSize>(s)) << ',' << b.displays << ',' << b.clicks << ',' << buf << '\n';
  }
  return out.str();
}

ContingencyTable size_position_table(const std::vector<ImpressionRecord>& impressions, int max_position) {
  ContingencyTable t;
  t.counts.assign(kNumSizes, std::vector<double>(static_cast<std::size_t>(max_position), 0.0));
  for (const auto& r : impressions) {
    for (const auto& c : r.candidates) {
      if (c.bias.position > max_position) continue;
      t.counts[static_cast<std::size_t>(c.bias.size)][static_cast<std::size_t>(c.bias.position - 1)] += 1.0;
    }
  }
  return t;
}

double chi_square_critical_001(int dof) {
  if (dof < 1) throw std::invalid_argument("chi-square: dof must be >= 1");
  const boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::quantile(boost::math::complement(dist, 0.01));
}

ChiSquareResult chi_square(const ContingencyTable& table) {
  const auto& o = table.counts;
  const std::size_t rows = o.size();
  if (rows < 2) throw std::invalid_argument("chi-square: need at least two rows");
  const std::size_t cols = o[0].size();
  if (cols < 2) throw std::invalid_argument("chi-square: need at least two columns");
  std::vector<double> row_sum(rows, 0.0);
  std::vector<double> col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (o[i].size() != cols) throw std::invalid_argument("chi-square: ragged table");
    for (std::size_t j = 0; j < cols; ++j) {
      if (!(o[i][j] >= 0.0)) throw std::invalid_argument("chi-square: negative count");
      row_sum[i] += o[i][j];
      col_sum[j] += o[i][j];
      total += o[i][j];
    }
  }
  for (double s : row_sum)
    if (s == 0.0) throw std::invalid_argument("chi-square: all-zero row");
  for (double s : col_sum)
    if (s == 0.0) throw std::invalid_argument("chi-square: all-zero column");

  ChiSquareResult r;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double e = row_sum[i] * col_sum[j] / total;
      const double d = o[i][j] - e;
      r.statistic += d * d / e;
    }
  }
  r.dof = static_cast<int>((rows - 1) * (cols - 1));
  r.critical_001 = chi_square_critical_001(r.dof);
  r.significant_at_001 = r.statistic > r.critical_001;
  return r;
}

}  // namespace debiasrec
