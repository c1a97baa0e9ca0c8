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

#include "debiasrec/dataio.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "debiasrec/rng.hpp"

namespace debiasrec {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string where(const std::string& source, std::size_t lineno) { return source + ":" + std::to_string(lineno) + ": "; }

// Splits on '\n', dropping a trailing '\r' from each line. A final empty line
// after the last newline is not reported.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++lineno, line);
    start = nl + 1;
  }
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

// Splits "a:b:...:z" into `fields` parts from the right so news ids may
// themselves contain ':'.
bool rsplit_colon(std::string_view item, std::size_t fields, std::vector<std::string_view>& parts) {
  parts.assign(fields, {});
  std::string_view rest = item;
  for (std::size_t k = fields - 1; k > 0; --k) {
    const auto pos = rest.rfind(':');
    if (pos == std::string_view::npos) return false;
    parts[k] = rest.substr(pos + 1);
    rest = rest.substr(0, pos);
  }
  parts[0] = rest;
  return !parts[0].empty();
}

}  // namespace

std::size_t ImpressionRecord::num_clicked() const {
  return static_cast<std::size_t>(
      std::count_if(candidates.begin(), candidates.end(), [](const CandidateEntry& c) { return c.label == 1; }));
}

void NewsCatalog::add(NewsArticle article) {
  auto [it, inserted] = index_.emplace(article.id, articles_.size());
  if (!inserted) throw DataError("duplicate news id " + article.id);
  articles_.push_back(std::move(article));
}

std::optional<std::size_t> NewsCatalog::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string read_text_file(const std::string& path) {
  if (ends_with(path, ".gz")) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw DataError("cannot open " + path);
    std::string out;
    char buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(n));
    const bool failed = n < 0;
    gzclose(f);
    if (failed) throw DataError("gzip read error in " + path);
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
  if (ends_with(path, ".gz")) {
    // Fixed compression level and no timestamp keep output byte-stable.
    gzFile f = gzopen(path.c_str(), "wb6");
    if (!f) throw std::runtime_error("cannot write " + path);
    std::size_t off = 0;
    while (off < contents.size()) {
      const auto chunk = static_cast<unsigned>(std::min<std::size_t>(contents.size() - off, 1u << 20));
      if (gzwrite(f, contents.data() + off, chunk) != static_cast<int>(chunk)) {
        gzclose(f);
        throw std::runtime_error("gzip write error in " + path);
      }
      off += chunk;
    }
    gzclose(f);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write error in " + path);
}

NewsCatalog parse_news(std::string_view text, const std::string& source) {
  NewsCatalog catalog;
  for_each_line(text, [&](std::size_t lineno, std::string_view line) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) throw DataError(where(source, lineno) + "expected news_id<TAB>title");
    NewsArticle a{std::string(line.substr(0, tab)), std::string(line.substr(tab + 1))};
    if (catalog.find(a.id)) throw DataError(where(source, lineno) + "duplicate news id " + a.id);
    catalog.add(std::move(a));
  });
  if (catalog.empty()) throw DataError(source + ": empty news file");
  return catalog;
}

NewsCatalog load_news(const std::string& path) { return parse_news(read_text_file(path), path); }

std::string format_news(const NewsCatalog& catalog) {
  std::string out;
  for (const auto& a : catalog.articles()) {
    out += a.id;
    out += '\t';
    out += a.title;
    out += '\n';
  }
  return out;
}

void write_news(const std::string& path, const NewsCatalog& catalog) { write_text_file(path, format_news(catalog)); }

std::vector<ImpressionRecord> parse_behaviors(std::string_view text, const NewsCatalog& catalog, int max_position,
                                              const std::string& source) {
  std::vector<ImpressionRecord> out;
  std::vector<std::string_view> parts;
  for_each_line(text, [&](std::size_t lineno, std::string_view line) {
    if (line.empty()) return;
    const auto fail = [&](const std::string& msg) { throw DataError(where(source, lineno) + msg); };
    const auto cols = split(line, '\t');
    if (cols.size() != 5) fail("expected 5 tab-separated columns, got " + std::to_string(cols.size()));

    ImpressionRecord rec;
    rec.impression_id = std::string(cols[0]);
    rec.user_id = std::string(cols[1]);
    if (rec.impression_id.empty() || rec.user_id.empty()) fail("empty impression or user id");
    if (!parse_int(cols[2], rec.timestamp)) fail("bad timestamp '" + std::string(cols[2]) + "'");

    auto lookup = [&](std::string_view id) {
      auto idx = catalog.find(id);
      if (!idx) fail("unknown news id " + std::string(id));
      return *idx;
    };
    auto bias = [&](std::string_view pos, std::string_view size) {
      long p = 0;
      if (!parse_int(pos, p)) fail("bad position '" + std::string(pos) + "'");
      BiasFeatures f;
      f.position = clip_position(p, max_position);
      try {
        f.size = parse_size(std::string(size));
      } catch (const std::invalid_argument&) {
        fail("bad size name '" + std::string(size) + "'");
      }
      return f;
    };

    if (cols[3] != "-") {
      for (auto item : split(cols[3], ' ')) {
        if (item.empty()) continue;
        if (!rsplit_colon(item, 3, parts)) fail("bad history entry '" + std::string(item) + "'");
        rec.history.push_back({lookup(parts[0]), bias(parts[1], parts[2])});
      }
    }
    for (auto item : split(cols[4], ' ')) {
      if (item.empty()) continue;
      if (!rsplit_colon(item, 4, parts)) fail("bad candidate entry '" + std::string(item) + "'");
      CandidateEntry c{lookup(parts[0]), bias(parts[1], parts[2]), 0};
      if (parts[3] == "1") {
        c.label = 1;
      } else if (parts[3] != "0") {
        fail("non-binary label '" + std::string(parts[3]) + "'");
      }
      rec.candidates.push_back(c);
    }
    if (rec.candidates.empty()) fail("impression without candidates");
    out.push_back(std::move(rec));
  });
  return out;
}

std::vector<ImpressionRecord> load_behaviors(const std::string& path, const NewsCatalog& catalog, int max_position) {
  return parse_behaviors(read_text_file(path), catalog, max_position, path);
}

std::string format_behaviors(const std::vector<ImpressionRecord>& impressions, const NewsCatalog& catalog) {
  std::string out;
  for (const auto& r : impressions) {
    out += r.impression_id;
    out += '\t';
    out += r.user_id;
    out += '\t';
    out += std::to_string(r.timestamp);
    out += '\t';
    if (r.history.empty()) {
      out += '-';
    } else {
      for (std::size_t i = 0; i < r.history.size(); ++i) {
        const auto& h = r.history[i];
        if (i) out += ' ';
        out += catalog[h.news].id;
        out += ':';
        out += std::to_string(h.bias.position);
        out += ':';
        out += size_name(h.bias.size);
      }
    }
    out += '\t';
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
      const auto& c = r.candidates[i];
      if (i) out += ' ';
      out += catalog[c.news].id;
      out += ':';
      out += std::to_string(c.bias.position);
      out += ':';
      out += size_name(c.bias.size);
      out += ':';
      out += c.label ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

void write_behaviors(const std::string& path, const std::vector<ImpressionRecord>& impressions,
                     const NewsCatalog& catalog) {
  write_text_file(path, format_behaviors(impressions, catalog));
}

DatasetSplit split_dataset(const std::vector<ImpressionRecord>& impressions, std::int64_t test_start,
                           double val_fraction, std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw std::invalid_argument("val_fraction must be in (0, 1)");
  std::vector<const ImpressionRecord*> pool;
  DatasetSplit s;
  for (const auto& r : impressions) {
    if (r.timestamp < test_start) {
      pool.push_back(&r);
    } else {
      s.test.push_back(r);
    }
  }
  if (pool.empty()) throw DataError("split: no impressions before the test boundary (empty training side)");
  if (s.test.empty()) throw DataError("split: no impressions at or after the test boundary (empty test side)");

  const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(pool.size())));
  if (n_val == 0 || n_val >= pool.size()) throw DataError("split: validation fraction leaves an empty side");
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, 0x5157));
  rng.shuffle(order);
  std::vector<bool> is_val(pool.size(), false);
  for (std::size_t i = 0; i < n_val; ++i) is_val[order[i]] = true;
  for (std::size_t i = 0; i < pool.size(); ++i) (is_val[i] ? s.validation : s.train).push_back(*pool[i]);
  return s;
}

}  // namespace debiasrec
