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

#include "debiasrec/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace debiasrec {

namespace {

constexpr char kMagic[8] = {'D', 'B', 'R', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) { put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(d)); }

class Reader {
 public:
  explicit Reader(const std::string& bytes) : b_(bytes) {}

  template <typename T>
  T get_le() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<unsigned char>(b_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return v;
  }
  double get_f64() { return std::bit_cast<double>(get_le<std::uint64_t>()); }
  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s = b_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw std::runtime_error("checkpoint: truncated file");
  }
  const std::string& b_;
  std::size_t pos_ = 0;
};

}  // namespace

const Mat* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, m] : tensors) {
    if (n == name) return &m;
  }
  return nullptr;
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  std::string out(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, ckpt.vocab_hash);
  std::string meta;
  for (const auto& [k, v] : ckpt.meta) meta += k + " = " + v + "\n";
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(meta.size()));
  out += meta;
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, m] : ckpt.tensors) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_le<std::uint64_t>(out, m.rows());
    put_le<std::uint64_t>(out, m.cols());
    for (double d : m.flat()) put_f64(out, d);
  }
  return out;
}

Checkpoint parse_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.get_bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw std::runtime_error("checkpoint: bad magic");
  }
  const auto version = r.get_le<std::uint32_t>();
  if (version != kCheckpointVersion) throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  Checkpoint c;
  c.vocab_hash = r.get_le<std::uint64_t>();
  std::istringstream meta(r.get_bytes(r.get_le<std::uint32_t>()));
  std::string line;
  while (std::getline(meta, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw std::runtime_error("checkpoint: bad metadata line");
    c.meta[line.substr(0, eq)] = line.substr(eq + 3);
  }
  const auto count = r.get_le<std::uint32_t>();
  for (std::uint32_t t = 0; t < count; ++t) {
    std::string name = r.get_bytes(r.get_le<std::uint32_t>());
    const auto rows = r.get_le<std::uint64_t>();
    const auto cols = r.get_le<std::uint64_t>();
    Mat m(rows, cols);
    for (double& d : m.flat()) d = r.get_f64();
    c.tensors.emplace_back(std::move(name), std::move(m));
  }
  if (!r.done()) throw std::runtime_error("checkpoint: trailing bytes");
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str());
}

}  // namespace debiasrec
