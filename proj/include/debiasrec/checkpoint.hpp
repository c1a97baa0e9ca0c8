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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "debiasrec/tensor.hpp"

namespace debiasrec {

// Binary checkpoint, version 1, all integers and floats little-endian:
//
//   magic     8 bytes  "DBRCKPT1"
//   version   u32
//   vocab     u64      FNV-1a hash of the vocabulary file
//   meta      u32 length + bytes ("key = value" lines: config echo, mode, ...)
//   count     u32      number of tensors
//   tensor*   u32 name length + name bytes, u64 rows, u64 cols, rows*cols f64
struct Checkpoint {
  std::uint64_t vocab_hash = 0;
  std::map<std::string, std::string> meta;
  std::vector<std::pair<std::string, Mat>> tensors;  // file order

  const Mat* find(const std::string& name) const;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::string& bytes);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace debiasrec
