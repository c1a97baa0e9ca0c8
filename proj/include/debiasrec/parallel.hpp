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

namespace debiasrec {

// Thread count for OpenMP regions: an explicit override if set, else
// DEBIASREC_THREADS, else the OpenMP default.
int worker_threads();

// 0 clears the override.
void set_worker_threads(int n);

// Gradient reduction always uses this many shards, independent of the
// thread count, so results are bit-identical for any number of threads.
inline constexpr int kGradShards = 8;

}  // namespace debiasrec
