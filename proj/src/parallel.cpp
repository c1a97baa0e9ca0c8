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

#include "debiasrec/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace debiasrec {

namespace {

std::atomic<int> g_override{0};

int env_threads() {
  const char* v = std::getenv("DEBIASREC_THREADS");
  if (!v || !*v) return 0;
  try {
    const int n = std::stoi(v);
    return n > 0 ? n : 0;
  } catch (...) {
    return 0;
  }
}

}  // namespace

int worker_threads() {
  if (const int o = g_override.load(); o > 0) return o;
  if (const int e = env_threads(); e > 0) return e;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_worker_threads(int n) { g_override.store(n > 0 ? n : 0); }

}  // namespace debiasrec
