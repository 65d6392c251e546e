// Copyright 2026 The LightAlign Authors
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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lightalign {

using Real = double;

// Raised for malformed or inconsistent input data (files, IDs, shapes read
// from disk). Maps to exit code 2 in the CLI.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised for caller mistakes (bad parameter values, shape mismatches between
// in-memory arguments). Maps to exit code 1 in the CLI.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Dense row-major matrix of doubles. Rows are the unit of parallelism
// everywhere, so contiguous rows matter more than fancy abstraction.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Real> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  Real* row(std::size_t i) { return data.data() + i * cols; }
  const Real* row(std::size_t i) const { return data.data() + i * cols; }
  Real& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  Real at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  Real row_norm(std::size_t i) const {
    const Real* r = row(i);
    Real s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += r[j] * r[j];
    return std::sqrt(s);
  }

  // Scales every non-zero row to unit L2 norm. Exactly-zero rows are kept
  // as-is so that entities untouched by propagation stay silent.
  void l2_normalize_rows() {
    for (std::size_t i = 0; i < rows; ++i) {
      Real n = row_norm(i);
      if (n > 0.0) {
        Real inv = 1.0 / n;
        Real* r = row(i);
        for (std::size_t j = 0; j < cols; ++j) r[j] *= inv;
      }
    }
  }

  bool all_finite() const {
    for (Real v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// Runs fn(begin, end) over a partition of [0, n) on `threads` OS threads.
// Chunks are contiguous and disjoint, so results are independent of the
// thread count as long as fn only writes state owned by its range.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (n == 0) return;
  std::size_t want = threads <= 1 ? 1 : static_cast<std::size_t>(threads);
  if (want > n) want = n;
  if (want == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(want);
  std::size_t chunk = (n + want - 1) / want;
  for (std::size_t t = 0; t < want; ++t) {
    std::size_t begin = t * chunk;
    std::size_t end = begin + chunk < n ? begin + chunk : n;
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& th : pool) th.join();
}

// Resolves a requested thread count: 0 means "use hardware concurrency".
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace lightalign
