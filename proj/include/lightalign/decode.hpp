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

#include <cstdint>
#include <vector>

#include "lightalign/common.hpp"

namespace lightalign {

// Row-sparse scores: for each source row, up to k candidate target columns.
// After retrieval, entries within a row are ordered by descending score with
// ties broken by ascending column; transport plans computed on top of a
// SparseSim keep the entry order of their input instead.
struct SparseSim {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr;  // size rows + 1
  std::vector<std::uint32_t> col;
  std::vector<Real> score;

  std::size_t nnz() const { return col.size(); }
  std::size_t row_size(std::size_t r) const { return row_ptr[r + 1] - row_ptr[r]; }
};

// Cosine similarity of every source row against every target row. Zero rows
// score 0 against everything.
Matrix cosine_matrix(const Matrix& source, const Matrix& target, int threads = 1);

// Per source row, the k target columns with the largest cosine similarity.
// Exactly-zero source rows yield empty rows. k is clamped to the number of
// target rows.
SparseSim topk_retrieve(const Matrix& source, const Matrix& target, std::size_t k,
                        int threads = 1);

// Keeps the k largest entries of each row of a dense score matrix, same
// ordering rules as topk_retrieve. Rows are kept even when all-zero.
SparseSim topk_from_dense(const Matrix& scores, std::size_t k);

// Entropic transport plan. q = 0 returns exp(scores / tau) un-normalized;
// q >= 1 runs q row-then-column balancing iterations and ends with one more
// row pass so rows sum to 1 (final_row_norm can drop that trailing pass,
// which tests use to watch convergence).
Matrix sinkhorn_dense(const Matrix& scores, Real tau, std::size_t q,
                      bool final_row_norm = true);

// Same recurrence restricted to the stored entries. Columns with no stored
// entry are skipped by the column pass. The result reuses the input pattern.
SparseSim sinkhorn_sparse(const SparseSim& scores, Real tau, std::size_t q,
                          int threads = 1);

// Exact maximum-score assignment (Jonker-Volgenant, O(n^3)). Rectangular
// inputs are padded internally; returns one target column per source row
// (each column used at most once when rows <= cols).
std::vector<std::uint32_t> hungarian(const Matrix& scores);

struct AlignedPair {
  std::uint32_t source = 0;
  std::uint32_t target = 0;
  Real score = 0.0;

  friend bool operator==(const AlignedPair&, const AlignedPair&) = default;
};

enum class ExtractMode {
  RowArgmax,     // best stored column per row
  MutualArgmax,  // kept only when row and column argmaxes agree
};

// Reads aligned pairs off a transport plan. Ties resolve to the lowest
// index. Rows with no stored entries produce nothing.
std::vector<AlignedPair> extract_alignment(const SparseSim& plan, ExtractMode mode);
std::vector<AlignedPair> extract_alignment(const Matrix& plan, ExtractMode mode);

}  // namespace lightalign
