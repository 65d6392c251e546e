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

#include "lightalign/decode.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace lightalign {
namespace {

constexpr Real kSumFloor = 1e-30;  // denominator clamp for empty rows/columns

// Dense products are issued in fixed-height row tiles. Each tile is a GEMM of
// the same shape no matter how many threads the tiles are spread across, so
// scores are bit-identical for every thread count.
constexpr std::size_t kGemmTileRows = 64;

using EigenRowMajor =
    Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const EigenRowMajor>;
using MutableMap = Eigen::Map<EigenRowMajor>;

std::vector<Real> inverse_row_norms(const Matrix& m) {
  std::vector<Real> inv(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    Real n = m.row_norm(i);
    inv[i] = n > 0.0 ? 1.0 / n : 0.0;
  }
  return inv;
}

struct Candidate {
  Real score;
  std::uint32_t col;
};

// Strict ordering used for all retrieval ranking: higher score first, then
// lower column.
bool better(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.col < b.col;
}

// Keeps the k best of a dense score row in `keep` (sorted best-first).
void select_topk(const Real* scores, std::size_t n, std::size_t k,
                 std::vector<Candidate>& keep) {
  keep.clear();
  for (std::uint32_t j = 0; j < n; ++j) {
    Candidate c{scores[j], j};
    if (keep.size() < k) {
      keep.push_back(c);
      std::push_heap(keep.begin(), keep.end(), better);
    } else if (better(c, keep.front())) {
      std::pop_heap(keep.begin(), keep.end(), better);
      keep.back() = c;
      std::push_heap(keep.begin(), keep.end(), better);
    }
  }
  std::sort(keep.begin(), keep.end(), better);
}

void check_same_dim(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols)
    throw InvalidArgument("label matrices have different dimensions");
}

void row_normalize(Matrix& p) {
  for (std::size_t i = 0; i < p.rows; ++i) {
    Real* r = p.row(i);
    Real sum = 0.0;
    for (std::size_t j = 0; j < p.cols; ++j) sum += r[j];
    Real inv = 1.0 / std::max(sum, kSumFloor);
    for (std::size_t j = 0; j < p.cols; ++j) r[j] *= inv;
  }
}

void col_normalize(Matrix& p) {
  std::vector<Real> sums(p.cols, 0.0);
  for (std::size_t i = 0; i < p.rows; ++i) {
    const Real* r = p.row(i);
    for (std::size_t j = 0; j < p.cols; ++j) sums[j] += r[j];
  }
  for (Real& s : sums) s = 1.0 / std::max(s, kSumFloor);
  for (std::size_t i = 0; i < p.rows; ++i) {
    Real* r = p.row(i);
    for (std::size_t j = 0; j < p.cols; ++j) r[j] *= sums[j];
  }
}

// Shortest-augmenting-path assignment for rows <= cols, minimizing cost.
// Returns the assigned column per row.
std::vector<std::uint32_t> assign_min_cost(const Matrix& cost) {
  const std::size_t n = cost.rows;
  const std::size_t m = cost.cols;
  const Real inf = std::numeric_limits<Real>::infinity();
  std::vector<Real> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      std::size_t i0 = match[j0], j1 = 0;
      Real delta = inf;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        Real cur = cost.at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::uint32_t> result(n, 0);
  for (std::size_t j = 1; j <= m; ++j)
    if (match[j] != 0) result[match[j] - 1] = static_cast<std::uint32_t>(j - 1);
  return result;
}

}  // namespace

Matrix cosine_matrix(const Matrix& source, const Matrix& target, int threads) {
  check_same_dim(source, target);
  std::vector<Real> inv_src = inverse_row_norms(source);
  std::vector<Real> inv_tgt = inverse_row_norms(target);
  Matrix out(source.rows, target.rows);
  if (source.rows == 0 || target.rows == 0 || source.cols == 0) return out;

  ConstMap src_map(source.data.data(), source.rows, source.cols);
  ConstMap tgt_map(target.data.data(), target.rows, target.cols);
  MutableMap out_map(out.data.data(), out.rows, out.cols);
  std::size_t tiles = (source.rows + kGemmTileRows - 1) / kGemmTileRows;
  parallel_for(tiles, threads, [&](std::size_t tile_begin, std::size_t tile_end) {
    for (std::size_t t = tile_begin; t < tile_end; ++t) {
      std::size_t begin = t * kGemmTileRows;
      std::size_t height = std::min(kGemmTileRows, source.rows - begin);
      out_map.middleRows(begin, height).noalias() =
          src_map.middleRows(begin, height) * tgt_map.transpose();
    }
  });
  for (std::size_t i = 0; i < out.rows; ++i) {
    Real* r = out.row(i);
    for (std::size_t j = 0; j < out.cols; ++j) r[j] *= inv_src[i] * inv_tgt[j];
  }
  return out;
}

SparseSim topk_retrieve(const Matrix& source, const Matrix& target, std::size_t k,
                        int threads) {
  if (k == 0) throw InvalidArgument("retrieval needs k >= 1");
  check_same_dim(source, target);
  if (k > target.rows) k = target.rows;

  std::vector<Real> inv_src = inverse_row_norms(source);
  std::vector<Real> inv_tgt = inverse_row_norms(target);

  SparseSim sim;
  sim.rows = source.rows;
  sim.cols = target.rows;
  sim.row_ptr.assign(source.rows + 1, 0);
  for (std::size_t i = 0; i < source.rows; ++i)
    sim.row_ptr[i + 1] = sim.row_ptr[i] + (inv_src[i] > 0.0 ? k : 0);
  sim.col.resize(sim.row_ptr[source.rows]);
  sim.score.resize(sim.row_ptr[source.rows]);
  if (source.rows == 0 || target.rows == 0) return sim;

  ConstMap src_map(source.data.data(), source.rows, source.cols);
  ConstMap tgt_map(target.data.data(), target.rows, target.cols);

  // Source rows are processed in chunks so the dense score buffer stays
  // bounded (~128 MB) regardless of graph size.
  std::size_t chunk = std::max<std::size_t>(
      1, (128u << 20) / (sizeof(Real) * std::max<std::size_t>(1, target.rows)));
  std::vector<Real> buffer;
  for (std::size_t base = 0; base < source.rows; base += chunk) {
    std::size_t rows_here = std::min(chunk, source.rows - base);
    buffer.resize(rows_here * target.rows);
    MutableMap buf_map(buffer.data(), rows_here, target.rows);
    std::size_t tiles = (rows_here + kGemmTileRows - 1) / kGemmTileRows;
    parallel_for(tiles, threads, [&](std::size_t tile_begin, std::size_t tile_end) {
      for (std::size_t t = tile_begin; t < tile_end; ++t) {
        std::size_t begin = t * kGemmTileRows;
        std::size_t height = std::min(kGemmTileRows, rows_here - begin);
        buf_map.middleRows(begin, height).noalias() =
            src_map.middleRows(base + begin, height) * tgt_map.transpose();
      }
    });
    parallel_for(rows_here, threads, [&](std::size_t begin, std::size_t end) {
      std::vector<Candidate> keep;
      keep.reserve(k + 1);
      for (std::size_t r = begin; r < end; ++r) {
        std::size_t i = base + r;
        if (inv_src[i] <= 0.0) continue;
        Real* scores = buffer.data() + r * target.rows;
        for (std::size_t j = 0; j < target.rows; ++j)
          scores[j] *= inv_src[i] * inv_tgt[j];
        select_topk(scores, target.rows, k, keep);
        std::size_t at = sim.row_ptr[i];
        for (const Candidate& c : keep) {
          sim.col[at] = c.col;
          sim.score[at] = c.score;
          ++at;
        }
      }
    });
  }
  return sim;
}

SparseSim topk_from_dense(const Matrix& scores, std::size_t k) {
  if (k == 0) throw InvalidArgument("retrieval needs k >= 1");
  if (k > scores.cols) k = scores.cols;
  SparseSim sim;
  sim.rows = scores.rows;
  sim.cols = scores.cols;
  sim.row_ptr.assign(scores.rows + 1, 0);
  std::vector<Candidate> keep;
  keep.reserve(k + 1);
  for (std::size_t i = 0; i < scores.rows; ++i) {
    select_topk(scores.row(i), scores.cols, k, keep);
    for (const Candidate& c : keep) {
      sim.col.push_back(c.col);
      sim.score.push_back(c.score);
    }
    sim.row_ptr[i + 1] = sim.col.size();
  }
  return sim;
}

Matrix sinkhorn_dense(const Matrix& scores, Real tau, std::size_t q,
                      bool final_row_norm) {
  if (!(tau > 0.0)) throw InvalidArgument("temperature must be positive");
  if (!scores.all_finite()) throw InvalidArgument("scores must be finite");

  Matrix p(scores.rows, scores.cols);
  if (q == 0) {
    for (std::size_t i = 0; i < scores.data.size(); ++i)
      p.data[i] = std::exp(scores.data[i] / tau);
    return p;
  }
  // Row-max subtraction keeps exp() in range; the very first row
  // normalization cancels it exactly.
  for (std::size_t i = 0; i < scores.rows; ++i) {
    const Real* s = scores.row(i);
    Real* r = p.row(i);
    Real m = -std::numeric_limits<Real>::infinity();
    for (std::size_t j = 0; j < scores.cols; ++j) m = std::max(m, s[j]);
    for (std::size_t j = 0; j < scores.cols; ++j) r[j] = std::exp((s[j] - m) / tau);
  }
  for (std::size_t it = 0; it < q; ++it) {
    row_normalize(p);
    col_normalize(p);
  }
  if (final_row_norm) row_normalize(p);
  return p;
}

SparseSim sinkhorn_sparse(const SparseSim& scores, Real tau, std::size_t q,
                          int threads) {
  if (!(tau > 0.0)) throw InvalidArgument("temperature must be positive");
  for (Real s : scores.score)
    if (!std::isfinite(s)) throw InvalidArgument("scores must be finite");

  SparseSim plan = scores;
  if (q == 0) {
    for (Real& v : plan.score) v = std::exp(v / tau);
    return plan;
  }
  parallel_for(plan.rows, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Real m = -std::numeric_limits<Real>::infinity();
      for (std::size_t e = plan.row_ptr[i]; e < plan.row_ptr[i + 1]; ++e)
        m = std::max(m, plan.score[e]);
      for (std::size_t e = plan.row_ptr[i]; e < plan.row_ptr[i + 1]; ++e)
        plan.score[e] = std::exp((plan.score[e] - m) / tau);
    }
  });

  auto row_pass = [&] {
    parallel_for(plan.rows, threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        Real sum = 0.0;
        for (std::size_t e = plan.row_ptr[i]; e < plan.row_ptr[i + 1]; ++e)
          sum += plan.score[e];
        Real inv = 1.0 / std::max(sum, kSumFloor);
        for (std::size_t e = plan.row_ptr[i]; e < plan.row_ptr[i + 1]; ++e)
          plan.score[e] *= inv;
      }
    });
  };
  // The column pass accumulates sequentially in storage order so the result
  // does not depend on the thread count.
  std::vector<Real> col_sum(plan.cols);
  auto col_pass = [&] {
    std::fill(col_sum.begin(), col_sum.end(), 0.0);
    for (std::size_t e = 0; e < plan.score.size(); ++e)
      col_sum[plan.col[e]] += plan.score[e];
    for (std::size_t e = 0; e < plan.score.size(); ++e)
      plan.score[e] /= std::max(col_sum[plan.col[e]], kSumFloor);
  };

  for (std::size_t it = 0; it < q; ++it) {
    row_pass();
    col_pass();
  }
  row_pass();
  return plan;
}

std::vector<std::uint32_t> hungarian(const Matrix& scores) {
  if (!scores.all_finite()) throw InvalidArgument("scores must be finite");
  if (scores.rows == 0 || scores.cols == 0) return {};

  if (scores.rows <= scores.cols) {
    Matrix cost(scores.rows, scores.cols);
    for (std::size_t i = 0; i < scores.data.size(); ++i)
      cost.data[i] = -scores.data[i];
    return assign_min_cost(cost);
  }
  // More rows than columns: assign columns to rows on the transpose, then
  // invert. Rows left without a column get the no-match sentinel.
  Matrix cost(scores.cols, scores.rows);
  for (std::size_t i = 0; i < scores.rows; ++i)
    for (std::size_t j = 0; j < scores.cols; ++j)
      cost.at(j, i) = -scores.at(i, j);
  std::vector<std::uint32_t> by_col = assign_min_cost(cost);
  std::vector<std::uint32_t> result(scores.rows, UINT32_MAX);
  for (std::size_t j = 0; j < by_col.size(); ++j)
    result[by_col[j]] = static_cast<std::uint32_t>(j);
  return result;
}

std::vector<AlignedPair> extract_alignment(const SparseSim& plan, ExtractMode mode) {
  std::vector<AlignedPair> row_best;
  for (std::size_t i = 0; i < plan.rows; ++i) {
    if (plan.row_size(i) == 0) continue;
    std::size_t best = plan.row_ptr[i];
    for (std::size_t e = best + 1; e < plan.row_ptr[i + 1]; ++e) {
      if (plan.score[e] > plan.score[best] ||
          (plan.score[e] == plan.score[best] && plan.col[e] < plan.col[best]))
        best = e;
    }
    row_best.push_back({static_cast<std::uint32_t>(i), plan.col[best], plan.score[best]});
  }
  if (mode == ExtractMode::RowArgmax) return row_best;

  struct ColBest {
    Real score = -std::numeric_limits<Real>::infinity();
    std::uint32_t row = UINT32_MAX;
  };
  std::vector<ColBest> col_best(plan.cols);
  for (std::size_t i = 0; i < plan.rows; ++i) {
    for (std::size_t e = plan.row_ptr[i]; e < plan.row_ptr[i + 1]; ++e) {
      ColBest& cb = col_best[plan.col[e]];
      if (plan.score[e] > cb.score ||
          (plan.score[e] == cb.score && static_cast<std::uint32_t>(i) < cb.row)) {
        cb.score = plan.score[e];
        cb.row = static_cast<std::uint32_t>(i);
      }
    }
  }
  std::vector<AlignedPair> mutual;
  for (const AlignedPair& p : row_best)
    if (col_best[p.target].row == p.source) mutual.push_back(p);
  return mutual;
}

std::vector<AlignedPair> extract_alignment(const Matrix& plan, ExtractMode mode) {
  std::vector<AlignedPair> row_best;
  row_best.reserve(plan.rows);
  for (std::size_t i = 0; i < plan.rows; ++i) {
    if (plan.cols == 0) break;
    const Real* r = plan.row(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < plan.cols; ++j)
      if (r[j] > r[best]) best = j;
    row_best.push_back({static_cast<std::uint32_t>(i),
                        static_cast<std::uint32_t>(best), r[best]});
  }
  if (mode == ExtractMode::RowArgmax) return row_best;

  std::vector<AlignedPair> mutual;
  for (const AlignedPair& p : row_best) {
    std::size_t best_row = 0;
    for (std::size_t i = 1; i < plan.rows; ++i)
      if (plan.at(i, p.target) > plan.at(best_row, p.target)) best_row = i;
    if (best_row == p.source) mutual.push_back(p);
  }
  return mutual;
}

}  // namespace lightalign
