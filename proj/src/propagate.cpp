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

#include "lightalign/propagate.hpp"

#include <algorithm>
#include <cstring>

namespace lightalign {
namespace {

struct Entry {
  std::uint32_t row;
  std::uint32_t col;

  friend bool operator==(const Entry&, const Entry&) = default;
  friend auto operator<=>(const Entry&, const Entry&) = default;
};

// Accumulates duplicate (row, col) keys into one weighted CSR entry.
SparseView from_entries(std::vector<Entry> entries, std::size_t rows, std::size_t cols) {
  std::sort(entries.begin(), entries.end());
  SparseView view;
  view.rows = rows;
  view.cols = cols;
  view.row_ptr.assign(rows + 1, 0);
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    while (j < entries.size() && entries[j] == entries[i]) ++j;
    view.col.push_back(entries[i].col);
    view.weight.push_back(static_cast<Real>(j - i));
    ++view.row_ptr[entries[i].row + 1];
    i = j;
  }
  for (std::size_t r = 0; r < rows; ++r) view.row_ptr[r + 1] += view.row_ptr[r];
  return view;
}

// out_row = sum over stored entries of weight * X[col], entries visited in
// ascending column order.
void add_product_row(const SparseView& a, std::size_t row, const Matrix& x, Real* out) {
  for (std::size_t e = a.row_ptr[row]; e < a.row_ptr[row + 1]; ++e) {
    const Real w = a.weight[e];
    const Real* src = x.row(a.col[e]);
    for (std::size_t j = 0; j < x.cols; ++j) out[j] += w * src[j];
  }
}

void check_shape(const SparseView& a, std::size_t rows, std::size_t cols,
                 const char* what) {
  if (a.rows != rows || a.cols != cols)
    throw InvalidArgument(std::string(what) + ": view shape does not match labels");
}

}  // namespace

void SparseView::l1_normalize_rows() {
  for (std::size_t r = 0; r < rows; ++r) {
    Real sum = 0.0;
    for (std::size_t e = row_ptr[r]; e < row_ptr[r + 1]; ++e) sum += weight[e];
    if (sum > 0.0) {
      Real inv = 1.0 / sum;
      for (std::size_t e = row_ptr[r]; e < row_ptr[r + 1]; ++e) weight[e] *= inv;
    }
  }
}

TripleViews build_views_raw(const KnowledgeGraph& kg) {
  std::vector<Triple> triples = dedup_triples(kg.triples);
  std::vector<Entry> side, front, top;
  side.reserve(triples.size());
  front.reserve(triples.size());
  top.reserve(triples.size());
  for (const Triple& t : triples) {
    side.push_back({t.head, t.tail});
    front.push_back({t.head, t.rel});
    top.push_back({t.rel, t.tail});
  }
  TripleViews views;
  views.side = from_entries(std::move(side), kg.entity_count, kg.entity_count);
  views.front = from_entries(std::move(front), kg.entity_count, kg.relation_count);
  views.top = from_entries(std::move(top), kg.relation_count, kg.entity_count);
  return views;
}

TripleViews build_views(const KnowledgeGraph& kg) {
  TripleViews views = build_views_raw(kg);
  views.side.l1_normalize_rows();
  views.front.l1_normalize_rows();
  views.top.l1_normalize_rows();
  return views;
}

LabelState propagate_one(const TripleViews& views, Matrix entity0,
                         Matrix relation0, const PropagateOptions& options) {
  const std::size_t n = entity0.rows;
  const std::size_t m = relation0.rows;
  const std::size_t dim = entity0.cols;
  if (relation0.cols != dim)
    throw InvalidArgument("entity and relation labels have different dimensions");
  check_shape(views.side, n, n, "side");
  check_shape(views.front, n, m, "front");
  check_shape(views.top, m, n, "top");

  LabelState state;
  state.entity_rounds.reserve(options.rounds + 1);
  state.relation_rounds.reserve(options.rounds + 1);
  state.entity_rounds.push_back(std::move(entity0));
  state.relation_rounds.push_back(std::move(relation0));

  for (std::size_t t = 1; t <= options.rounds; ++t) {
    const Matrix& e_prev = state.entity_rounds[t - 1];
    const Matrix& r_prev = state.relation_rounds[t - 1];
    Matrix e_next(n, dim);
    Matrix r_next(m, dim);
    parallel_for(n, options.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        Real* out = e_next.row(i);
        add_product_row(views.side, i, e_prev, out);
        add_product_row(views.front, i, r_prev, out);
      }
    });
    parallel_for(m, options.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i)
        add_product_row(views.top, i, e_prev, r_next.row(i));
    });
    if (options.per_round_l2) {
      e_next.l2_normalize_rows();
      r_next.l2_normalize_rows();
    }
    state.entity_rounds.push_back(std::move(e_next));
    state.relation_rounds.push_back(std::move(r_next));
  }

  state.concatenated = Matrix(n, dim * (options.rounds + 1));
  for (std::size_t t = 0; t <= options.rounds; ++t) {
    const Matrix& part = state.entity_rounds[t];
    for (std::size_t i = 0; i < n; ++i)
      std::memcpy(state.concatenated.row(i) + t * dim, part.row(i),
                  dim * sizeof(Real));
  }
  return state;
}

std::pair<LabelState, LabelState> propagate(const TripleViews& source_views,
                                            const TripleViews& target_views,
                                            const InitialLabels& labels,
                                            const PropagateOptions& options) {
  LabelState src = propagate_one(source_views, labels.source_entity,
                                 labels.source_relation, options);
  LabelState tgt = propagate_one(target_views, labels.target_entity,
                                 labels.target_relation, options);
  return {std::move(src), std::move(tgt)};
}

LabelState propagate_onehot_subgraph(const KnowledgeGraph& kg,
                                     const std::vector<std::uint32_t>& class_entities,
                                     std::size_t rounds, bool reverse_triples,
                                     bool per_round_l2) {
  if (class_entities.empty())
    throw InvalidArgument("one-hot propagation needs at least one class entity");
  for (std::uint32_t e : class_entities)
    if (e >= kg.entity_count)
      throw InvalidArgument("class entity outside the graph");

  KnowledgeGraph prepared = reverse_triples ? add_reverse_triples(kg) : kg;
  TripleViews views = build_views(prepared);
  Matrix entity0(prepared.entity_count, class_entities.size());
  for (std::size_t x = 0; x < class_entities.size(); ++x)
    entity0.at(class_entities[x], x) = 1.0;
  Matrix relation0(prepared.relation_count, class_entities.size());

  PropagateOptions options;
  options.rounds = rounds;
  options.per_round_l2 = per_round_l2;
  return propagate_one(views, std::move(entity0), std::move(relation0), options);
}

}  // namespace lightalign
