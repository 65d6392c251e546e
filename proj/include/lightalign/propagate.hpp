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
#include "lightalign/kg.hpp"
#include "lightalign/labels.hpp"

namespace lightalign {

// CSR matrix with L1-normalized rows. Column indices are sorted within each
// row and (row, col) keys are unique; parallel triples accumulate weight
// before normalization.
struct SparseView {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr;   // size rows + 1
  std::vector<std::uint32_t> col;
  std::vector<Real> weight;

  std::size_t nnz() const { return col.size(); }
  void l1_normalize_rows();
};

// The three projections of one graph's triple tensor:
//   side  (entity x entity): (head, tail)
//   front (entity x relation): (head, rel)
//   top   (relation x entity): (rel, tail)
struct TripleViews {
  SparseView side;
  SparseView front;
  SparseView top;
};

// Accumulated, un-normalized views; the total stored weight of each view
// equals the deduplicated triple count.
TripleViews build_views_raw(const KnowledgeGraph& kg);

// build_views_raw followed by L1 row normalization of all three views.
TripleViews build_views(const KnowledgeGraph& kg);

struct PropagateOptions {
  std::size_t rounds = 2;
  bool per_round_l2 = true;  // re-normalize every row after each round
  int threads = 1;
};

// All rounds of one graph's propagation. entity_rounds[t] holds round t
// (index 0 is the initial labels); concatenated is the row-wise join of all
// rounds, width (rounds + 1) * dim.
struct LabelState {
  std::vector<Matrix> entity_rounds;
  std::vector<Matrix> relation_rounds;
  Matrix concatenated;
};

// One round: E' = side * E + front * R, R' = top * E, evaluated against the
// previous round on the right-hand side. Rows of E' accumulate in ascending
// column order, side term first, so results do not depend on thread count.
LabelState propagate_one(const TripleViews& views, Matrix entity0,
                         Matrix relation0, const PropagateOptions& options);

// Runs propagate_one over both graphs of a pair.
std::pair<LabelState, LabelState> propagate(const TripleViews& source_views,
                                            const TripleViews& target_views,
                                            const InitialLabels& labels,
                                            const PropagateOptions& options);

// Interpretability helper: propagates exact one-hot labels (class x lights
// entity class_entities[x]) over one graph, typically a small subgraph.
LabelState propagate_onehot_subgraph(const KnowledgeGraph& kg,
                                     const std::vector<std::uint32_t>& class_entities,
                                     std::size_t rounds,
                                     bool reverse_triples = true,
                                     bool per_round_l2 = true);

}  // namespace lightalign
