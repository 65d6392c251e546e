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
#include <string>
#include <vector>

#include "lightalign/common.hpp"
#include "lightalign/kg.hpp"

namespace lightalign {

// Initial label matrices for both graphs. Relation rows always start at
// zero; they pick up mass during propagation. Matrices are sized from the
// KgPair as given, so prepare the pair (e.g. add reverse triples) first.
struct InitialLabels {
  Matrix source_entity;
  Matrix target_entity;
  Matrix source_relation;
  Matrix target_relation;

  std::size_t dim() const { return source_entity.cols; }
};

// Exact one-hot labels: pair x lights column x of both its members. Label
// dimension equals the number of seed pairs. Used for tracing and as the
// reference the random labels approximate.
InitialLabels init_onehot(const KgPair& pair);

// Each seed pair shares one random unit vector of dimension dim, drawn from
// a stream keyed by (seed, pair index). Distinct pairs get directions that
// are nearly orthogonal in high dimension.
InitialLabels init_random_orthogonal(const KgPair& pair, std::size_t dim,
                                     std::uint64_t seed);

// Entity rows come from per-graph embedding files and are L2-normalized;
// no seed pairs are consumed. File lines: `<entity id> TAB <float> TAB ...`.
InitialLabels init_literal(const KgPair& pair, const std::string& source_path,
                           const std::string& target_path);

// Same construction as init_random_orthogonal but over an arbitrary pair
// list (seeds plus pseudo-seeds during self-training).
InitialLabels random_labels_for_pairs(const KgPair& pair,
                                      const std::vector<IndexPair>& pairs,
                                      std::size_t dim, std::uint64_t seed);

// Overwrites both members' rows with the shared unit vector of stream
// (seed, pair_index). Lets literal-mode self-training inject pseudo pairs.
void set_pair_label(Matrix& source_entity, Matrix& target_entity,
                    IndexPair pair, std::uint64_t pair_index,
                    std::uint64_t seed);

}  // namespace lightalign
