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

#include "lightalign/kg.hpp"

namespace lightalign {

// A pair restricted to the entities within `hops` undirected steps of the
// focus sets, with induced triples and re-mapped indices. to_parent tables
// translate restricted indices back to the original pair's.
struct SubgraphPair {
  KgPair pair;
  std::vector<std::uint32_t> source_to_parent;
  std::vector<std::uint32_t> target_to_parent;
};

// hops = 0 keeps the focus entities only, with no triples.
SubgraphPair extract_subgraph(const KgPair& pair,
                              const std::vector<std::uint32_t>& source_focus,
                              const std::vector<std::uint32_t>& target_focus,
                              std::size_t hops);

// One ranked anchor contribution: seed pair `pair_index` carried `value`
// mass into a focal entity's row at some round.
struct TraceAnchor {
  std::size_t pair_index = 0;
  std::string label;
  Real value = 0.0;
};

struct TraceFocal {
  std::string role;  // "source", "predicted", "gold"
  std::uint32_t index = 0;  // original local index
  std::int64_t file_id = 0;
  std::string name;
  std::vector<std::vector<TraceAnchor>> per_round;  // [round][rank], rounds 0..k
};

struct TraceOverlap {
  std::size_t round = 0;
  std::size_t source_predicted = 0;  // anchors shared by source and predicted
  std::size_t source_gold = 0;
};

// Why did the pipeline map `source` to `predicted` instead of `gold`?
// Exact one-hot labels over the local subgraph show which seed anchors feed
// each focal entity; matching entities should draw from matching anchors.
struct TraceReport {
  TraceFocal source;
  TraceFocal predicted;
  TraceFocal gold;
  std::vector<TraceOverlap> overlaps;   // rounds 1..k
  std::size_t union_source_predicted = 0;  // distinct shared anchors, rounds 1..k
  std::size_t union_source_gold = 0;
  std::size_t subgraph_source_entities = 0;
  std::size_t subgraph_target_entities = 0;
  std::size_t anchor_count = 0;  // seed pairs inside the subgraph
  std::size_t hops = 0;
  std::size_t rounds = 0;
  std::size_t top_m = 0;

  std::string to_text() const;     // human-readable table
  std::string to_machine() const;  // `key TAB value` lines
};

// Restricts the pair around the three focal entities, propagates one-hot
// anchor labels, and reports each focal's top-m anchors per round. Throws
// DataError when no seed pair survives the restriction (try more hops).
TraceReport trace_alignment(const KgPair& pair, std::uint32_t source_entity,
                            std::uint32_t predicted_target,
                            std::uint32_t gold_target, std::size_t hops,
                            std::size_t rounds, std::size_t top_m,
                            bool reverse_triples = true,
                            bool per_round_l2 = true);

}  // namespace lightalign
