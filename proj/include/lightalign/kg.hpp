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
#include <utility>
#include <vector>

#include "lightalign/common.hpp"

namespace lightalign {

struct Triple {
  std::uint32_t head = 0;
  std::uint32_t rel = 0;
  std::uint32_t tail = 0;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// One knowledge graph over dense local indices. Entity names are display
// strings only; all computation happens on the indices.
struct KnowledgeGraph {
  std::size_t entity_count = 0;
  std::size_t relation_count = 0;
  std::vector<Triple> triples;
  std::vector<std::string> entity_names;  // empty, or one per entity

  // Checks that every triple stays inside the declared index ranges.
  void validate() const;
};

// How to derive training pairs from a dataset directory: either an explicit
// training-pairs file, or a deterministic shuffled split of the reference
// pairs. ratio is the training fraction, in (0, 1].
struct SplitSpec {
  std::string train_file;  // empty means "use (ratio, seed)"
  double ratio = 0.3;
  std::uint64_t seed = 42;
};

using IndexPair = std::pair<std::uint32_t, std::uint32_t>;

// A pair of graphs plus the aligned-entity supervision. Local indices are a
// dense re-mapping of the file IDs; the *_ids tables keep the originals so
// results can be written back in the dataset's own ID space.
struct KgPair {
  KnowledgeGraph source;
  KnowledgeGraph target;
  std::vector<IndexPair> seed_pairs;  // (source local, target local)
  std::vector<IndexPair> test_pairs;

  std::vector<std::int64_t> source_entity_ids;    // local index -> file ID
  std::vector<std::int64_t> target_entity_ids;
  std::vector<std::int64_t> source_relation_ids;
  std::vector<std::int64_t> target_relation_ids;

  bool global_ids = false;     // true when the two entity ID spaces are disjoint
  std::uint64_t fingerprint = 0;  // content hash of the sorted input lines
};

// Loads a dataset directory: ent_ids_1, ent_ids_2, triples_1, triples_2,
// ref_ent_ids, and optionally the split's training-pairs file. All files are
// TAB-separated. Throws DataError on missing files, malformed lines, unknown
// IDs, or duplicated seed entities; throws InvalidArgument on a bad ratio.
KgPair load_dataset(const std::string& dir, const SplitSpec& split);

// Writes a loaded pair back out in the same file formats, using the retained
// file IDs. The reference file holds seed pairs followed by test pairs.
void write_dataset(const KgPair& pair, const std::string& dir);

// Returns a graph with an inverse triple (t, r + R, h) added for every
// (h, r, t), doubling relation_count. Idempotent in structure only; applying
// it twice quadruples the original triple count.
KnowledgeGraph add_reverse_triples(const KnowledgeGraph& kg);

// Sorted, exact-duplicate-free copy of a triple list.
std::vector<Triple> dedup_triples(std::vector<Triple> triples);

// FNV-1a over newline-joined, lexicographically sorted lines.
std::uint64_t hash_sorted_lines(std::vector<std::string> lines);

}  // namespace lightalign
