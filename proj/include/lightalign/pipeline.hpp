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

#include "lightalign/decode.hpp"
#include "lightalign/kg.hpp"

namespace lightalign {

enum class AlignMode { Basic, Iterative, Literal };

const char* to_string(AlignMode mode);
AlignMode align_mode_from_string(const std::string& name);

struct AlignConfig {
  AlignMode mode = AlignMode::Basic;
  std::size_t dim = 1024;        // label dimension (ignored in literal mode)
  std::size_t rounds = 2;        // propagation rounds
  std::size_t topk = 500;        // candidates kept per source entity
  Real tau = 0.05;               // Sinkhorn temperature
  std::size_t sinkhorn_q = 10;   // Sinkhorn iterations
  std::size_t iterative_epochs = 5;  // self-training rounds (0 = none)
  std::uint64_t seed = 42;
  bool reverse_triples = true;   // add inverse triples before propagation
  bool per_round_l2 = true;      // re-normalize labels after each round
  int threads = 0;               // 0 = hardware concurrency

  void validate() const;  // throws InvalidArgument
};

struct Metrics {
  Real hits1 = 0.0;
  Real hits10 = 0.0;
  Real mrr = 0.0;
};

struct AlignmentResult {
  std::vector<AlignedPair> pairs;       // local indices, ascending source
  std::vector<IndexPair> pseudo_pairs;  // accepted during self-training
  Metrics metrics;
  double seconds_total = 0.0;
  std::vector<std::pair<std::string, double>> seconds_per_stage;
  AlignConfig config;
  std::uint64_t dataset_fingerprint = 0;

  // Copies of the dataset's ID tables so results are written in file IDs.
  std::vector<std::int64_t> source_entity_ids;
  std::vector<std::int64_t> target_entity_ids;
};

// Ranking metrics over the stored candidates of each test row. The gold
// column's rank counts strictly better scores plus equal-score columns with
// a lower index; a gold column that was never retrieved scores zero.
Metrics evaluate(const SparseSim& ranking, const std::vector<IndexPair>& test_pairs);
Metrics evaluate(const Matrix& ranking, const std::vector<IndexPair>& test_pairs);

// One propagate/retrieve/transport/decode cycle from the seed pairs.
AlignmentResult run_basic(const KgPair& pair, const AlignConfig& config);

// run_basic plus self-training: after each epoch's decoding, mutual-argmax
// pairs whose entities are still unused join the seed list with fresh shared
// labels. Runs config.iterative_epochs epochs (0 reproduces run_basic).
AlignmentResult run_iterative(const KgPair& pair, const AlignConfig& config);

// Unsupervised variant: initial entity labels come from embedding files and
// seed pairs are ignored at initialization. Self-training applies when
// iterative_epochs > 0; accepted pairs overwrite both members' rows with a
// fresh shared random unit vector.
AlignmentResult run_literal(const KgPair& pair, const AlignConfig& config,
                            const std::string& source_embeddings,
                            const std::string& target_embeddings);

// Dispatches on config.mode. Literal mode requires both embedding paths.
AlignmentResult run_pipeline(const KgPair& pair, const AlignConfig& config,
                             const std::string& source_embeddings = "",
                             const std::string& target_embeddings = "");

// `<source file ID> TAB <target file ID> TAB <score, 6 decimals>` per pair.
void write_pairs_tsv(const AlignmentResult& result, const std::string& path);

// Metrics, stage timings, configuration, and the dataset fingerprint.
void write_metrics_json(const AlignmentResult& result, const std::string& path);

// Writes pairs.tsv and metrics.json under dir, creating it if needed.
void write_result(const AlignmentResult& result, const std::string& dir);

}  // namespace lightalign
