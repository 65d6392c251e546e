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

#include "lightalign/pipeline.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "lightalign/labels.hpp"
#include "lightalign/propagate.hpp"

namespace lightalign {
namespace {

using Clock = std::chrono::steady_clock;

// Accumulates wall time per stage while keeping first-use order.
class StageTimer {
 public:
  explicit StageTimer(std::vector<std::pair<std::string, double>>& sink)
      : sink_(sink) {}

  template <typename Fn>
  auto run(const char* stage, Fn&& fn) {
    Clock::time_point start = Clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      add(stage, start);
    } else {
      auto value = fn();
      add(stage, start);
      return value;
    }
  }

 private:
  void add(const char* stage, Clock::time_point start) {
    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    for (auto& [name, total] : sink_) {
      if (name == stage) {
        total += seconds;
        return;
      }
    }
    sink_.emplace_back(stage, seconds);
  }

  std::vector<std::pair<std::string, double>>& sink_;
};

AlignmentResult run_impl(const KgPair& pair, const AlignConfig& config,
                         std::size_t epochs, const std::string& source_embeddings,
                         const std::string& target_embeddings) {
  config.validate();
  const bool literal = config.mode == AlignMode::Literal;
  if (!literal && pair.seed_pairs.empty())
    throw InvalidArgument("alignment needs at least one seed pair");
  const int threads = resolve_threads(config.threads);

  AlignmentResult result;
  result.config = config;
  result.dataset_fingerprint = pair.fingerprint;
  result.source_entity_ids = pair.source_entity_ids;
  result.target_entity_ids = pair.target_entity_ids;
  StageTimer timer(result.seconds_per_stage);
  Clock::time_point start = Clock::now();

  KgPair prepared;
  prepared.source = config.reverse_triples ? add_reverse_triples(pair.source) : pair.source;
  prepared.target = config.reverse_triples ? add_reverse_triples(pair.target) : pair.target;
  prepared.seed_pairs = pair.seed_pairs;
  prepared.test_pairs = pair.test_pairs;
  prepared.source_entity_ids = pair.source_entity_ids;  // literal mode resolves
  prepared.target_entity_ids = pair.target_entity_ids;  // embedding IDs by these

  TripleViews source_views, target_views;
  timer.run("build_views", [&] {
    source_views = build_views(prepared.source);
    target_views = build_views(prepared.target);
  });

  InitialLabels literal_base;
  if (literal) {
    timer.run("init_labels", [&] {
      literal_base = init_literal(prepared, source_embeddings, target_embeddings);
    });
  }

  PropagateOptions prop;
  prop.rounds = config.rounds;
  prop.per_round_l2 = config.per_round_l2;
  prop.threads = threads;

  std::vector<IndexPair> active_pairs = prepared.seed_pairs;
  std::unordered_set<std::uint32_t> used_source, used_target;
  for (const IndexPair& p : active_pairs) {
    used_source.insert(p.first);
    used_target.insert(p.second);
  }

  SparseSim plan;
  for (std::size_t epoch = 0;; ++epoch) {
    InitialLabels labels = timer.run("init_labels", [&] {
      if (!literal)
        return random_labels_for_pairs(prepared, active_pairs, config.dim, config.seed);
      InitialLabels refreshed = literal_base;
      for (std::size_t x = 0; x < result.pseudo_pairs.size(); ++x)
        set_pair_label(refreshed.source_entity, refreshed.target_entity,
                       result.pseudo_pairs[x], x, config.seed);
      return refreshed;
    });

    {
      auto states = timer.run("propagate", [&] {
        return propagate(source_views, target_views, labels, prop);
      });
      SparseSim sim = timer.run("retrieve", [&] {
        return topk_retrieve(states.first.concatenated, states.second.concatenated,
                             config.topk, threads);
      });
      states.first = LabelState{};
      states.second = LabelState{};
      plan = timer.run("sinkhorn", [&] {
        return sinkhorn_sparse(sim, config.tau, config.sinkhorn_q, threads);
      });
    }
    if (epoch == epochs) break;

    std::vector<AlignedPair> mutual = timer.run("extract", [&] {
      return extract_alignment(plan, ExtractMode::MutualArgmax);
    });
    std::size_t accepted = 0;
    for (const AlignedPair& c : mutual) {
      if (used_source.count(c.source) || used_target.count(c.target)) continue;
      used_source.insert(c.source);
      used_target.insert(c.target);
      active_pairs.emplace_back(c.source, c.target);
      result.pseudo_pairs.emplace_back(c.source, c.target);
      ++accepted;
    }
    if (accepted == 0) break;  // self-training converged early
  }

  result.pairs = timer.run("extract", [&] {
    return extract_alignment(plan, ExtractMode::RowArgmax);
  });
  result.metrics = timer.run("evaluate", [&] {
    return evaluate(plan, prepared.test_pairs);
  });
  result.seconds_total = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace

const char* to_string(AlignMode mode) {
  switch (mode) {
    case AlignMode::Basic: return "basic";
    case AlignMode::Iterative: return "iterative";
    case AlignMode::Literal: return "literal";
  }
  return "basic";
}

AlignMode align_mode_from_string(const std::string& name) {
  if (name == "basic") return AlignMode::Basic;
  if (name == "iterative") return AlignMode::Iterative;
  if (name == "literal") return AlignMode::Literal;
  throw InvalidArgument("unknown mode '" + name + "' (want basic|iterative|literal)");
}

void AlignConfig::validate() const {
  if (dim == 0) throw InvalidArgument("dim must be at least 1");
  if (topk == 0) throw InvalidArgument("topk must be at least 1");
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  if (threads < 0) throw InvalidArgument("threads must be non-negative");
}

Metrics evaluate(const SparseSim& ranking, const std::vector<IndexPair>& test_pairs) {
  if (test_pairs.empty()) throw InvalidArgument("test set is empty");
  Metrics m;
  for (const IndexPair& p : test_pairs) {
    if (p.first >= ranking.rows || p.second >= ranking.cols)
      throw InvalidArgument("test pair outside the ranking's shape");
    Real gold = 0.0;
    bool found = false;
    for (std::size_t e = ranking.row_ptr[p.first]; e < ranking.row_ptr[p.first + 1]; ++e) {
      if (ranking.col[e] == p.second) {
        gold = ranking.score[e];
        found = true;
        break;
      }
    }
    if (!found) continue;  // gold never retrieved: contributes zero
    std::size_t rank = 1;
    for (std::size_t e = ranking.row_ptr[p.first]; e < ranking.row_ptr[p.first + 1]; ++e) {
      if (ranking.col[e] == p.second) continue;
      if (ranking.score[e] > gold ||
          (ranking.score[e] == gold && ranking.col[e] < p.second))
        ++rank;
    }
    if (rank <= 1) m.hits1 += 1.0;
    if (rank <= 10) m.hits10 += 1.0;
    m.mrr += 1.0 / static_cast<Real>(rank);
  }
  Real n = static_cast<Real>(test_pairs.size());
  m.hits1 /= n;
  m.hits10 /= n;
  m.mrr /= n;
  return m;
}

Metrics evaluate(const Matrix& ranking, const std::vector<IndexPair>& test_pairs) {
  if (test_pairs.empty()) throw InvalidArgument("test set is empty");
  Metrics m;
  for (const IndexPair& p : test_pairs) {
    if (p.first >= ranking.rows || p.second >= ranking.cols)
      throw InvalidArgument("test pair outside the ranking's shape");
    const Real* row = ranking.row(p.first);
    Real gold = row[p.second];
    std::size_t rank = 1;
    for (std::size_t j = 0; j < ranking.cols; ++j) {
      if (j == p.second) continue;
      if (row[j] > gold || (row[j] == gold && j < p.second)) ++rank;
    }
    if (rank <= 1) m.hits1 += 1.0;
    if (rank <= 10) m.hits10 += 1.0;
    m.mrr += 1.0 / static_cast<Real>(rank);
  }
  Real n = static_cast<Real>(test_pairs.size());
  m.hits1 /= n;
  m.hits10 /= n;
  m.mrr /= n;
  return m;
}

AlignmentResult run_basic(const KgPair& pair, const AlignConfig& config) {
  return run_impl(pair, config, 0, "", "");
}

AlignmentResult run_iterative(const KgPair& pair, const AlignConfig& config) {
  return run_impl(pair, config, config.iterative_epochs, "", "");
}

AlignmentResult run_literal(const KgPair& pair, const AlignConfig& config,
                            const std::string& source_embeddings,
                            const std::string& target_embeddings) {
  if (source_embeddings.empty() || target_embeddings.empty())
    throw InvalidArgument("literal mode needs both embedding files");
  return run_impl(pair, config, config.iterative_epochs, source_embeddings,
                  target_embeddings);
}

AlignmentResult run_pipeline(const KgPair& pair, const AlignConfig& config,
                             const std::string& source_embeddings,
                             const std::string& target_embeddings) {
  switch (config.mode) {
    case AlignMode::Basic: return run_basic(pair, config);
    case AlignMode::Iterative: return run_iterative(pair, config);
    case AlignMode::Literal:
      return run_literal(pair, config, source_embeddings, target_embeddings);
  }
  throw InvalidArgument("unknown alignment mode");
}

void write_pairs_tsv(const AlignmentResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  char score[32];
  for (const AlignedPair& p : result.pairs) {
    std::snprintf(score, sizeof score, "%.6f", p.score);
    out << result.source_entity_ids[p.source] << '\t'
        << result.target_entity_ids[p.target] << '\t' << score << '\n';
  }
}

void write_metrics_json(const AlignmentResult& result, const std::string& path) {
  nlohmann::json stages = nlohmann::json::object();
  for (const auto& [name, seconds] : result.seconds_per_stage) stages[name] = seconds;

  char fingerprint[32];
  std::snprintf(fingerprint, sizeof fingerprint, "%016llx",
                static_cast<unsigned long long>(result.dataset_fingerprint));

  nlohmann::json doc = {
      {"hits1", result.metrics.hits1},
      {"hits10", result.metrics.hits10},
      {"mrr", result.metrics.mrr},
      {"seconds_total", result.seconds_total},
      {"seconds_per_stage", stages},
      {"dataset_fingerprint", fingerprint},
      {"config",
       {
           {"mode", to_string(result.config.mode)},
           {"dim", result.config.dim},
           {"rounds", result.config.rounds},
           {"topk", result.config.topk},
           {"tau", result.config.tau},
           {"sinkhorn_q", result.config.sinkhorn_q},
           {"iterative_epochs", result.config.iterative_epochs},
           {"seed", result.config.seed},
           {"reverse_triples", result.config.reverse_triples},
           {"per_round_l2", result.config.per_round_l2},
           {"threads", result.config.threads},
       }},
  };
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << doc.dump(2) << '\n';
}

void write_result(const AlignmentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_pairs_tsv(result, (fs::path(dir) / "pairs.tsv").string());
  write_metrics_json(result, (fs::path(dir) / "metrics.json").string());
}

}  // namespace lightalign
