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

#include "lightalign/lightalign.h"

#include <charconv>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "lightalign/common.hpp"
#include "lightalign/kg.hpp"
#include "lightalign/pipeline.hpp"
#include "lightalign/synth.hpp"
#include "lightalign/trace.hpp"

struct la_dataset {
  lightalign::KgPair pair;
};

struct la_config {
  lightalign::AlignConfig config;
};

struct la_result {
  lightalign::AlignmentResult result;
};

struct la_trace_report {
  std::string text;
  std::string machine;
};

namespace {

thread_local std::string g_last_error = "no error";

template <typename Fn>
la_status guarded(Fn&& fn) {
  try {
    fn();
    return LA_OK;
  } catch (const lightalign::InvalidArgument& e) {
    g_last_error = e.what();
    return LA_ERROR_INVALID_ARGUMENT;
  } catch (const lightalign::DataError& e) {
    g_last_error = e.what();
    return LA_ERROR_DATA;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LA_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return LA_ERROR_INTERNAL;
  }
}

la_status invalid(const char* message) {
  g_last_error = message;
  return LA_ERROR_INVALID_ARGUMENT;
}

std::uint32_t lookup_file_id(const std::vector<std::int64_t>& ids, std::int64_t id,
                             const char* what) {
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return static_cast<std::uint32_t>(i);
  throw lightalign::DataError(std::string("unknown ") + what + " entity ID " +
                              std::to_string(id));
}

}  // namespace

extern "C" {

const char* la_version(void) { return "0.1.0"; }

const char* la_last_error(void) { return g_last_error.c_str(); }

la_config* la_config_new(void) { return new la_config(); }

void la_config_free(la_config* config) { delete config; }

la_status la_config_set_mode(la_config* config, const char* mode) {
  if (!config || !mode) return invalid("config and mode must not be NULL");
  return guarded([&] { config->config.mode = lightalign::align_mode_from_string(mode); });
}

#define LA_CONFIG_SETTER(name, field, type)                      \
  la_status la_config_set_##name(la_config* config, type value) { \
    if (!config) return invalid("config must not be NULL");      \
    config->config.field = value;                                \
    return LA_OK;                                                \
  }

LA_CONFIG_SETTER(dim, dim, size_t)
LA_CONFIG_SETTER(rounds, rounds, size_t)
LA_CONFIG_SETTER(topk, topk, size_t)
LA_CONFIG_SETTER(tau, tau, double)
LA_CONFIG_SETTER(sinkhorn_q, sinkhorn_q, size_t)
LA_CONFIG_SETTER(iterative_epochs, iterative_epochs, size_t)
LA_CONFIG_SETTER(seed, seed, uint64_t)
LA_CONFIG_SETTER(threads, threads, int)

#undef LA_CONFIG_SETTER

la_status la_config_set_reverse_triples(la_config* config, int enabled) {
  if (!config) return invalid("config must not be NULL");
  config->config.reverse_triples = enabled != 0;
  return LA_OK;
}

la_status la_config_set_per_round_l2(la_config* config, int enabled) {
  if (!config) return invalid("config must not be NULL");
  config->config.per_round_l2 = enabled != 0;
  return LA_OK;
}

la_status la_config_validate(const la_config* config) {
  if (!config) return invalid("config must not be NULL");
  return guarded([&] { config->config.validate(); });
}

la_status la_dataset_load(const char* dir, const char* train_file, double ratio,
                          uint64_t split_seed, la_dataset** out) {
  if (!dir || !out) return invalid("dir and out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    lightalign::SplitSpec split;
    if (train_file && train_file[0] != '\0') split.train_file = train_file;
    split.ratio = ratio;
    split.seed = split_seed;
    auto dataset = std::make_unique<la_dataset>();
    dataset->pair = lightalign::load_dataset(dir, split);
    *out = dataset.release();
  });
}

void la_dataset_free(la_dataset* dataset) { delete dataset; }

size_t la_dataset_entity_count(const la_dataset* dataset, int side) {
  if (!dataset) return 0;
  if (side == 1) return dataset->pair.source.entity_count;
  if (side == 2) return dataset->pair.target.entity_count;
  return 0;
}

size_t la_dataset_triple_count(const la_dataset* dataset, int side) {
  if (!dataset) return 0;
  if (side == 1) return dataset->pair.source.triples.size();
  if (side == 2) return dataset->pair.target.triples.size();
  return 0;
}

size_t la_dataset_seed_count(const la_dataset* dataset) {
  return dataset ? dataset->pair.seed_pairs.size() : 0;
}

size_t la_dataset_test_count(const la_dataset* dataset) {
  return dataset ? dataset->pair.test_pairs.size() : 0;
}

uint64_t la_dataset_fingerprint(const la_dataset* dataset) {
  return dataset ? dataset->pair.fingerprint : 0;
}

la_status la_synth(const char* out_dir, size_t entities, size_t triples,
                   double noise, uint64_t seed) {
  if (!out_dir) return invalid("out_dir must not be NULL");
  return guarded([&] {
    lightalign::SynthSpec spec;
    spec.entities = entities;
    spec.triples = triples;
    spec.noise = noise;
    spec.seed = seed;
    lightalign::synth_dataset(spec, out_dir);
  });
}

la_status la_align(const la_dataset* dataset, const la_config* config,
                   const char* source_embeddings, const char* target_embeddings,
                   la_result** out) {
  if (!dataset || !config || !out)
    return invalid("dataset, config, and out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    auto result = std::make_unique<la_result>();
    result->result = lightalign::run_pipeline(
        dataset->pair, config->config,
        source_embeddings ? source_embeddings : "",
        target_embeddings ? target_embeddings : "");
    *out = result.release();
  });
}

void la_result_free(la_result* result) { delete result; }

double la_result_hits1(const la_result* result) {
  return result ? result->result.metrics.hits1 : 0.0;
}

double la_result_hits10(const la_result* result) {
  return result ? result->result.metrics.hits10 : 0.0;
}

double la_result_mrr(const la_result* result) {
  return result ? result->result.metrics.mrr : 0.0;
}

double la_result_seconds_total(const la_result* result) {
  return result ? result->result.seconds_total : 0.0;
}

size_t la_result_pair_count(const la_result* result) {
  return result ? result->result.pairs.size() : 0;
}

la_status la_result_pair(const la_result* result, size_t index, int64_t* source_id,
                         int64_t* target_id, double* score) {
  if (!result || !source_id || !target_id || !score)
    return invalid("result and out-parameters must not be NULL");
  if (index >= result->result.pairs.size())
    return invalid("pair index out of range");
  const lightalign::AlignedPair& p = result->result.pairs[index];
  *source_id = result->result.source_entity_ids[p.source];
  *target_id = result->result.target_entity_ids[p.target];
  *score = p.score;
  return LA_OK;
}

la_status la_result_write(const la_result* result, const char* out_dir) {
  if (!result || !out_dir) return invalid("result and out_dir must not be NULL");
  return guarded([&] { lightalign::write_result(result->result, out_dir); });
}

la_status la_trace(const la_dataset* dataset, int64_t source_id,
                   int64_t predicted_id, int64_t gold_id, size_t hops,
                   size_t rounds, size_t top_m, int reverse_triples,
                   la_trace_report** out) {
  if (!dataset || !out) return invalid("dataset and out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    const lightalign::KgPair& pair = dataset->pair;
    std::uint32_t src = lookup_file_id(pair.source_entity_ids, source_id, "source");
    std::uint32_t pred = lookup_file_id(pair.target_entity_ids, predicted_id, "target");
    std::uint32_t gold = lookup_file_id(pair.target_entity_ids, gold_id, "target");
    lightalign::TraceReport report = lightalign::trace_alignment(
        pair, src, pred, gold, hops, rounds, top_m, reverse_triples != 0);
    auto handle = std::make_unique<la_trace_report>();
    handle->text = report.to_text();
    handle->machine = report.to_machine();
    *out = handle.release();
  });
}

void la_trace_free(la_trace_report* report) { delete report; }

const char* la_trace_text(const la_trace_report* report, int machine_readable) {
  if (!report) return "";
  return machine_readable ? report->machine.c_str() : report->text.c_str();
}

la_status la_eval_files(const char* pairs_path, const char* ref_path,
                        double* hits1, double* hits10, double* mrr) {
  if (!pairs_path || !ref_path || !hits1 || !hits10 || !mrr)
    return invalid("paths and out-parameters must not be NULL");
  return guarded([&] {
    using lightalign::DataError;

    auto read_rows = [](const std::string& path, bool with_score) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw DataError("cannot open " + path);
      std::vector<std::tuple<std::int64_t, std::int64_t, double>> rows;
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string where = path + ":" + std::to_string(lineno);
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
          std::size_t tab = line.find('\t', start);
          if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
          }
          fields.push_back(line.substr(start, tab - start));
          start = tab + 1;
        }
        if (fields.size() != (with_score ? 3u : 2u))
          throw DataError(where + ": wrong field count");
        auto parse_int = [&](const std::string& s) {
          std::int64_t v = 0;
          auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
          if (ec != std::errc() || p != s.data() + s.size())
            throw DataError(where + ": expected an integer ID");
          return v;
        };
        double score = 0.0;
        if (with_score) {
          const std::string& s = fields[2];
          auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), score);
          if (ec != std::errc() || p != s.data() + s.size())
            throw DataError(where + ": expected a numeric score");
        }
        rows.emplace_back(parse_int(fields[0]), parse_int(fields[1]), score);
      }
      return rows;
    };

    auto predictions = read_rows(pairs_path, true);
    auto references = read_rows(ref_path, false);
    if (references.empty()) throw DataError(std::string(ref_path) + ": no reference pairs");

    // Re-index file IDs densely, then reuse the library's ranking rules.
    std::set<std::int64_t> src_ids, tgt_ids;
    for (const auto& [s, t, score] : predictions) {
      src_ids.insert(s);
      tgt_ids.insert(t);
    }
    for (const auto& [s, t, score] : references) {
      src_ids.insert(s);
      tgt_ids.insert(t);
    }
    std::map<std::int64_t, std::uint32_t> src_index, tgt_index;
    for (std::int64_t id : src_ids)
      src_index.emplace(id, static_cast<std::uint32_t>(src_index.size()));
    for (std::int64_t id : tgt_ids)
      tgt_index.emplace(id, static_cast<std::uint32_t>(tgt_index.size()));

    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(src_index.size());
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (const auto& [s, t, score] : predictions) {
      if (!seen.emplace(s, t).second)
        throw DataError(std::string(pairs_path) + ": duplicate pair " +
                        std::to_string(s) + ", " + std::to_string(t));
      rows[src_index.at(s)].emplace_back(tgt_index.at(t), score);
    }

    lightalign::SparseSim sim;
    sim.rows = src_index.size();
    sim.cols = tgt_index.size();
    sim.row_ptr.assign(sim.rows + 1, 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (const auto& [col, score] : rows[i]) {
        sim.col.push_back(col);
        sim.score.push_back(score);
      }
      sim.row_ptr[i + 1] = sim.col.size();
    }

    std::vector<lightalign::IndexPair> tests;
    for (const auto& [s, t, score] : references)
      tests.emplace_back(src_index.at(s), tgt_index.at(t));

    lightalign::Metrics m = lightalign::evaluate(sim, tests);
    *hits1 = m.hits1;
    *hits10 = m.hits10;
    *mrr = m.mrr;
  });
}

}  // extern "C"
