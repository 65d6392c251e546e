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

#include "lightalign/labels.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "lightalign/rng.hpp"

namespace lightalign {
namespace {

void check_pairs_in_range(const KgPair& pair, const std::vector<IndexPair>& pairs) {
  for (const IndexPair& p : pairs) {
    if (p.first >= pair.source.entity_count || p.second >= pair.target.entity_count)
      throw InvalidArgument("pair index outside the entity ranges");
  }
}

InitialLabels zero_labels(const KgPair& pair, std::size_t dim) {
  InitialLabels labels;
  labels.source_entity = Matrix(pair.source.entity_count, dim);
  labels.target_entity = Matrix(pair.target.entity_count, dim);
  labels.source_relation = Matrix(pair.source.relation_count, dim);
  labels.target_relation = Matrix(pair.target.relation_count, dim);
  return labels;
}

// Draws a unit vector into out. Redraws on an exactly-zero sample, which
// keeps the norm invariant without biasing anything observable.
void fill_unit_vector(Rng& rng, Real* out, std::size_t dim) {
  for (;;) {
    Real sum = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      out[j] = rng.next_gaussian();
      sum += out[j] * out[j];
    }
    if (sum > 0.0) {
      Real inv = 1.0 / std::sqrt(sum);
      for (std::size_t j = 0; j < dim; ++j) out[j] *= inv;
      return;
    }
  }
}

// Embedding file: `<entity id> TAB <float> TAB <float> ...`, one line per
// entity, IDs in the dataset's file-ID space.
Matrix read_embeddings(const std::string& path,
                       const std::vector<std::int64_t>& entity_ids) {
  std::unordered_map<std::int64_t, std::uint32_t> index;
  for (std::size_t i = 0; i < entity_ids.size(); ++i)
    index.emplace(entity_ids[i], static_cast<std::uint32_t>(i));

  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);

  Matrix out;
  std::vector<bool> seen(entity_ids.size(), false);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string where = path + ":" + std::to_string(lineno);

    std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(where + ": expected '<id>\\t<float>...'");
    std::int64_t id = 0;
    {
      auto [ptr, ec] = std::from_chars(line.data(), line.data() + tab, id);
      if (ec != std::errc() || ptr != line.data() + tab)
        throw DataError(where + ": expected an integer ID");
    }
    auto it = index.find(id);
    if (it == index.end())
      throw DataError(where + ": unknown entity ID " + std::to_string(id));
    if (seen[it->second])
      throw DataError(where + ": duplicate vector for entity ID " + std::to_string(id));
    seen[it->second] = true;

    std::vector<Real> values;
    std::size_t start = tab + 1;
    while (start <= line.size()) {
      std::size_t end = line.find('\t', start);
      if (end == std::string::npos) end = line.size();
      Real v = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + start, line.data() + end, v);
      if (ec != std::errc() || ptr != line.data() + end)
        throw DataError(where + ": non-numeric embedding value");
      if (!std::isfinite(v))
        throw DataError(where + ": non-finite embedding value");
      values.push_back(v);
      if (end == line.size()) break;
      start = end + 1;
    }
    if (values.empty()) throw DataError(where + ": empty embedding vector");

    if (out.cols == 0) {
      out = Matrix(entity_ids.size(), values.size());
    } else if (values.size() != out.cols) {
      throw DataError(where + ": embedding dimension " + std::to_string(values.size()) +
                      " does not match " + std::to_string(out.cols));
    }
    Real* r = out.row(it->second);
    for (std::size_t j = 0; j < values.size(); ++j) r[j] = values[j];
  }

  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw DataError(path + ": no vector for entity ID " +
                      std::to_string(entity_ids[i]));
  out.l2_normalize_rows();
  return out;
}

}  // namespace

InitialLabels init_onehot(const KgPair& pair) {
  if (pair.seed_pairs.empty())
    throw InvalidArgument("one-hot labels need at least one seed pair");
  check_pairs_in_range(pair, pair.seed_pairs);
  InitialLabels labels = zero_labels(pair, pair.seed_pairs.size());
  for (std::size_t x = 0; x < pair.seed_pairs.size(); ++x) {
    labels.source_entity.at(pair.seed_pairs[x].first, x) = 1.0;
    labels.target_entity.at(pair.seed_pairs[x].second, x) = 1.0;
  }
  return labels;
}

InitialLabels random_labels_for_pairs(const KgPair& pair,
                                      const std::vector<IndexPair>& pairs,
                                      std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw InvalidArgument("label dimension must be positive");
  if (pairs.empty()) throw InvalidArgument("random labels need at least one pair");
  check_pairs_in_range(pair, pairs);
  InitialLabels labels = zero_labels(pair, dim);
  for (std::size_t x = 0; x < pairs.size(); ++x)
    set_pair_label(labels.source_entity, labels.target_entity, pairs[x], x, seed);
  return labels;
}

InitialLabels init_random_orthogonal(const KgPair& pair, std::size_t dim,
                                     std::uint64_t seed) {
  return random_labels_for_pairs(pair, pair.seed_pairs, dim, seed);
}

InitialLabels init_literal(const KgPair& pair, const std::string& source_path,
                           const std::string& target_path) {
  InitialLabels labels;
  labels.source_entity = read_embeddings(source_path, pair.source_entity_ids);
  labels.target_entity = read_embeddings(target_path, pair.target_entity_ids);
  if (labels.source_entity.cols != labels.target_entity.cols)
    throw DataError("embedding dimensions differ between the two files");
  labels.source_relation = Matrix(pair.source.relation_count, labels.source_entity.cols);
  labels.target_relation = Matrix(pair.target.relation_count, labels.target_entity.cols);
  return labels;
}

void set_pair_label(Matrix& source_entity, Matrix& target_entity,
                    IndexPair pair, std::uint64_t pair_index,
                    std::uint64_t seed) {
  if (source_entity.cols != target_entity.cols)
    throw InvalidArgument("label matrices have different dimensions");
  if (pair.first >= source_entity.rows || pair.second >= target_entity.rows)
    throw InvalidArgument("pair index outside the entity ranges");
  Rng rng = Rng::pair_stream(seed, pair_index);
  Real* src = source_entity.row(pair.first);
  fill_unit_vector(rng, src, source_entity.cols);
  Real* tgt = target_entity.row(pair.second);
  for (std::size_t j = 0; j < source_entity.cols; ++j) tgt[j] = src[j];
}

}  // namespace lightalign
