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

#include "lightalign/kg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "lightalign/rng.hpp"

namespace lightalign {
namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::int64_t parse_id(const std::string& token, const std::string& where) {
  std::int64_t value = 0;
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || token.empty())
    throw DataError(where + ": expected an integer ID, got '" + token + "'");
  return value;
}

struct EntityTable {
  std::vector<std::int64_t> ids;           // local -> file ID
  std::vector<std::string> names;
  std::unordered_map<std::int64_t, std::uint32_t> index;  // file ID -> local
};

EntityTable read_entities(const std::string& path) {
  EntityTable table;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    std::string where = path + ":" + std::to_string(lineno);
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(where + ": expected '<id>\\t<name>'");
    std::int64_t id = parse_id(line.substr(0, tab), where);
    if (!table.index.emplace(id, static_cast<std::uint32_t>(table.ids.size())).second)
      throw DataError(where + ": duplicate entity ID " + std::to_string(id));
    table.ids.push_back(id);
    table.names.push_back(line.substr(tab + 1));
  }
  return table;
}

std::uint32_t lookup(const std::unordered_map<std::int64_t, std::uint32_t>& index,
                     std::int64_t id, const std::string& where) {
  auto it = index.find(id);
  if (it == index.end())
    throw DataError(where + ": unknown entity ID " + std::to_string(id));
  return it->second;
}

struct TripleTable {
  std::vector<Triple> triples;
  std::vector<std::int64_t> relation_ids;  // local -> file ID, sorted ascending
};

TripleTable read_triples(const std::string& path, const EntityTable& entities) {
  struct RawTriple {
    std::uint32_t head;
    std::int64_t rel;
    std::uint32_t tail;
  };
  std::vector<RawTriple> raw;
  std::set<std::int64_t> rel_ids;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    std::string where = path + ":" + std::to_string(lineno);
    std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != 3)
      throw DataError(where + ": expected '<head>\\t<rel>\\t<tail>'");
    RawTriple t;
    t.head = lookup(entities.index, parse_id(fields[0], where), where);
    t.rel = parse_id(fields[1], where);
    t.tail = lookup(entities.index, parse_id(fields[2], where), where);
    rel_ids.insert(t.rel);
    raw.push_back(t);
  }
  TripleTable table;
  table.relation_ids.assign(rel_ids.begin(), rel_ids.end());
  std::unordered_map<std::int64_t, std::uint32_t> rel_index;
  for (std::size_t i = 0; i < table.relation_ids.size(); ++i)
    rel_index.emplace(table.relation_ids[i], static_cast<std::uint32_t>(i));
  table.triples.reserve(raw.size());
  for (const RawTriple& t : raw)
    table.triples.push_back({t.head, rel_index.at(t.rel), t.tail});
  return table;
}

std::vector<std::pair<std::int64_t, std::int64_t>> read_id_pairs(const std::string& path) {
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    std::string where = path + ":" + std::to_string(lineno);
    std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != 2)
      throw DataError(where + ": expected '<src id>\\t<tgt id>'");
    pairs.emplace_back(parse_id(fields[0], where), parse_id(fields[1], where));
  }
  return pairs;
}

void check_unique_sides(const std::vector<IndexPair>& pairs, const std::string& what) {
  std::unordered_set<std::uint32_t> left, right;
  for (const IndexPair& p : pairs) {
    if (!left.insert(p.first).second)
      throw DataError(what + ": source entity appears in more than one pair");
    if (!right.insert(p.second).second)
      throw DataError(what + ": target entity appears in more than one pair");
  }
}

}  // namespace

void KnowledgeGraph::validate() const {
  for (const Triple& t : triples) {
    if (t.head >= entity_count || t.tail >= entity_count)
      throw DataError("triple references an entity outside the graph");
    if (t.rel >= relation_count)
      throw DataError("triple references a relation outside the graph");
  }
  if (!entity_names.empty() && entity_names.size() != entity_count)
    throw DataError("entity name table does not match entity count");
}

KgPair load_dataset(const std::string& dir, const SplitSpec& split) {
  namespace fs = std::filesystem;
  if (split.train_file.empty() && !(split.ratio > 0.0 && split.ratio <= 1.0))
    throw InvalidArgument("split ratio must be in (0, 1]");

  std::string ent1_path = (fs::path(dir) / "ent_ids_1").string();
  std::string ent2_path = (fs::path(dir) / "ent_ids_2").string();
  std::string tri1_path = (fs::path(dir) / "triples_1").string();
  std::string tri2_path = (fs::path(dir) / "triples_2").string();
  std::string ref_path = (fs::path(dir) / "ref_ent_ids").string();

  EntityTable ent1 = read_entities(ent1_path);
  EntityTable ent2 = read_entities(ent2_path);
  TripleTable tri1 = read_triples(tri1_path, ent1);
  TripleTable tri2 = read_triples(tri2_path, ent2);

  std::vector<IndexPair> refs;
  for (const auto& [src_id, tgt_id] : read_id_pairs(ref_path))
    refs.emplace_back(lookup(ent1.index, src_id, ref_path),
                      lookup(ent2.index, tgt_id, ref_path));

  KgPair pair;
  pair.source.entity_count = ent1.ids.size();
  pair.source.relation_count = tri1.relation_ids.size();
  pair.source.triples = std::move(tri1.triples);
  pair.source.entity_names = std::move(ent1.names);
  pair.target.entity_count = ent2.ids.size();
  pair.target.relation_count = tri2.relation_ids.size();
  pair.target.triples = std::move(tri2.triples);
  pair.target.entity_names = std::move(ent2.names);
  pair.source_entity_ids = std::move(ent1.ids);
  pair.target_entity_ids = std::move(ent2.ids);
  pair.source_relation_ids = std::move(tri1.relation_ids);
  pair.target_relation_ids = std::move(tri2.relation_ids);

  std::unordered_set<std::int64_t> id_set(pair.source_entity_ids.begin(),
                                          pair.source_entity_ids.end());
  pair.global_ids = true;
  for (std::int64_t id : pair.target_entity_ids)
    if (id_set.count(id)) {
      pair.global_ids = false;
      break;
    }

  if (!split.train_file.empty()) {
    std::set<IndexPair> seed_set;
    for (const auto& [src_id, tgt_id] : read_id_pairs(split.train_file))
      seed_set.emplace(lookup(ent1.index, src_id, split.train_file),
                       lookup(ent2.index, tgt_id, split.train_file));
    pair.seed_pairs.assign(seed_set.begin(), seed_set.end());
    for (const IndexPair& p : refs)
      if (!seed_set.count(p)) pair.test_pairs.push_back(p);
  } else {
    std::size_t n_seed = static_cast<std::size_t>(
        std::ceil(split.ratio * static_cast<double>(refs.size()) - 1e-9));
    if (n_seed > refs.size()) n_seed = refs.size();
    Rng rng(split.seed);
    rng.shuffle(refs);
    pair.seed_pairs.assign(refs.begin(), refs.begin() + n_seed);
    pair.test_pairs.assign(refs.begin() + n_seed, refs.end());
  }
  check_unique_sides(pair.seed_pairs, "seed pairs");

  std::vector<std::string> lines = read_lines(ent1_path);
  for (const std::string& p : {ent2_path, tri1_path, tri2_path, ref_path}) {
    std::vector<std::string> more = read_lines(p);
    lines.insert(lines.end(), more.begin(), more.end());
  }
  if (!split.train_file.empty()) {
    std::vector<std::string> more = read_lines(split.train_file);
    lines.insert(lines.end(), more.begin(), more.end());
  }
  pair.fingerprint = hash_sorted_lines(std::move(lines));

  pair.source.validate();
  pair.target.validate();
  return pair;
}

void write_dataset(const KgPair& pair, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  auto write_entities = [&](const std::string& name, const KnowledgeGraph& kg,
                            const std::vector<std::int64_t>& ids) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw DataError("cannot write " + name + " under " + dir);
    for (std::size_t i = 0; i < kg.entity_count; ++i) {
      std::string display = kg.entity_names.empty() ? "" : kg.entity_names[i];
      out << ids[i] << '\t' << display << '\n';
    }
  };
  auto write_triples = [&](const std::string& name, const KnowledgeGraph& kg,
                           const std::vector<std::int64_t>& ent_ids,
                           const std::vector<std::int64_t>& rel_ids) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw DataError("cannot write " + name + " under " + dir);
    for (const Triple& t : kg.triples)
      out << ent_ids[t.head] << '\t' << rel_ids[t.rel] << '\t' << ent_ids[t.tail] << '\n';
  };

  write_entities("ent_ids_1", pair.source, pair.source_entity_ids);
  write_entities("ent_ids_2", pair.target, pair.target_entity_ids);
  write_triples("triples_1", pair.source, pair.source_entity_ids, pair.source_relation_ids);
  write_triples("triples_2", pair.target, pair.target_entity_ids, pair.target_relation_ids);

  std::ofstream ref(fs::path(dir) / "ref_ent_ids", std::ios::binary);
  if (!ref) throw DataError("cannot write ref_ent_ids under " + dir);
  for (const auto& pairs : {&pair.seed_pairs, &pair.test_pairs})
    for (const IndexPair& p : *pairs)
      ref << pair.source_entity_ids[p.first] << '\t'
          << pair.target_entity_ids[p.second] << '\n';
}

KnowledgeGraph add_reverse_triples(const KnowledgeGraph& kg) {
  KnowledgeGraph out;
  out.entity_count = kg.entity_count;
  out.relation_count = kg.relation_count * 2;
  out.entity_names = kg.entity_names;
  out.triples.reserve(kg.triples.size() * 2);
  std::uint32_t shift = static_cast<std::uint32_t>(kg.relation_count);
  for (const Triple& t : kg.triples) out.triples.push_back(t);
  for (const Triple& t : kg.triples)
    out.triples.push_back({t.tail, t.rel + shift, t.head});
  return out;
}

std::vector<Triple> dedup_triples(std::vector<Triple> triples) {
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  return triples;
}

std::uint64_t hash_sorted_lines(std::vector<std::string> lines) {
  std::sort(lines.begin(), lines.end());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const std::string& line : lines) {
    for (unsigned char c : line) mix(c);
    mix('\n');
  }
  return h;
}

}  // namespace lightalign
