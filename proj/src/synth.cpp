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

#include "lightalign/synth.hpp"

#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "lightalign/common.hpp"
#include "lightalign/kg.hpp"
#include "lightalign/rng.hpp"

namespace lightalign {

void synth_dataset(const SynthSpec& spec, const std::string& dir) {
  if (spec.entities < 2) throw InvalidArgument("synthesis needs at least 2 entities");
  if (spec.triples < spec.entities - 1)
    throw InvalidArgument("synthesis needs at least entities - 1 triples");
  if (spec.noise < 0.0 || spec.noise > 1.0)
    throw InvalidArgument("noise must be in [0, 1]");

  const std::size_t n = spec.entities;
  const std::uint64_t relations = std::max<std::uint64_t>(2, n / 50);
  Rng rng(spec.seed);

  // Backbone first: entity i attaches to an earlier entity, which keeps the
  // graph weakly connected so every entity sees some label mass.
  std::vector<Triple> triples;
  triples.reserve(spec.triples);
  for (std::size_t i = 1; i < n; ++i) {
    std::uint32_t rel = static_cast<std::uint32_t>(rng.next_below(relations));
    std::uint32_t tail = static_cast<std::uint32_t>(rng.next_below(i));
    triples.push_back({static_cast<std::uint32_t>(i), rel, tail});
  }
  for (std::size_t x = triples.size(); x < spec.triples; ++x) {
    std::uint32_t head = static_cast<std::uint32_t>(rng.next_below(n));
    std::uint32_t rel = static_cast<std::uint32_t>(rng.next_below(relations));
    std::uint32_t tail = static_cast<std::uint32_t>(rng.next_below(n));
    triples.push_back({head, rel, tail});
  }

  std::vector<std::uint32_t> entity_perm(n), relation_perm(relations);
  std::iota(entity_perm.begin(), entity_perm.end(), 0);
  std::iota(relation_perm.begin(), relation_perm.end(), 0);
  rng.shuffle(entity_perm);
  rng.shuffle(relation_perm);

  std::vector<Triple> target;
  target.reserve(triples.size());
  for (const Triple& t : triples) {
    std::uint32_t tail = entity_perm[t.tail];
    if (rng.next_double() < spec.noise)
      tail = static_cast<std::uint32_t>(rng.next_below(n));
    target.push_back({entity_perm[t.head], relation_perm[t.rel], tail});
  }

  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw DataError(std::string("cannot write ") + name + " under " + dir);
    return out;
  };

  {
    std::ofstream out = open("ent_ids_1");
    for (std::size_t i = 0; i < n; ++i) out << i << "\ts" << i << '\n';
  }
  {
    std::ofstream out = open("ent_ids_2");
    for (std::size_t j = 0; j < n; ++j) out << n + j << "\tt" << j << '\n';
  }
  {
    std::ofstream out = open("triples_1");
    for (const Triple& t : triples)
      out << t.head << '\t' << t.rel << '\t' << t.tail << '\n';
  }
  {
    std::ofstream out = open("triples_2");
    for (const Triple& t : target)
      out << n + t.head << '\t' << t.rel << '\t' << n + t.tail << '\n';
  }
  {
    std::ofstream out = open("ref_ent_ids");
    for (std::size_t i = 0; i < n; ++i) out << i << '\t' << n + entity_perm[i] << '\n';
  }
}

}  // namespace lightalign
