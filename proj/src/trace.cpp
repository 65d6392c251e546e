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

#include "lightalign/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include "lightalign/propagate.hpp"

namespace lightalign {
namespace {

constexpr std::uint32_t kAbsent = UINT32_MAX;

struct SideRestriction {
  std::vector<std::uint32_t> to_parent;    // restricted -> parent, ascending
  std::vector<std::uint32_t> from_parent;  // parent -> restricted or kAbsent
};

SideRestriction bfs_side(const KnowledgeGraph& kg,
                         const std::vector<std::uint32_t>& focus, std::size_t hops) {
  for (std::uint32_t f : focus)
    if (f >= kg.entity_count) throw InvalidArgument("focus entity outside the graph");

  // Undirected adjacency in CSR form, built once per call.
  std::vector<std::size_t> degree(kg.entity_count + 1, 0);
  for (const Triple& t : kg.triples) {
    ++degree[t.head + 1];
    ++degree[t.tail + 1];
  }
  for (std::size_t i = 0; i < kg.entity_count; ++i) degree[i + 1] += degree[i];
  std::vector<std::uint32_t> adj(degree.back());
  std::vector<std::size_t> cursor(degree.begin(), degree.end() - 1);
  for (const Triple& t : kg.triples) {
    adj[cursor[t.head]++] = t.tail;
    adj[cursor[t.tail]++] = t.head;
  }

  std::vector<std::size_t> dist(kg.entity_count, SIZE_MAX);
  std::vector<std::uint32_t> frontier;
  for (std::uint32_t f : focus) {
    if (dist[f] == SIZE_MAX) {
      dist[f] = 0;
      frontier.push_back(f);
    }
  }
  for (std::size_t step = 1; step <= hops && !frontier.empty(); ++step) {
    std::vector<std::uint32_t> next;
    for (std::uint32_t u : frontier) {
      for (std::size_t e = degree[u]; e < degree[u + 1]; ++e) {
        std::uint32_t v = adj[e];
        if (dist[v] == SIZE_MAX) {
          dist[v] = step;
          next.push_back(v);
        }
      }
    }
    frontier = std::move(next);
  }

  SideRestriction side;
  side.from_parent.assign(kg.entity_count, kAbsent);
  for (std::uint32_t i = 0; i < kg.entity_count; ++i) {
    if (dist[i] != SIZE_MAX) {
      side.from_parent[i] = static_cast<std::uint32_t>(side.to_parent.size());
      side.to_parent.push_back(i);
    }
  }
  return side;
}

KnowledgeGraph restrict_graph(const KnowledgeGraph& kg, const SideRestriction& side,
                              std::vector<std::int64_t>* relation_ids) {
  KnowledgeGraph out;
  out.entity_count = side.to_parent.size();
  if (!kg.entity_names.empty()) {
    out.entity_names.reserve(out.entity_count);
    for (std::uint32_t p : side.to_parent) out.entity_names.push_back(kg.entity_names[p]);
  }

  std::vector<Triple> kept;
  std::set<std::uint32_t> rels;
  for (const Triple& t : kg.triples) {
    if (side.from_parent[t.head] != kAbsent && side.from_parent[t.tail] != kAbsent) {
      kept.push_back({side.from_parent[t.head], t.rel, side.from_parent[t.tail]});
      rels.insert(t.rel);
    }
  }
  std::unordered_map<std::uint32_t, std::uint32_t> rel_map;
  std::vector<std::int64_t> kept_rel_ids;
  for (std::uint32_t r : rels) {
    rel_map.emplace(r, static_cast<std::uint32_t>(rel_map.size()));
    if (relation_ids) kept_rel_ids.push_back((*relation_ids)[r]);
  }
  for (Triple& t : kept) t.rel = rel_map.at(t.rel);
  out.relation_count = rel_map.size();
  out.triples = std::move(kept);
  if (relation_ids) *relation_ids = std::move(kept_rel_ids);
  return out;
}

std::string display_name(const KnowledgeGraph& kg,
                         const std::vector<std::int64_t>& ids, std::uint32_t i) {
  if (!kg.entity_names.empty() && !kg.entity_names[i].empty()) return kg.entity_names[i];
  if (i < ids.size()) return "#" + std::to_string(ids[i]);
  return "#" + std::to_string(i);
}

std::string format_value(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

SubgraphPair extract_subgraph(const KgPair& pair,
                              const std::vector<std::uint32_t>& source_focus,
                              const std::vector<std::uint32_t>& target_focus,
                              std::size_t hops) {
  SideRestriction src = bfs_side(pair.source, source_focus, hops);
  SideRestriction tgt = bfs_side(pair.target, target_focus, hops);

  SubgraphPair sub;
  sub.source_to_parent = src.to_parent;
  sub.target_to_parent = tgt.to_parent;

  std::vector<std::int64_t> src_rel_ids = pair.source_relation_ids;
  std::vector<std::int64_t> tgt_rel_ids = pair.target_relation_ids;
  sub.pair.source =
      restrict_graph(pair.source, src, src_rel_ids.empty() ? nullptr : &src_rel_ids);
  sub.pair.target =
      restrict_graph(pair.target, tgt, tgt_rel_ids.empty() ? nullptr : &tgt_rel_ids);
  sub.pair.source_relation_ids = std::move(src_rel_ids);
  sub.pair.target_relation_ids = std::move(tgt_rel_ids);

  if (!pair.source_entity_ids.empty()) {
    for (std::uint32_t p : src.to_parent)
      sub.pair.source_entity_ids.push_back(pair.source_entity_ids[p]);
    for (std::uint32_t p : tgt.to_parent)
      sub.pair.target_entity_ids.push_back(pair.target_entity_ids[p]);
  }

  for (const IndexPair& p : pair.seed_pairs) {
    std::uint32_t a = src.from_parent[p.first];
    std::uint32_t b = tgt.from_parent[p.second];
    if (a != kAbsent && b != kAbsent) sub.pair.seed_pairs.emplace_back(a, b);
  }
  for (const IndexPair& p : pair.test_pairs) {
    std::uint32_t a = src.from_parent[p.first];
    std::uint32_t b = tgt.from_parent[p.second];
    if (a != kAbsent && b != kAbsent) sub.pair.test_pairs.emplace_back(a, b);
  }
  sub.pair.global_ids = pair.global_ids;
  sub.pair.fingerprint = pair.fingerprint;
  return sub;
}

TraceReport trace_alignment(const KgPair& pair, std::uint32_t source_entity,
                            std::uint32_t predicted_target,
                            std::uint32_t gold_target, std::size_t hops,
                            std::size_t rounds, std::size_t top_m,
                            bool reverse_triples, bool per_round_l2) {
  if (source_entity >= pair.source.entity_count)
    throw InvalidArgument("source entity outside the graph");
  if (predicted_target >= pair.target.entity_count ||
      gold_target >= pair.target.entity_count)
    throw InvalidArgument("target entity outside the graph");
  if (top_m == 0) throw InvalidArgument("top_m must be at least 1");

  std::vector<std::uint32_t> target_focus{predicted_target};
  if (gold_target != predicted_target) target_focus.push_back(gold_target);
  SubgraphPair sub = extract_subgraph(pair, {source_entity}, target_focus, hops);

  if (sub.pair.seed_pairs.empty())
    throw DataError("no seed pairs within " + std::to_string(hops) +
                    " hops of the focal entities; increase hops");

  std::vector<std::uint32_t> src_classes, tgt_classes;
  for (const IndexPair& p : sub.pair.seed_pairs) {
    src_classes.push_back(p.first);
    tgt_classes.push_back(p.second);
  }
  LabelState src_state = propagate_onehot_subgraph(sub.pair.source, src_classes,
                                                   rounds, reverse_triples,
                                                   per_round_l2);
  LabelState tgt_state = propagate_onehot_subgraph(sub.pair.target, tgt_classes,
                                                   rounds, reverse_triples,
                                                   per_round_l2);

  // Anchor labels: the source-side name of the seed pair, joined with the
  // target-side name when the two differ.
  std::vector<std::string> anchor_labels;
  for (const IndexPair& p : sub.pair.seed_pairs) {
    std::string a = display_name(sub.pair.source, sub.pair.source_entity_ids, p.first);
    std::string b = display_name(sub.pair.target, sub.pair.target_entity_ids, p.second);
    anchor_labels.push_back(a == b ? a : a + " / " + b);
  }

  std::unordered_map<std::uint32_t, std::uint32_t> src_from_parent, tgt_from_parent;
  for (std::uint32_t i = 0; i < sub.source_to_parent.size(); ++i)
    src_from_parent.emplace(sub.source_to_parent[i], i);
  for (std::uint32_t i = 0; i < sub.target_to_parent.size(); ++i)
    tgt_from_parent.emplace(sub.target_to_parent[i], i);

  auto top_anchors = [&](const LabelState& state, std::uint32_t row,
                         std::size_t round) {
    const Matrix& m = state.entity_rounds[round];
    std::vector<TraceAnchor> out;
    for (std::size_t x = 0; x < m.cols; ++x) {
      Real v = m.at(row, x);
      if (v > 0.0) out.push_back({x, anchor_labels[x], v});
    }
    std::sort(out.begin(), out.end(), [](const TraceAnchor& a, const TraceAnchor& b) {
      if (a.value != b.value) return a.value > b.value;
      return a.pair_index < b.pair_index;
    });
    if (out.size() > top_m) out.resize(top_m);
    return out;
  };

  auto make_focal = [&](const char* role, std::uint32_t parent_index, bool is_source,
                        const LabelState& state,
                        const std::unordered_map<std::uint32_t, std::uint32_t>& from_parent) {
    TraceFocal focal;
    focal.role = role;
    focal.index = parent_index;
    const KnowledgeGraph& kg = is_source ? pair.source : pair.target;
    const std::vector<std::int64_t>& ids =
        is_source ? pair.source_entity_ids : pair.target_entity_ids;
    focal.file_id = ids.empty() ? static_cast<std::int64_t>(parent_index)
                                : ids[parent_index];
    focal.name = kg.entity_names.empty() ? "" : kg.entity_names[parent_index];
    std::uint32_t row = from_parent.at(parent_index);
    for (std::size_t t = 0; t <= rounds; ++t)
      focal.per_round.push_back(top_anchors(state, row, t));
    return focal;
  };

  TraceReport report;
  report.source = make_focal("source", source_entity, true, src_state, src_from_parent);
  report.predicted =
      make_focal("predicted", predicted_target, false, tgt_state, tgt_from_parent);
  report.gold = make_focal("gold", gold_target, false, tgt_state, tgt_from_parent);
  report.subgraph_source_entities = sub.pair.source.entity_count;
  report.subgraph_target_entities = sub.pair.target.entity_count;
  report.anchor_count = sub.pair.seed_pairs.size();
  report.hops = hops;
  report.rounds = rounds;
  report.top_m = top_m;

  auto anchor_set = [](const std::vector<TraceAnchor>& anchors) {
    std::set<std::size_t> s;
    for (const TraceAnchor& a : anchors) s.insert(a.pair_index);
    return s;
  };
  std::set<std::size_t> union_pred, union_gold;
  for (std::size_t t = 1; t <= rounds; ++t) {
    std::set<std::size_t> s = anchor_set(report.source.per_round[t]);
    std::set<std::size_t> p = anchor_set(report.predicted.per_round[t]);
    std::set<std::size_t> g = anchor_set(report.gold.per_round[t]);
    TraceOverlap o;
    o.round = t;
    for (std::size_t x : s) {
      if (p.count(x)) {
        ++o.source_predicted;
        union_pred.insert(x);
      }
      if (g.count(x)) {
        ++o.source_gold;
        union_gold.insert(x);
      }
    }
    report.overlaps.push_back(o);
  }
  report.union_source_predicted = union_pred.size();
  report.union_source_gold = union_gold.size();
  return report;
}

std::string TraceReport::to_text() const {
  std::ostringstream out;
  auto describe = [](const TraceFocal& f) {
    std::string s = "#" + std::to_string(f.file_id);
    if (!f.name.empty()) s += " " + f.name;
    return s;
  };
  out << "trace: source " << describe(source) << " -> predicted "
      << describe(predicted) << ", gold " << describe(gold) << "\n";
  out << "subgraph: " << subgraph_source_entities << " source entities, "
      << subgraph_target_entities << " target entities, " << anchor_count
      << " anchor pairs, " << hops << " hops\n";
  for (std::size_t t = 0; t <= rounds; ++t) {
    out << "round " << t << ":\n";
    for (const TraceFocal* f : {&source, &predicted, &gold}) {
      out << "  " << f->role << (f->role.size() < 9 ? std::string(9 - f->role.size(), ' ') : "")
          << ":";
      if (f->per_round[t].empty()) out << " (no anchor mass)";
      for (const TraceAnchor& a : f->per_round[t])
        out << " " << a.label << " " << format_value(a.value) << ";";
      out << "\n";
    }
    if (t >= 1) {
      const TraceOverlap& o = overlaps[t - 1];
      out << "  shared anchors: source&predicted " << o.source_predicted
          << ", source&gold " << o.source_gold << "\n";
    }
  }
  out << "union over rounds 1.." << rounds << ": source&predicted "
      << union_source_predicted << ", source&gold " << union_source_gold << "\n";
  return out.str();
}

std::string TraceReport::to_machine() const {
  std::ostringstream out;
  auto emit_focal = [&](const TraceFocal& f) {
    out << f.role << ".id\t" << f.file_id << "\n";
    out << f.role << ".name\t" << f.name << "\n";
    for (std::size_t t = 0; t < f.per_round.size(); ++t) {
      for (std::size_t r = 0; r < f.per_round[t].size(); ++r) {
        const TraceAnchor& a = f.per_round[t][r];
        out << f.role << ".round." << t << "." << r << ".anchor\t" << a.pair_index
            << "\n";
        out << f.role << ".round." << t << "." << r << ".label\t" << a.label << "\n";
        out << f.role << ".round." << t << "." << r << ".value\t"
            << format_value(a.value) << "\n";
      }
    }
  };
  out << "subgraph.source_entities\t" << subgraph_source_entities << "\n";
  out << "subgraph.target_entities\t" << subgraph_target_entities << "\n";
  out << "subgraph.anchors\t" << anchor_count << "\n";
  out << "hops\t" << hops << "\n";
  out << "rounds\t" << rounds << "\n";
  out << "top_m\t" << top_m << "\n";
  emit_focal(source);
  emit_focal(predicted);
  emit_focal(gold);
  for (const TraceOverlap& o : overlaps) {
    out << "shared.round." << o.round << ".predicted\t" << o.source_predicted << "\n";
    out << "shared.round." << o.round << ".gold\t" << o.source_gold << "\n";
  }
  out << "shared.union.predicted\t" << union_source_predicted << "\n";
  out << "shared.union.gold\t" << union_source_gold << "\n";
  return out.str();
}

}  // namespace lightalign
