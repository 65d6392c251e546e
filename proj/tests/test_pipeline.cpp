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

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "lightalign/synth.hpp"
#include "test_util.hpp"

using namespace lightalign;
using testutil::TempDir;

namespace {

AlignConfig small_config() {
  AlignConfig config;
  config.dim = 128;
  config.rounds = 2;
  config.topk = 50;
  config.tau = 0.05;
  config.sinkhorn_q = 10;
  config.iterative_epochs = 0;
  config.seed = 42;
  config.threads = 1;
  return config;
}

KgPair synth_pair(std::size_t entities, std::size_t triples, double noise,
                  std::uint64_t seed, double ratio) {
  TempDir dir;
  SynthSpec spec;
  spec.entities = entities;
  spec.triples = triples;
  spec.noise = noise;
  spec.seed = seed;
  synth_dataset(spec, dir.str());
  SplitSpec split;
  split.ratio = ratio;
  return load_dataset(dir.str(), split);
}

// Ranks 1, 2, 4, 11, and one gold column that was never retrieved.
SparseSim ranked_fixture() {
  SparseSim sim;
  sim.rows = 5;
  sim.cols = 12;
  auto push_row = [&sim](std::vector<std::pair<std::uint32_t, double>> entries) {
    for (const auto& [col, score] : entries) {
      sim.col.push_back(col);
      sim.score.push_back(score);
    }
    sim.row_ptr.push_back(sim.col.size());
  };
  sim.row_ptr.push_back(0);
  push_row({{0, 1.0}, {5, 0.2}});
  push_row({{0, 0.9}, {1, 0.8}});
  push_row({{0, 0.9}, {3, 0.8}, {7, 0.7}, {2, 0.5}, {9, 0.1}});
  push_row({{0, 0.9}, {1, 0.85}, {2, 0.8}, {4, 0.7}, {5, 0.6}, {6, 0.5},
            {7, 0.4}, {8, 0.3}, {9, 0.25}, {10, 0.2}, {3, 0.1}});
  push_row({{0, 0.9}, {1, 0.5}});
  return sim;
}

bool pairs_equal(const std::vector<AlignedPair>& a, const std::vector<AlignedPair>& b) {
  return a == b;
}

}  // namespace

TEST_CASE("evaluation scores hand-ranked candidates") {
  SparseSim sim = ranked_fixture();
  std::vector<IndexPair> tests = {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};
  Metrics m = evaluate(sim, tests);
  CHECK(m.hits1 == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(m.hits10 == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(m.mrr ==
        doctest::Approx((1.0 + 0.5 + 0.25 + 1.0 / 11.0) / 5.0).epsilon(1e-12));
}

TEST_CASE("a runner-up gold column scores half a reciprocal point") {
  Matrix s(2, 2);
  s.at(0, 0) = 0.3;
  s.at(0, 1) = 0.9;
  s.at(1, 0) = 0.1;
  s.at(1, 1) = 0.8;
  Metrics m = evaluate(s, {{0, 0}});
  CHECK(m.hits1 == 0.0);
  CHECK(m.hits10 == 1.0);
  CHECK(m.mrr == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("equal scores rank by column index") {
  Matrix s(1, 3);
  s.at(0, 0) = 0.5;
  s.at(0, 1) = 0.5;
  s.at(0, 2) = 0.2;
  CHECK(evaluate(s, {{0, 0}}).mrr == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(evaluate(s, {{0, 1}}).mrr == doctest::Approx(0.5).epsilon(1e-12));

  Matrix flat(1, 3);
  flat.at(0, 0) = 0.7;
  flat.at(0, 1) = 0.7;
  flat.at(0, 2) = 0.7;
  CHECK(evaluate(flat, {{0, 2}}).mrr == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("evaluation rejects empty or out-of-shape test sets") {
  Matrix s(2, 2);
  CHECK_THROWS_AS(evaluate(s, {}), InvalidArgument);
  CHECK_THROWS_AS(evaluate(s, {{2, 0}}), InvalidArgument);
  CHECK_THROWS_AS(evaluate(s, {{0, 2}}), InvalidArgument);
  SparseSim sim = ranked_fixture();
  CHECK_THROWS_AS(evaluate(sim, {}), InvalidArgument);
  CHECK_THROWS_AS(evaluate(sim, {{5, 0}}), InvalidArgument);
  CHECK_THROWS_AS(evaluate(sim, {{0, 12}}), InvalidArgument);
}

TEST_CASE("sparse and dense evaluation agree on full support") {
  Matrix s(20, 15);
  std::mt19937 gen(3);
  testutil::fill_uniform(s, gen);
  SparseSim sim = topk_from_dense(s, 15);
  std::vector<IndexPair> tests;
  std::uniform_int_distribution<std::uint32_t> col(0, 14);
  for (std::uint32_t r = 0; r < 20; ++r) tests.push_back({r, col(gen)});
  Metrics a = evaluate(s, tests);
  Metrics b = evaluate(sim, tests);
  CHECK(a.hits1 == b.hits1);
  CHECK(a.hits10 == b.hits10);
  CHECK(a.mrr == doctest::Approx(b.mrr).epsilon(1e-12));
}

TEST_CASE("a clean isomorphic pair aligns perfectly") {
  KgPair pair = synth_pair(200, 800, 0.0, 5, 0.3);
  AlignConfig config = small_config();
  config.dim = 256;
  AlignmentResult result = run_basic(pair, config);
  CHECK(result.metrics.hits1 == 1.0);
  CHECK(result.metrics.hits10 == 1.0);
  CHECK(result.metrics.mrr == 1.0);
  CHECK(result.pairs.size() > 0);
  for (std::size_t i = 1; i < result.pairs.size(); ++i)
    CHECK(result.pairs[i - 1].source < result.pairs[i].source);
  CHECK(result.dataset_fingerprint == pair.fingerprint);
  CHECK(result.seconds_total >= 0.0);

  std::vector<std::string> stage_names;
  for (const auto& [name, seconds] : result.seconds_per_stage) {
    stage_names.push_back(name);
    CHECK(seconds >= 0.0);
  }
  CHECK(stage_names == std::vector<std::string>{"build_views", "init_labels",
                                                "propagate", "retrieve", "sinkhorn",
                                                "extract", "evaluate"});
}

TEST_CASE("zero propagation rounds leave non-seed entities unmatched") {
  KgPair pair = synth_pair(100, 400, 0.0, 6, 0.3);
  AlignConfig config = small_config();
  config.rounds = 0;
  AlignmentResult result = run_basic(pair, config);
  CHECK(result.metrics.hits1 == 0.0);
  CHECK(result.metrics.hits10 == 0.0);
  CHECK(result.metrics.mrr == 0.0);
}

TEST_CASE("zero self-training epochs reproduce the basic run") {
  KgPair pair = synth_pair(120, 480, 0.1, 7, 0.3);
  AlignConfig config = small_config();
  AlignmentResult basic = run_basic(pair, config);
  config.mode = AlignMode::Iterative;
  config.iterative_epochs = 0;
  AlignmentResult iterative = run_iterative(pair, config);
  CHECK(pairs_equal(basic.pairs, iterative.pairs));
  CHECK(basic.metrics.hits1 == iterative.metrics.hits1);
  CHECK(basic.metrics.mrr == iterative.metrics.mrr);
  CHECK(iterative.pseudo_pairs.empty());
}

TEST_CASE("self-training helps a noisy pair and never reuses entities") {
  KgPair pair = synth_pair(250, 1000, 0.2, 8, 0.3);
  AlignConfig config = small_config();
  AlignmentResult basic = run_basic(pair, config);
  config.mode = AlignMode::Iterative;
  config.iterative_epochs = 5;
  AlignmentResult iterative = run_iterative(pair, config);

  CHECK(iterative.metrics.hits1 >= basic.metrics.hits1 - 1e-12);
  CHECK(iterative.metrics.hits1 >= 0.5);
  CHECK(!iterative.pseudo_pairs.empty());

  std::set<std::uint32_t> sources, targets;
  for (const auto& [s, t] : pair.seed_pairs) {
    sources.insert(s);
    targets.insert(t);
  }
  for (const auto& [s, t] : iterative.pseudo_pairs) {
    CHECK(sources.insert(s).second);  // never a seed, never repeated
    CHECK(targets.insert(t).second);
    CHECK(s < pair.source.entity_count);
    CHECK(t < pair.target.entity_count);
  }
}

TEST_CASE("alignment without seeds is rejected outside literal mode") {
  KgPair pair = synth_pair(50, 200, 0.0, 9, 0.3);
  pair.seed_pairs.clear();
  CHECK_THROWS_AS(run_basic(pair, small_config()), InvalidArgument);
  AlignConfig config = small_config();
  config.mode = AlignMode::Iterative;
  config.iterative_epochs = 2;
  CHECK_THROWS_AS(run_iterative(pair, config), InvalidArgument);
}

TEST_CASE("literal labels align a relabeled ring without seeds") {
  const std::size_t n = 8;
  std::vector<std::uint32_t> perm = {3, 7, 1, 0, 5, 2, 6, 4};
  std::vector<Triple> source, target;
  for (std::uint32_t i = 0; i < n; ++i) {
    source.push_back({i, 0, static_cast<std::uint32_t>((i + 1) % n)});
    target.push_back({perm[i], 0, perm[(i + 1) % n]});
  }
  std::vector<IndexPair> tests;
  for (std::uint32_t i = 0; i < n; ++i) tests.push_back({i, perm[i]});
  KgPair pair = testutil::make_pair(testutil::make_graph(n, 1, source),
                                    testutil::make_graph(n, 1, target), {}, tests);

  TempDir dir;
  std::ostringstream src, tgt;
  for (std::uint32_t i = 0; i < n; ++i) {
    src << i;
    tgt << perm[i];
    for (std::uint32_t j = 0; j < n; ++j) {
      src << '\t' << (i == j ? 1.0 : 0.0);
      tgt << '\t' << (i == j ? 1.0 : 0.0);
    }
    src << '\n';
    tgt << '\n';
  }
  testutil::write_file(dir.file("src.tsv"), src.str());
  testutil::write_file(dir.file("tgt.tsv"), tgt.str());

  AlignConfig config = small_config();
  config.mode = AlignMode::Literal;
  config.topk = n;
  AlignmentResult result =
      run_literal(pair, config, dir.file("src.tsv"), dir.file("tgt.tsv"));
  CHECK(result.metrics.hits1 == 1.0);

  SUBCASE("self-training on top of literal labels stays consistent") {
    config.iterative_epochs = 2;
    AlignmentResult iterative =
        run_literal(pair, config, dir.file("src.tsv"), dir.file("tgt.tsv"));
    CHECK(iterative.metrics.hits1 == 1.0);
    std::set<std::uint32_t> sources, targets;
    for (const auto& [s, t] : iterative.pseudo_pairs) {
      CHECK(sources.insert(s).second);
      CHECK(targets.insert(t).second);
    }
  }
}

TEST_CASE("uninformative literal labels cannot single out partners") {
  const std::size_t n = 12;
  std::vector<std::uint32_t> perm = {5, 9, 0, 11, 3, 7, 1, 10, 2, 8, 6, 4};
  std::vector<Triple> source, target;
  for (std::uint32_t i = 0; i < n; ++i) {
    source.push_back({i, 0, static_cast<std::uint32_t>((i + 1) % n)});
    target.push_back({perm[i], 0, perm[(i + 1) % n]});
  }
  std::vector<IndexPair> tests;
  for (std::uint32_t i = 0; i < n; ++i) tests.push_back({i, perm[i]});
  KgPair pair = testutil::make_pair(testutil::make_graph(n, 1, source),
                                    testutil::make_graph(n, 1, target), {}, tests);

  TempDir dir;
  std::ostringstream src, tgt;
  for (std::uint32_t i = 0; i < n; ++i) {
    src << i << "\t1\t2\t3\n";
    tgt << i << "\t1\t2\t3\n";
  }
  testutil::write_file(dir.file("src.tsv"), src.str());
  testutil::write_file(dir.file("tgt.tsv"), tgt.str());

  AlignConfig config = small_config();
  config.mode = AlignMode::Literal;
  config.topk = n;
  AlignmentResult result =
      run_literal(pair, config, dir.file("src.tsv"), dir.file("tgt.tsv"));
  CHECK(result.metrics.hits1 <= 0.5);
}

TEST_CASE("the dispatcher routes modes and enforces literal paths") {
  KgPair pair = synth_pair(80, 320, 0.0, 10, 0.3);
  AlignConfig config = small_config();
  AlignmentResult direct = run_basic(pair, config);
  AlignmentResult routed = run_pipeline(pair, config);
  CHECK(pairs_equal(direct.pairs, routed.pairs));

  config.mode = AlignMode::Literal;
  CHECK_THROWS_AS(run_pipeline(pair, config), InvalidArgument);
  CHECK_THROWS_AS(run_pipeline(pair, config, "only_source.tsv"), InvalidArgument);
}

TEST_CASE("single-threaded runs repeat bit for bit") {
  KgPair pair = synth_pair(150, 600, 0.2, 11, 0.3);
  AlignConfig config = small_config();
  config.mode = AlignMode::Iterative;
  config.iterative_epochs = 3;
  AlignmentResult a = run_iterative(pair, config);
  AlignmentResult b = run_iterative(pair, config);
  REQUIRE(a.pairs.size() == b.pairs.size());
  CHECK(pairs_equal(a.pairs, b.pairs));
  CHECK(a.pseudo_pairs == b.pseudo_pairs);
  CHECK(a.metrics.hits1 == b.metrics.hits1);
  CHECK(a.metrics.mrr == b.metrics.mrr);
}

TEST_CASE("more seeds never hurt on a clean pair") {
  TempDir dir;
  SynthSpec spec;
  spec.entities = 150;
  spec.triples = 600;
  spec.noise = 0.0;
  spec.seed = 12;
  synth_dataset(spec, dir.str());

  AlignConfig config = small_config();
  config.dim = 64;
  auto hits_at_ratio = [&](double ratio) {
    SplitSpec split;
    split.ratio = ratio;
    return run_basic(load_dataset(dir.str(), split), config).metrics.hits1;
  };
  double low = hits_at_ratio(0.05);
  double mid = hits_at_ratio(0.15);
  double high = hits_at_ratio(0.3);
  CHECK(low <= mid + 1e-9);
  CHECK(mid <= high + 1e-9);
}

TEST_CASE("configuration validation pins the legal ranges") {
  AlignConfig config = small_config();
  CHECK_NOTHROW(config.validate());
  config.rounds = 0;  // legal: round-0 labels alone
  CHECK_NOTHROW(config.validate());

  AlignConfig bad = small_config();
  bad.dim = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = small_config();
  bad.topk = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = small_config();
  bad.tau = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = small_config();
  bad.tau = -0.5;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = small_config();
  bad.threads = -1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("mode names round-trip and unknown names are rejected") {
  CHECK(align_mode_from_string("basic") == AlignMode::Basic);
  CHECK(align_mode_from_string("iterative") == AlignMode::Iterative);
  CHECK(align_mode_from_string("literal") == AlignMode::Literal);
  CHECK(std::string(to_string(AlignMode::Basic)) == "basic");
  CHECK(std::string(to_string(AlignMode::Iterative)) == "iterative");
  CHECK(std::string(to_string(AlignMode::Literal)) == "literal");
  CHECK_THROWS_AS(align_mode_from_string("fancy"), InvalidArgument);
}

TEST_CASE("written results parse back with file identifiers") {
  SplitSpec split;
  split.train_file = testutil::fixture_path("toy4/sup_ent_ids");
  KgPair pair = load_dataset(testutil::fixture_path("toy4"), split);
  AlignConfig config = small_config();
  config.dim = 32;
  config.topk = 4;
  AlignmentResult result = run_basic(pair, config);

  TempDir out;
  write_result(result, out.str());

  std::ifstream pairs_in(out.file("pairs.tsv"));
  REQUIRE(pairs_in.good());
  std::string line;
  std::size_t rows = 0;
  while (std::getline(pairs_in, line)) {
    std::istringstream fields(line);
    std::string src, tgt, score;
    REQUIRE(std::getline(fields, src, '\t'));
    REQUIRE(std::getline(fields, tgt, '\t'));
    REQUIRE(std::getline(fields, score, '\t'));
    long src_id = std::stol(src), tgt_id = std::stol(tgt);
    CHECK(src_id >= 10);
    CHECK(src_id <= 13);
    CHECK(tgt_id >= 10);
    CHECK(tgt_id <= 13);
    CHECK(score.find('.') != std::string::npos);
    CHECK(score.size() - score.find('.') - 1 == 6);  // six decimals
    ++rows;
  }
  CHECK(rows == result.pairs.size());

  std::ifstream metrics_in(out.file("metrics.json"));
  REQUIRE(metrics_in.good());
  nlohmann::json doc = nlohmann::json::parse(metrics_in);
  CHECK(doc.at("hits1").is_number());
  CHECK(doc.at("hits10").is_number());
  CHECK(doc.at("mrr").is_number());
  CHECK(doc.at("seconds_total").is_number());
  CHECK(doc.at("seconds_per_stage").is_object());
  CHECK(doc.at("seconds_per_stage").contains("propagate"));
  std::string fingerprint = doc.at("dataset_fingerprint").get<std::string>();
  CHECK(fingerprint.size() == 16);
  CHECK(fingerprint.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(doc.at("config").at("dim").get<std::size_t>() == 32);
  CHECK(doc.at("config").at("mode").get<std::string>() == "basic");
  CHECK(doc.at("config").at("threads").get<int>() == 1);
}
