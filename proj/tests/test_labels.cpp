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

#include <doctest.h>

#include <cmath>
#include <cstring>

#include "test_util.hpp"

using namespace lightalign;
using testutil::TempDir;
using testutil::make_graph;
using testutil::make_pair;
using testutil::write_file;

namespace {

KgPair small_pair() {
  KnowledgeGraph src = make_graph(4, 1, {{0, 0, 1}, {1, 0, 2}, {2, 0, 3}});
  KnowledgeGraph tgt = make_graph(5, 2, {{0, 0, 1}, {1, 1, 2}, {3, 0, 4}});
  return make_pair(std::move(src), std::move(tgt), {{0, 1}, {2, 3}}, {{1, 0}});
}

double dot(const Real* a, const Real* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += a[j] * b[j];
  return s;
}

}  // namespace

TEST_CASE("one-hot labels light exactly one column per seed member") {
  KgPair pair = small_pair();
  InitialLabels labels = init_onehot(pair);
  CHECK(labels.dim() == 2);
  CHECK(labels.source_entity.rows == 4);
  CHECK(labels.target_entity.rows == 5);
  CHECK(labels.source_relation.rows == 1);
  CHECK(labels.target_relation.rows == 2);

  CHECK(labels.source_entity.at(0, 0) == 1.0);
  CHECK(labels.source_entity.at(2, 1) == 1.0);
  CHECK(labels.target_entity.at(1, 0) == 1.0);
  CHECK(labels.target_entity.at(3, 1) == 1.0);

  // Seed rows are orthonormal; everything else, including relations, is zero.
  double total = 0.0;
  for (Real v : labels.source_entity.data) total += v;
  for (Real v : labels.target_entity.data) total += v;
  CHECK(total == 4.0);
  for (Real v : labels.source_relation.data) CHECK(v == 0.0);
  for (Real v : labels.target_relation.data) CHECK(v == 0.0);

  const Matrix& src = labels.source_entity;
  CHECK(dot(src.row(0), src.row(2), src.cols) == 0.0);
  CHECK(dot(src.row(0), src.row(0), src.cols) == 1.0);
}

TEST_CASE("one-hot labels require seeds and valid indices") {
  KgPair pair = small_pair();
  pair.seed_pairs.clear();
  CHECK_THROWS_AS(init_onehot(pair), InvalidArgument);
  pair.seed_pairs = {{9, 0}};
  CHECK_THROWS_AS(init_onehot(pair), InvalidArgument);
}

TEST_CASE("random labels are shared unit vectors on seed rows only") {
  KgPair pair = small_pair();
  const std::size_t dim = 64;
  InitialLabels labels = init_random_orthogonal(pair, dim, 7);

  for (const IndexPair& p : pair.seed_pairs) {
    CHECK(labels.source_entity.row_norm(p.first) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::memcmp(labels.source_entity.row(p.first),
                      labels.target_entity.row(p.second), dim * sizeof(Real)) == 0);
  }
  CHECK(labels.source_entity.row_norm(1) == 0.0);
  CHECK(labels.source_entity.row_norm(3) == 0.0);
  CHECK(labels.target_entity.row_norm(0) == 0.0);
  for (Real v : labels.source_relation.data) CHECK(v == 0.0);

  InitialLabels again = init_random_orthogonal(pair, dim, 7);
  CHECK(labels.source_entity.data == again.source_entity.data);
  InitialLabels other = init_random_orthogonal(pair, dim, 8);
  CHECK(labels.source_entity.data != other.source_entity.data);
}

TEST_CASE("random label directions are nearly orthogonal in high dimension") {
  const std::size_t n = 20, dim = 4096;
  KnowledgeGraph src = make_graph(n, 1, {{0, 0, 1}});
  KnowledgeGraph tgt = make_graph(n, 1, {{0, 0, 1}});
  std::vector<IndexPair> seeds;
  for (std::uint32_t i = 0; i < n; ++i) seeds.emplace_back(i, i);
  KgPair pair = make_pair(std::move(src), std::move(tgt), seeds, {});

  InitialLabels labels = init_random_orthogonal(pair, dim, 3);
  double worst = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      worst = std::max(worst, std::abs(dot(labels.source_entity.row(a),
                                           labels.source_entity.row(b), dim)));
  CHECK(worst < 0.1);
}

TEST_CASE("growing the pair list keeps earlier rows bit-identical") {
  KgPair pair = small_pair();
  std::vector<IndexPair> two{{0, 1}, {2, 3}};
  std::vector<IndexPair> three{{0, 1}, {2, 3}, {1, 0}};
  InitialLabels a = random_labels_for_pairs(pair, two, 32, 11);
  InitialLabels b = random_labels_for_pairs(pair, three, 32, 11);
  CHECK(std::memcmp(a.source_entity.row(0), b.source_entity.row(0),
                    32 * sizeof(Real)) == 0);
  CHECK(std::memcmp(a.source_entity.row(2), b.source_entity.row(2),
                    32 * sizeof(Real)) == 0);
  CHECK(b.source_entity.row_norm(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random labels reject bad arguments") {
  KgPair pair = small_pair();
  CHECK_THROWS_AS(init_random_orthogonal(pair, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(random_labels_for_pairs(pair, {}, 16, 1), InvalidArgument);
  CHECK_THROWS_AS(random_labels_for_pairs(pair, {{0, 99}}, 16, 1), InvalidArgument);
}

TEST_CASE("set_pair_label matches the batch construction") {
  KgPair pair = small_pair();
  InitialLabels batch = init_random_orthogonal(pair, 48, 21);

  Matrix src(pair.source.entity_count, 48), tgt(pair.target.entity_count, 48);
  for (std::size_t x = 0; x < pair.seed_pairs.size(); ++x)
    set_pair_label(src, tgt, pair.seed_pairs[x], x, 21);
  CHECK(src.data == batch.source_entity.data);
  CHECK(tgt.data == batch.target_entity.data);

  CHECK_THROWS_AS(set_pair_label(src, tgt, {99, 0}, 0, 21), InvalidArgument);
}

TEST_CASE("literal labels come from files, normalized per row") {
  KgPair pair = small_pair();
  TempDir dir;
  // Source entities have file IDs 0..3, target 0..4.
  write_file(dir.file("src.tsv"),
             "0\t0.0\t0.0\t3.0\n"
             "1\t1.0\t1.0\t1.0\n"
             "2\t-2.0\t0.0\t0.0\n"
             "3\t0.5\t0.5\t0.0\n");
  write_file(dir.file("tgt.tsv"),
             "0\t0.0\t0.0\t3.0\n"
             "1\t9.0\t9.0\t9.0\n"
             "2\t0.0\t1.0\t0.0\n"
             "3\t1.0\t0.0\t0.0\n"
             "4\t0.0\t0.0\t-1.0\n");
  InitialLabels labels = init_literal(pair, dir.file("src.tsv"), dir.file("tgt.tsv"));

  CHECK(labels.dim() == 3);
  CHECK(labels.source_entity.at(0, 2) == doctest::Approx(1.0));
  CHECK(labels.source_entity.at(0, 0) == 0.0);
  CHECK(labels.source_entity.at(2, 0) == doctest::Approx(-1.0));
  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(labels.source_entity.at(1, j) == doctest::Approx(inv_sqrt3));
    // Same direction, different magnitude: identical after normalization.
    CHECK(labels.target_entity.at(1, j) == doctest::Approx(inv_sqrt3));
  }
  for (std::size_t i = 0; i < labels.source_entity.rows; ++i)
    CHECK(labels.source_entity.row_norm(i) == doctest::Approx(1.0).epsilon(1e-12));
  for (Real v : labels.source_relation.data) CHECK(v == 0.0);
  CHECK(labels.source_relation.rows == pair.source.relation_count);
}

TEST_CASE("literal labels reject broken embedding files") {
  KgPair pair = small_pair();
  TempDir dir;
  const std::string tgt =
      "0\t1.0\n1\t1.0\n2\t1.0\n3\t1.0\n4\t1.0\n";
  write_file(dir.file("tgt.tsv"), tgt);

  auto expect_data_error = [&](const std::string& src_content) {
    write_file(dir.file("src.tsv"), src_content);
    CHECK_THROWS_AS(init_literal(pair, dir.file("src.tsv"), dir.file("tgt.tsv")),
                    DataError);
  };

  SUBCASE("missing file") {
    CHECK_THROWS_AS(init_literal(pair, dir.file("absent.tsv"), dir.file("tgt.tsv")),
                    DataError);
  }
  SUBCASE("missing entity") { expect_data_error("0\t1.0\n1\t1.0\n2\t1.0\n"); }
  SUBCASE("unknown entity ID") {
    expect_data_error("0\t1.0\n1\t1.0\n2\t1.0\n3\t1.0\n77\t1.0\n");
  }
  SUBCASE("duplicate entity ID") {
    expect_data_error("0\t1.0\n1\t1.0\n2\t1.0\n3\t1.0\n3\t2.0\n");
  }
  SUBCASE("dimension mismatch inside one file") {
    expect_data_error("0\t1.0\t2.0\n1\t1.0\n2\t1.0\n3\t1.0\n");
  }
  SUBCASE("non-numeric value") { expect_data_error("0\tabc\n1\t1.0\n2\t1.0\n3\t1.0\n"); }
  SUBCASE("non-finite value") { expect_data_error("0\tnan\n1\t1.0\n2\t1.0\n3\t1.0\n"); }
  SUBCASE("dimension mismatch between files") {
    write_file(dir.file("src.tsv"), "0\t1.0\t2.0\n1\t1.0\t0.0\n2\t1.0\t0.0\n3\t1.0\t0.0\n");
    CHECK_THROWS_AS(init_literal(pair, dir.file("src.tsv"), dir.file("tgt.tsv")),
                    DataError);
  }
}
