// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "recbench/memory_models.hpp"

using namespace recbench;

namespace {

const std::vector<std::string> kKinds = {"cosine", "jaccard", "dice", "pearson", "euclidean"};

std::vector<double> scores_of(const Recommender& m, UserIndex u) {
  std::vector<double> s(m.train().n_items());
  m.score(u, s);
  return s;
}

// Top-k neighbour weights of row r against every other non-empty row, from
// dense vectors, ties by lower index, zeros dropped.
std::vector<Neighbor> dense_topk(const Eigen::MatrixXd& rows, Eigen::Index r, const std::string& kind, std::size_t k) {
  std::vector<Neighbor> all;
  for (Eigen::Index s = 0; s < rows.rows(); ++s) {
    if (s == r || rows.row(s).sum() == 0) continue;
    const double w = oracle::dense_similarity(kind, rows.row(r).transpose(), rows.row(s).transpose());
    if (w != 0.0) all.push_back({static_cast<Index>(s), w});
  }
  std::stable_sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) { return a.weight > b.weight; });
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace

TEST_SUITE("models-memory") {

TEST_CASE("MostPop ranks by count and skips the profile") {
  // counts A:5, B:3, C:1; user 0 saw A
  const auto m = oracle::from_dense({{1, 0, 0}, {1, 1, 0}, {1, 1, 0}, {1, 1, 0}, {1, 0, 1}});
  MostPop pop;
  pop.fit(m);
  CHECK(pop.recommend(0, 2).items == std::vector<ItemIndex>{1, 2});
  CHECK(pop.popularity() == std::vector<double>{5, 3, 1});
}

TEST_CASE("MostPop equals the column-sum oracle on random 8x8 matrices") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const auto m = oracle::random_matrix(8, 8, 0.4, seed);
    const Eigen::MatrixXd x = oracle::to_dense(m);
    const Eigen::VectorXd colsum = x.colwise().sum().transpose();
    MostPop pop;
    pop.fit(m);
    for (UserIndex u = 0; u < 8; ++u) {
      std::vector<ItemIndex> expect;
      for (ItemIndex i = 0; i < 8; ++i)
        if (x(u, i) == 0) expect.push_back(i);
      std::stable_sort(expect.begin(), expect.end(), [&](ItemIndex a, ItemIndex b) { return colsum(a) > colsum(b); });
      CHECK(pop.recommend(u, 8).items == expect);
    }
  }
}

TEST_CASE("MostPop ranking does not depend on user order") {
  const auto m = oracle::random_matrix(12, 9, 0.35, 4);
  std::vector<UserIndex> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937(1));
  std::vector<std::pair<UserIndex, ItemIndex>> moved;
  for (auto [u, i] : m.pairs()) moved.emplace_back(perm[u], i);
  const auto pm = InteractionMatrix::from_pairs(12, 9, moved);
  MostPop a, b;
  a.fit(m);
  b.fit(pm);
  for (UserIndex u = 0; u < 12; ++u) CHECK(a.recommend(u, 9).items == b.recommend(perm[u], 9).items);
}

TEST_CASE("Random returns every unseen item when n exceeds them") {
  const auto m = oracle::from_dense({{1, 0, 1, 0, 0}, {0, 1, 0, 0, 0}});
  RandomRecommender r(3);
  r.fit(m);
  auto list = r.recommend(0, 10);
  std::sort(list.items.begin(), list.items.end());
  CHECK(list.items == std::vector<ItemIndex>{1, 3, 4});
  CHECK(r.recommend(1, 4).items == r.recommend(1, 4).items);
}

TEST_CASE("Random covers the catalog across users") {
  const auto m = oracle::random_matrix(300, 100, 0.05, 8);
  RandomRecommender r(8);
  r.fit(m);
  std::set<ItemIndex> seen;
  for (UserIndex u = 0; u < 300; ++u)
    for (ItemIndex i : r.recommend(u, 10).items) seen.insert(i);
  CHECK(seen.size() == 100);
}

TEST_CASE("Random draws are uniform over unseen items (chi-square)") {
  // 10^4 users x 10 slots = 10^5 draws over the 19 unseen items of a 20-item catalog
  std::vector<std::pair<UserIndex, ItemIndex>> pairs;
  for (UserIndex u = 0; u < 10000; ++u) pairs.emplace_back(u, 0);
  const auto m = InteractionMatrix::from_pairs(10000, 20, pairs);
  RandomRecommender r(99);
  r.fit(m);
  std::vector<double> counts(20, 0.0);
  for (UserIndex u = 0; u < 10000; ++u)
    for (ItemIndex i : r.recommend(u, 10).items) counts[i] += 1;
  CHECK(counts[0] == 0);
  const double expected = 1e5 / 19.0;
  double chi2 = 0.0;
  for (ItemIndex i = 1; i < 20; ++i) chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
  CHECK(chi2 < 42.31);  // 0.999 quantile, 18 degrees of freedom
}

TEST_CASE("identical and disjoint binary profiles") {
  for (auto kind : {SimilarityKind::cosine, SimilarityKind::jaccard, SimilarityKind::dice})
    CHECK(binary_similarity(kind, 4, 4, 4, 10) == doctest::Approx(1.0));
  for (auto kind : {SimilarityKind::cosine, SimilarityKind::jaccard, SimilarityKind::dice})
    CHECK(binary_similarity(kind, 0, 3, 5, 10) == 0.0);
  CHECK(binary_similarity(SimilarityKind::euclidean, 0, 3, 5, 10) == doctest::Approx(1.0 / (1.0 + std::sqrt(8.0))));
  CHECK(binary_similarity(SimilarityKind::euclidean, 4, 4, 4, 10) == 1.0);
  CHECK(parse_similarity_kind("correlation") == SimilarityKind::pearson);
  CHECK_THROWS_AS(parse_similarity_kind("manhattan"), ConfigError);
}

TEST_CASE("every similarity kind matches the dense oracle to 1e-12") {
  for (unsigned seed = 0; seed < 8; ++seed) {
    const auto m = oracle::random_connected_matrix(6, 6, 0.4, seed);
    const Eigen::MatrixXd x = oracle::to_dense(m);
    for (const auto& name : kKinds) {
      const auto kind = parse_similarity_kind(name);
      for (Axis axis : {Axis::user, Axis::item}) {
        const Eigen::MatrixXd rows = axis == Axis::user ? x : Eigen::MatrixXd(x.transpose());
        const auto sim = build_similarity(m, axis, kind, 100);
        for (Eigen::Index r = 0; r < rows.rows(); ++r) {
          // no pruning at k = 100: compare index -> weight, absent meaning 0
          std::map<Index, double> expect, got;
          for (const auto& nb : dense_topk(rows, r, name, 100)) expect[nb.index] = nb.weight;
          for (const auto& nb : sim.rows[static_cast<std::size_t>(r)]) got[nb.index] = nb.weight;
          for (Eigen::Index s = 0; s < rows.rows(); ++s) {
            const auto idx = static_cast<Index>(s);
            const double e = expect.contains(idx) ? expect[idx] : 0.0;
            const double g = got.contains(idx) ? got[idx] : 0.0;
            CHECK(std::abs(g - e) < 1e-12);
          }
          CHECK_FALSE(got.contains(static_cast<Index>(r)));
        }
      }
    }
  }
}

TEST_CASE("similarities are symmetric, bounded, and pruned to k") {
  const auto m = oracle::random_connected_matrix(14, 11, 0.3, 21);
  for (const auto& name : kKinds) {
    const auto kind = parse_similarity_kind(name);
    const auto full = build_similarity(m, Axis::item, kind, 1000);
    std::map<std::pair<Index, Index>, double> w;
    for (Index i = 0; i < full.rows.size(); ++i)
      for (const auto& nb : full.rows[i]) {
        CHECK(nb.index != i);
        CHECK(std::isfinite(nb.weight));
        w[{i, nb.index}] = nb.weight;
        if (name == "cosine" || name == "jaccard" || name == "dice") {
          CHECK(nb.weight >= 0.0);
          CHECK(nb.weight <= 1.0 + 1e-15);
        }
      }
    for (const auto& [key, value] : w) CHECK(w.at({key.second, key.first}) == doctest::Approx(value).epsilon(1e-14));

    const auto pruned = build_similarity(m, Axis::item, kind, 3);
    for (Index i = 0; i < pruned.rows.size(); ++i) {
      CHECK(pruned.rows[i].size() <= 3);
      for (std::size_t j = 0; j < pruned.rows[i].size(); ++j) {
        CHECK(pruned.rows[i][j].index == full.rows[i][j].index);
        CHECK(pruned.rows[i][j].weight == full.rows[i][j].weight);
      }
    }
  }
  CHECK_THROWS_AS(build_similarity(m, Axis::user, SimilarityKind::cosine, 0), ConfigError);
}

TEST_CASE("UserKNN and ItemKNN match a brute-force weighted sum on a 5x5 toy") {
  const auto m = oracle::from_dense({{1, 1, 0, 0, 0}, {1, 1, 1, 0, 0}, {0, 1, 1, 1, 0}, {0, 0, 1, 1, 1}, {1, 0, 0, 1, 1}});
  const Eigen::MatrixXd x = oracle::to_dense(m);
  UserKnn uk(SimilarityKind::cosine, 2);
  ItemKnn ik(SimilarityKind::cosine, 2);
  uk.fit(m);
  ik.fit(m);
  const Eigen::MatrixXd xt = x.transpose();
  for (Eigen::Index u = 0; u < 5; ++u) {
    std::vector<double> expect(5, 0.0);
    for (const auto& nb : dense_topk(x, u, "cosine", 2))
      for (Eigen::Index i = 0; i < 5; ++i) expect[static_cast<std::size_t>(i)] += nb.weight * x(nb.index, i);
    const auto got = scores_of(uk, static_cast<UserIndex>(u));
    for (std::size_t i = 0; i < 5; ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));

    std::vector<double> expect_item(5, 0.0);
    for (Eigen::Index i = 0; i < 5; ++i)
      for (const auto& nb : dense_topk(xt, i, "cosine", 2))
        if (x(u, nb.index) == 1) expect_item[static_cast<std::size_t>(i)] += nb.weight;
    const auto got_item = scores_of(ik, static_cast<UserIndex>(u));
    for (std::size_t i = 0; i < 5; ++i) CHECK(got_item[i] == doctest::Approx(expect_item[i]).epsilon(1e-12));
  }
}

TEST_CASE("a single neighbour with similarity 1 reproduces its profile") {
  const auto m = oracle::from_dense({{1, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 1}});
  UserKnn uk(SimilarityKind::cosine, 1);
  uk.fit(m);
  CHECK(scores_of(uk, 0) == std::vector<double>{1, 1, 0, 0});
}

TEST_CASE("a user without similar users gets zero scores and index order") {
  const auto m = oracle::from_dense({{1, 1, 0, 0, 0}, {0, 1, 1, 0, 0}, {1, 0, 1, 0, 0}, {0, 0, 0, 0, 1}});
  UserKnn uk(SimilarityKind::cosine, 5);
  uk.fit(m);
  for (double s : scores_of(uk, 3)) CHECK(s == 0.0);
  CHECK(uk.recommend(3, 3).items == std::vector<ItemIndex>{0, 1, 2});
}

TEST_CASE("users and items with empty rows have no neighbours") {
  const auto m = InteractionMatrix::from_pairs(4, 4, {{0, 0}, {0, 1}, {1, 1}, {2, 0}});
  for (const auto& name : kKinds) {
    const auto sim = build_similarity(m, Axis::user, parse_similarity_kind(name), 10);
    CHECK(sim.rows[3].empty());
    for (const auto& row : sim.rows)
      for (const auto& nb : row) CHECK(nb.index != 3);
  }
}

TEST_CASE("RP3beta with alpha 1, beta 0 and no pruning equals path enumeration") {
  for (unsigned seed = 0; seed < 12; ++seed) {
    const std::size_t n = seed < 4 ? 4 : 8;
    const auto m = oracle::random_connected_matrix(n, n, 0.35, seed);
    const Eigen::MatrixXd x = oracle::to_dense(m);
    for (double alpha : {1.0, 0.7}) {
      Rp3Beta rp(alpha, 0.0, Rp3Beta::kNoPruning, false);
      rp.fit(m);
      for (UserIndex u = 0; u < n; ++u) {
        const auto s = scores_of(rp, u);
        for (ItemIndex j = 0; j < n; ++j) CHECK(std::abs(s[j] - oracle::p3_path_sum(x, u, j, alpha)) < 1e-10);
      }
    }
  }
}

TEST_CASE("raising beta shrinks the most popular item's relative score") {
  // item 0 is held by every user
  const auto m = oracle::from_dense({{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}, {1, 1, 1, 0}, {1, 0, 1, 1}, {0, 1, 0, 1}});
  double previous = INFINITY;
  for (double beta : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
    Rp3Beta rp(1.0, beta, Rp3Beta::kNoPruning, false);
    rp.fit(m);
    const auto s = scores_of(rp, 5);
    const double ratio = s[0] / s[2];
    CHECK(ratio < previous);
    previous = ratio;
  }
}

TEST_CASE("RP3beta normalisation and pruning") {
  const auto m = oracle::random_connected_matrix(10, 9, 0.4, 17);
  Rp3Beta rp(1.2, 0.4, 3, true);
  rp.fit(m);
  for (ItemIndex i = 0; i < 9; ++i) {
    const auto& row = rp.weights(i);
    CHECK(row.size() <= 3);
    double l1 = 0.0;
    for (const auto& nb : row) {
      CHECK(nb.index != i);
      l1 += std::abs(nb.weight);
    }
    if (!row.empty()) CHECK(l1 == doctest::Approx(1.0));
  }
}

TEST_CASE("scores are non-increasing and ties go to the lower index") {
  const std::vector<double> s = {0.5, 0.9, 0.5, 0.1, 0.9, 0.5};
  const std::vector<ItemIndex> excluded = {1};
  const auto list = select_top_n(0, s, 4, excluded);
  CHECK(list.items == std::vector<ItemIndex>{4, 0, 2, 5});
  CHECK(std::is_sorted(list.scores.rbegin(), list.scores.rend()));
}

TEST_CASE("models refuse to score before fit") {
  MostPop pop;
  CHECK_THROWS_AS(pop.recommend(0, 3), Error);
}

}  // TEST_SUITE
