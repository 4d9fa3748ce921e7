// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "recbench/linear_models.hpp"

using namespace recbench;

namespace {

// Projected gradient descent on the full SLIM column objective (every
// coordinate, not only co-occurring ones), step 1/L.
std::vector<double> slim_projected_gradient(const Eigen::MatrixXd& x, Eigen::Index j, double l1, double l2) {
  const Eigen::Index n = x.cols();
  const Eigen::MatrixXd g = x.transpose() * x;
  const Eigen::VectorXd b = x.transpose() * x.col(j);
  const double lipschitz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().maxCoeff() + l2;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (int it = 0; it < 200000; ++it) {
    const Eigen::VectorXd grad = g * w - b + Eigen::VectorXd::Constant(n, l1) + l2 * w;
    Eigen::VectorXd next = (w - grad / lipschitz).cwiseMax(0.0);
    next(j) = 0.0;
    const double step = (next - w).norm();
    w = next;
    if (step < 1e-15) break;
  }
  return {w.data(), w.data() + n};
}

std::vector<double> dense_column(const SlimColumn& c, std::size_t n) {
  std::vector<double> w(n, 0.0);
  for (const auto& nb : c.weights) w[nb.index] = nb.weight;
  return w;
}

}  // namespace

TEST_SUITE("models-linear") {

TEST_CASE("EASE on the 2x2 Gram example matches the closed-form inverse") {
  // users {0,1}, {0}, {1} give G = [[2,1],[1,2]]
  const auto m = oracle::from_dense({{1, 1}, {1, 0}, {0, 1}});
  const Eigen::MatrixXd g = gram_matrix(m);
  CHECK(g(0, 0) == 2);
  CHECK(g(0, 1) == 1);
  const auto sol = solve_ease(g, 1.0);
  // (G + I)^-1 = 1/8 [[3, -1], [-1, 3]]
  CHECK(sol.inverse(0, 0) == doctest::Approx(3.0 / 8));
  CHECK(sol.inverse(0, 1) == doctest::Approx(-1.0 / 8));
  CHECK(sol.weights(0, 1) == doctest::Approx(1.0 / 3));
  CHECK(sol.weights(1, 0) == doctest::Approx(1.0 / 3));
  CHECK(sol.weights(0, 0) == 0.0);
  CHECK(sol.weights(1, 1) == 0.0);
}

TEST_CASE("EASE inverse residual and zero diagonal on random data") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto m = oracle::random_connected_matrix(60, 30, 0.15, seed);
    const Eigen::MatrixXd g = gram_matrix(m);
    for (double l2 : {0.5, 10.0, 500.0}) {
      const auto sol = solve_ease(g, l2);
      Eigen::MatrixXd a = g;
      a.diagonal().array() += l2;
      const Eigen::MatrixXd residual = a * sol.inverse - Eigen::MatrixXd::Identity(30, 30);
      CHECK(residual.rowwise().lpNorm<Eigen::Infinity>().maxCoeff() < 1e-8);
      for (Eigen::Index j = 0; j < 30; ++j) CHECK(sol.weights(j, j) == 0.0);
      CHECK(sol.weights.allFinite());
    }
  }
}

TEST_CASE("a huge ridge collapses EASE weights") {
  const auto m = oracle::random_connected_matrix(40, 20, 0.2, 3);
  Ease ease(1e7);
  ease.fit(m);
  CHECK(ease.weights().max_abs() < 1e-5);
  CHECK_THROWS_AS(solve_ease(gram_matrix(m), 0.0), ConfigError);
  CHECK_THROWS_AS(solve_ease(gram_matrix(m), -1.0), ConfigError);
}

TEST_CASE("EASE scores are X B") {
  const auto m = oracle::random_connected_matrix(25, 12, 0.3, 6);
  Ease ease(5.0);
  ease.fit(m);
  const Eigen::MatrixXd x = oracle::to_dense(m);
  const auto sol = solve_ease(gram_matrix(m), 5.0);
  const Eigen::MatrixXd expect = x * sol.weights;
  for (UserIndex u = 0; u < 25; ++u) {
    std::vector<double> s(12);
    ease.score(u, s);
    for (ItemIndex i = 0; i < 12; ++i) CHECK(s[i] == doctest::Approx(expect(u, i)).epsilon(1e-12));
  }
}

TEST_CASE("SLIM puts the least-squares weight on a twin column") {
  // items 0 and 1 are identical; item 2 overlaps partly
  const auto m = oracle::from_dense({{1, 1, 0}, {1, 1, 1}, {1, 1, 0}, {0, 0, 1}, {1, 1, 1}});
  SlimParams p;
  p.alpha = 1e-7;
  p.l1_ratio = 0.5;
  p.tolerance = 1e-14;
  p.max_sweeps = 1000;
  const auto col = solve_slim_column(m, 0, p);
  const auto w = dense_column(col, 3);
  CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(w[2] == 0.0);
  CHECK(w[0] == 0.0);
}

TEST_CASE("SLIM column matches a projected-gradient oracle") {
  const auto m = oracle::from_dense(
      {{1, 1, 0, 1, 0}, {1, 0, 1, 1, 0}, {0, 1, 1, 0, 1}, {1, 1, 1, 0, 0}, {0, 0, 1, 1, 1}, {1, 0, 0, 1, 1}, {0, 1, 0, 1, 1}});
  const Eigen::MatrixXd x = oracle::to_dense(m);
  for (double alpha : {0.1, 0.01}) {
    SlimParams p;
    p.alpha = alpha;
    p.l1_ratio = 0.5;
    p.tolerance = 1e-15;
    p.max_sweeps = 10000;
    const double users = 7.0;
    for (ItemIndex j = 0; j < 5; ++j) {
      const auto col = solve_slim_column(m, j, p);
      const auto cd = dense_column(col, 5);
      const auto pg = slim_projected_gradient(x, j, alpha * 0.5 * users, alpha * 0.5 * users);
      const double f_cd = slim_objective(m, j, cd, p);
      const double f_pg = slim_objective(m, j, pg, p);
      CHECK(std::abs(f_cd - f_pg) <= 1e-8 * std::max(1.0, std::abs(f_pg)));
      for (std::size_t i = 0; i < 5; ++i) CHECK(cd[i] == doctest::Approx(pg[i]).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("SLIM objective never increases across sweeps") {
  for (unsigned seed = 0; seed < 4; ++seed) {
    const auto m = oracle::random_connected_matrix(50, 25, 0.2, seed);
    SlimParams p;
    p.alpha = 0.02;
    p.l1_ratio = 0.1;
    p.tolerance = 1e-12;
    p.max_sweeps = 60;
    for (ItemIndex j = 0; j < 25; ++j) {
      const auto col = solve_slim_column(m, j, p);
      for (std::size_t s = 1; s < col.objective_trace.size(); ++s)
        CHECK(col.objective_trace[s] <= col.objective_trace[s - 1] * (1.0 + 1e-9));
      // the running objective agrees with a direct evaluation
      CHECK(col.objective_trace.back() ==
            doctest::Approx(slim_objective(m, j, dense_column(col, 25), p)).epsilon(1e-10));
    }
  }
}

TEST_CASE("fitted SLIM weights are non-negative, zero-diagonal and pruned") {
  const auto m = oracle::random_connected_matrix(50, 20, 0.25, 11);
  SlimParams p;
  p.alpha = 0.005;
  p.l1_ratio = 0.05;
  p.top_k = 4;
  Slim slim(p);
  slim.fit(m);
  const auto& b = slim.weights();
  std::vector<int> per_column(20, 0);
  for (ItemIndex i = 0; i < 20; ++i) {
    CHECK(b.at(i, i) == 0.0);
    for (ItemIndex j = 0; j < 20; ++j) {
      CHECK(b.at(i, j) >= 0.0);
      CHECK(std::isfinite(b.at(i, j)));
      per_column[j] += b.at(i, j) != 0.0;
    }
  }
  for (int c : per_column) CHECK(c <= 4);
  CHECK(b.nonzeros() > 0);
}

TEST_CASE("SLIM parameters are validated") {
  const auto m = oracle::random_connected_matrix(5, 5, 0.5, 1);
  SlimParams p;
  p.alpha = 0;
  CHECK_THROWS_AS(solve_slim_column(m, 0, p), ConfigError);
  p.alpha = 1;
  p.l1_ratio = 0;
  CHECK_THROWS_AS(Slim(p).fit(m), ConfigError);
}

TEST_CASE("an empty profile scores zero for both linear models") {
  const auto m = InteractionMatrix::from_pairs(4, 4, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 3}, {0, 3}});
  Ease ease(1.0);
  ease.fit(m);
  SlimParams p;
  p.alpha = 0.01;
  Slim slim(p);
  slim.fit(m);
  for (Recommender* r : std::initializer_list<Recommender*>{&ease, &slim}) {
    std::vector<double> s(4, 1.0);
    r->score(3, s);
    for (double v : s) CHECK(v == 0.0);
  }
}

TEST_CASE("item weights survive a triplet round trip") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto m = oracle::random_connected_matrix(30, 10, 0.3, 2);
  SlimParams p;
  p.alpha = 0.01;
  Slim slim(p);
  slim.fit(m);
  Ease ease(3.0);
  ease.fit(m);
  for (const ItemWeightMatrix* b : {&slim.weights(), &ease.weights()}) {
    const auto path = (dir / "recbench_weights.tsv").string();
    b->write_triplets(path);
    const auto back = ItemWeightMatrix::read_triplets(path);
    REQUIRE(back.n_items() == 10);
    for (ItemIndex i = 0; i < 10; ++i)
      for (ItemIndex j = 0; j < 10; ++j) CHECK(back.at(i, j) == doctest::Approx(b->at(i, j)).epsilon(1e-12));
    std::filesystem::remove(path);
  }
}

}  // TEST_SUITE
