// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0
//
// Test-only generators and straightforward reference implementations. None
// of this reuses library code paths beyond the containers.

#ifndef RECBENCH_TEST_ORACLES_HPP
#define RECBENCH_TEST_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "recbench/corpus.hpp"

namespace oracle {

using recbench::InteractionMatrix;
using recbench::RawDataset;

inline InteractionMatrix random_matrix(std::size_t users, std::size_t items, double density, unsigned seed) {
  std::mt19937 rng(seed);
  std::bernoulli_distribution keep(density);
  std::vector<std::pair<recbench::UserIndex, recbench::ItemIndex>> pairs;
  for (std::size_t u = 0; u < users; ++u)
    for (std::size_t i = 0; i < items; ++i)
      if (keep(rng)) pairs.emplace_back(static_cast<recbench::UserIndex>(u), static_cast<recbench::ItemIndex>(i));
  return InteractionMatrix::from_pairs(users, items, std::move(pairs));
}

// Like random_matrix, but every row and column holds at least one entry.
inline InteractionMatrix random_connected_matrix(std::size_t users, std::size_t items, double density, unsigned seed) {
  std::mt19937 rng(seed);
  std::bernoulli_distribution keep(density);
  std::vector<std::pair<recbench::UserIndex, recbench::ItemIndex>> pairs;
  for (std::size_t u = 0; u < users; ++u) {
    pairs.emplace_back(static_cast<recbench::UserIndex>(u), static_cast<recbench::ItemIndex>(u % items));
    for (std::size_t i = 0; i < items; ++i)
      if (keep(rng)) pairs.emplace_back(static_cast<recbench::UserIndex>(u), static_cast<recbench::ItemIndex>(i));
  }
  for (std::size_t i = 0; i < items; ++i)
    pairs.emplace_back(static_cast<recbench::UserIndex>(i % users), static_cast<recbench::ItemIndex>(i));
  return InteractionMatrix::from_pairs(users, items, std::move(pairs));
}

inline InteractionMatrix from_dense(const std::vector<std::vector<int>>& rows) {
  std::vector<std::pair<recbench::UserIndex, recbench::ItemIndex>> pairs;
  const std::size_t items = rows.empty() ? 0 : rows.front().size();
  for (std::size_t u = 0; u < rows.size(); ++u)
    for (std::size_t i = 0; i < items; ++i)
      if (rows[u][i]) pairs.emplace_back(static_cast<recbench::UserIndex>(u), static_cast<recbench::ItemIndex>(i));
  return InteractionMatrix::from_pairs(rows.size(), items, std::move(pairs));
}

inline Eigen::MatrixXd to_dense(const InteractionMatrix& m) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.n_users()), static_cast<Eigen::Index>(m.n_items()));
  for (auto [u, i] : m.pairs()) x(u, i) = 1.0;
  return x;
}

inline RawDataset raw_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
  RawDataset raw;
  for (const auto& [u, i] : pairs) raw.interactions.push_back({u, i, 1.0, std::nullopt});
  return raw;
}

using EdgeSet = std::set<std::pair<std::string, std::string>>;

inline EdgeSet edges(const RawDataset& raw) {
  EdgeSet out;
  for (const auto& x : raw.interactions) out.insert({x.user, x.item});
  return out;
}

// Deletes one offending user or item at a time, rescanning from scratch
// after each deletion, until every survivor has degree >= p.
inline EdgeSet pcore_by_single_deletion(EdgeSet e, int p) {
  for (;;) {
    std::map<std::string, int> du, di;
    for (const auto& [u, i] : e) ++du[u], ++di[i];
    std::string victim;
    bool is_user = false;
    for (const auto& [u, d] : du)
      if (d < p) {
        victim = u;
        is_user = true;
        break;
      }
    if (!is_user)
      for (const auto& [i, d] : di)
        if (d < p) {
          victim = i;
          break;
        }
    if (victim.empty()) return e;
    for (auto it = e.begin(); it != e.end();)
      it = ((is_user ? it->first : it->second) == victim) ? e.erase(it) : std::next(it);
  }
}

// Dense similarities computed from the 0/1 vectors directly.
inline double dense_similarity(const std::string& kind, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double dot = a.dot(b);
  const double na = a.sum(), nb = b.sum();
  if (kind == "cosine") return (na == 0 || nb == 0) ? 0.0 : dot / std::sqrt(na * nb);
  if (kind == "jaccard") {
    const double uni = (a.array().max(b.array())).sum();
    return uni == 0 ? 0.0 : dot / uni;
  }
  if (kind == "dice") return (na + nb) == 0 ? 0.0 : 2 * dot / (na + nb);
  if (kind == "pearson") {
    const Eigen::VectorXd ca = a.array() - a.mean(), cb = b.array() - b.mean();
    const double den = ca.norm() * cb.norm();
    return den == 0 ? 0.0 : ca.dot(cb) / den;
  }
  return 1.0 / (1.0 + (a - b).norm());  // euclidean
}

// P3 score of item j for user u by walking every path u -> i -> v -> j.
inline double p3_path_sum(const Eigen::MatrixXd& x, Eigen::Index u, Eigen::Index j, double alpha) {
  const Eigen::VectorXd user_deg = x.rowwise().sum();
  const Eigen::VectorXd item_deg = x.colwise().sum().transpose();
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    if (x(u, i) == 0 || i == j) continue;
    for (Eigen::Index v = 0; v < x.rows(); ++v) {
      if (x(v, i) == 0 || x(v, j) == 0) continue;
      total += std::pow(1.0 / item_deg(i), alpha) * std::pow(1.0 / user_deg(v), alpha);
    }
  }
  return total;
}

inline double log2(double x) { return std::log(x) / std::log(2.0); }

// Reference list metrics from their textbook definitions.
inline double ndcg(const std::vector<recbench::ItemIndex>& list, const std::set<recbench::ItemIndex>& truth,
                   std::size_t k) {
  double dcg = 0.0, idcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, list.size()); ++r)
    if (truth.count(list[r])) dcg += 1.0 / log2(static_cast<double>(r) + 2.0);
  for (std::size_t r = 0; r < std::min(k, truth.size()); ++r) idcg += 1.0 / log2(static_cast<double>(r) + 2.0);
  return idcg == 0 ? 0.0 : dcg / idcg;
}

inline double average_precision(const std::vector<recbench::ItemIndex>& list,
                                const std::set<recbench::ItemIndex>& truth, std::size_t k) {
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < std::min(k, list.size()); ++r)
    if (truth.count(list[r])) sum += static_cast<double>(++hits) / static_cast<double>(r + 1);
  const std::size_t denom = std::min(k, truth.size());
  return denom == 0 ? 0.0 : sum / static_cast<double>(denom);
}

}  // namespace oracle

#endif  // RECBENCH_TEST_ORACLES_HPP
