// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "recbench/memory_models.hpp"

#include <algorithm>
#include <cmath>

namespace recbench {

void MostPop::do_fit(const InteractionMatrix& train) {
  popularity_.assign(train.n_items(), 0.0);
  for (ItemIndex i = 0; i < train.n_items(); ++i) popularity_[i] = static_cast<double>(train.item_degree(i));
}

void MostPop::score(UserIndex, std::span<double> out) const {
  require_fitted();
  std::copy(popularity_.begin(), popularity_.end(), out.begin());
}

void RandomRecommender::score(UserIndex user, std::span<double> out) const {
  require_fitted();
  Rng rng = make_rng(seed_, user);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& s : out) s = unit(rng);
}

SimilarityKind parse_similarity_kind(const std::string& name) {
  if (name == "cosine") return SimilarityKind::cosine;
  if (name == "jaccard") return SimilarityKind::jaccard;
  if (name == "dice") return SimilarityKind::dice;
  if (name == "pearson" || name == "correlation") return SimilarityKind::pearson;
  if (name == "euclidean") return SimilarityKind::euclidean;
  throw ConfigError("unknown similarity '" + name + "' (cosine, jaccard, dice, pearson, euclidean)");
}

std::string to_string(SimilarityKind kind) {
  switch (kind) {
    case SimilarityKind::cosine: return "cosine";
    case SimilarityKind::jaccard: return "jaccard";
    case SimilarityKind::dice: return "dice";
    case SimilarityKind::pearson: return "pearson";
    case SimilarityKind::euclidean: return "euclidean";
  }
  return "?";
}

double binary_similarity(SimilarityKind kind, std::size_t overlap, std::size_t size_a, std::size_t size_b,
                         std::size_t dim) {
  const double c = static_cast<double>(overlap);
  const double a = static_cast<double>(size_a);
  const double b = static_cast<double>(size_b);
  switch (kind) {
    case SimilarityKind::cosine:
      return (a > 0 && b > 0) ? c / std::sqrt(a * b) : 0.0;
    case SimilarityKind::jaccard: {
      const double uni = a + b - c;
      return uni > 0 ? c / uni : 0.0;
    }
    case SimilarityKind::dice:
      return (a + b) > 0 ? 2.0 * c / (a + b) : 0.0;
    case SimilarityKind::pearson: {
      const double d = static_cast<double>(dim);
      const double var_a = a - a * a / d;
      const double var_b = b - b * b / d;
      if (var_a <= 0 || var_b <= 0) return 0.0;
      return (c - a * b / d) / std::sqrt(var_a * var_b);
    }
    case SimilarityKind::euclidean:
      return 1.0 / (1.0 + std::sqrt(std::max(0.0, a + b - 2.0 * c)));
  }
  return 0.0;
}

std::vector<Neighbor> top_k_row(std::span<const double> row, std::size_t k, std::size_t skip) {
  std::vector<Neighbor> cand;
  for (std::size_t j = 0; j < row.size(); ++j)
    if (j != skip && row[j] != 0.0) cand.push_back({static_cast<Index>(j), row[j]});
  auto better = [](const Neighbor& x, const Neighbor& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    return x.index < y.index;
  };
  if (cand.size() > k) {
    std::nth_element(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(), better);
    cand.resize(k);
  }
  std::sort(cand.begin(), cand.end(), better);
  return cand;
}

SimilarityMatrix build_similarity(const InteractionMatrix& train, Axis axis, SimilarityKind kind, std::size_t k) {
  if (k < 1) throw ConfigError("similarity neighbourhood size k must be >= 1");
  const bool by_user = axis == Axis::user;
  const std::size_t n_rows = by_user ? train.n_users() : train.n_items();
  const std::size_t dim = by_user ? train.n_items() : train.n_users();
  auto features = [&](std::size_t r) { return by_user ? train.items_of(static_cast<Index>(r)) : train.users_of(static_cast<Index>(r)); };
  auto holders = [&](Index f) { return by_user ? train.users_of(f) : train.items_of(f); };
  const bool overlap_only = kind == SimilarityKind::cosine || kind == SimilarityKind::jaccard || kind == SimilarityKind::dice;

  SimilarityMatrix sim;
  sim.kind = kind;
  sim.k = k;
  sim.rows.resize(n_rows);
  parallel_for(0, n_rows, [&](std::size_t r) {
    const auto fr = features(r);
    if (fr.empty()) return;
    std::vector<std::uint32_t> overlap(n_rows, 0);
    std::vector<double> row(n_rows, 0.0);
    for (Index f : fr)
      for (Index other : holders(f)) ++overlap[other];
    for (std::size_t s = 0; s < n_rows; ++s) {
      if (s == r) continue;
      if (overlap_only && overlap[s] == 0) continue;
      const std::size_t size_s = features(s).size();
      if (size_s == 0) continue;
      row[s] = binary_similarity(kind, overlap[s], fr.size(), size_s, dim);
    }
    sim.rows[r] = top_k_row(row, k, r);
  });
  return sim;
}

void UserKnn::do_fit(const InteractionMatrix& train) { sim_ = build_similarity(train, Axis::user, kind_, k_); }

void UserKnn::score(UserIndex user, std::span<double> out) const {
  require_fitted();
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& nb : sim_.rows[user])
    for (ItemIndex i : train().items_of(nb.index)) out[i] += nb.weight;
}

void ItemKnn::do_fit(const InteractionMatrix& train) {
  sim_ = build_similarity(train, Axis::item, kind_, k_);
  by_source_.assign(train.n_items(), {});
  for (ItemIndex i = 0; i < sim_.rows.size(); ++i)
    for (const auto& nb : sim_.rows[i]) by_source_[nb.index].push_back({i, nb.weight});
}

void ItemKnn::score(UserIndex user, std::span<double> out) const {
  require_fitted();
  std::fill(out.begin(), out.end(), 0.0);
  for (ItemIndex j : train().items_of(user))
    for (const auto& t : by_source_[j]) out[t.index] += t.weight;
}

void Rp3Beta::do_fit(const InteractionMatrix& train) {
  if (alpha_ < 0 || beta_ < 0) throw ConfigError("RP3beta requires alpha, beta >= 0");
  if (k_ < 1) throw ConfigError("RP3beta requires topK >= 1");
  const std::size_t n = train.n_items();
  std::vector<double> user_step(train.n_users(), 0.0);  // (1/|u|)^alpha
  for (UserIndex u = 0; u < train.n_users(); ++u)
    if (auto d = train.user_degree(u)) user_step[u] = std::pow(1.0 / static_cast<double>(d), alpha_);
  std::vector<double> pop_penalty(n, 0.0);  // 1 / pop^beta
  for (ItemIndex j = 0; j < n; ++j)
    if (auto d = train.item_degree(j)) pop_penalty[j] = 1.0 / std::pow(static_cast<double>(d), beta_);

  rows_.assign(n, {});
  parallel_for(0, n, [&](std::size_t i) {
    const auto deg = train.item_degree(static_cast<ItemIndex>(i));
    if (deg == 0) return;
    const double item_step = std::pow(1.0 / static_cast<double>(deg), alpha_);
    std::vector<double> row(n, 0.0);
    for (UserIndex u : train.users_of(static_cast<ItemIndex>(i))) {
      const double w = item_step * user_step[u];
      for (ItemIndex j : train.items_of(u)) row[j] += w;
    }
    for (std::size_t j = 0; j < n; ++j) row[j] *= pop_penalty[j];
    auto kept = top_k_row(row, k_, i);
    if (normalize_) {
      double l1 = 0.0;
      for (const auto& nb : kept) l1 += std::abs(nb.weight);
      if (l1 > 0)
        for (auto& nb : kept) nb.weight /= l1;
    }
    rows_[i] = std::move(kept);
  });
}

void Rp3Beta::score(UserIndex user, std::span<double> out) const {
  require_fitted();
  std::fill(out.begin(), out.end(), 0.0);
  for (ItemIndex i : train().items_of(user))
    for (const auto& nb : rows_[i]) out[nb.index] += nb.weight;
}

}  // namespace recbench
