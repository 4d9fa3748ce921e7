// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "recbench/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace recbench {

RankedList select_top_n(UserIndex user, std::span<const double> scores, std::size_t n,
                        std::span<const ItemIndex> excluded) {
  std::vector<ItemIndex> candidates;
  candidates.reserve(scores.size());
  auto ex = excluded.begin();
  for (ItemIndex i = 0; i < scores.size(); ++i) {
    while (ex != excluded.end() && *ex < i) ++ex;
    if (ex != excluded.end() && *ex == i) continue;
    candidates.push_back(i);
  }
  // NaN scores sink below every real score.
  auto better = [&](ItemIndex a, ItemIndex b) {
    const double sa = std::isnan(scores[a]) ? -INFINITY : scores[a];
    const double sb = std::isnan(scores[b]) ? -INFINITY : scores[b];
    if (sa != sb) return sa > sb;
    return a < b;
  };
  const std::size_t take = std::min(n, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                    better);
  RankedList list;
  list.user = user;
  list.items.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take));
  list.scores.reserve(take);
  for (ItemIndex i : list.items) list.scores.push_back(scores[i]);
  return list;
}

void Recommender::fit(const InteractionMatrix& train) {
  train_ = train;
  fitted_ = false;
  do_fit(train_);
  fitted_ = true;
}

void Recommender::require_fitted() const {
  if (!fitted_) throw Error(name() + ": model used before fit()");
}

RankedList Recommender::recommend(UserIndex user, std::size_t n, bool exclude_train) const {
  require_fitted();
  if (user >= train_.n_users()) throw Error(name() + ": user index out of range");
  std::vector<double> scores(train_.n_items(), 0.0);
  score(user, scores);
  std::span<const ItemIndex> excluded;
  if (exclude_train) excluded = train_.items_of(user);
  return select_top_n(user, scores, n, excluded);
}

}  // namespace recbench
