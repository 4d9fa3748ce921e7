// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef RECBENCH_MODEL_HPP
#define RECBENCH_MODEL_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "recbench/common.hpp"
#include "recbench/corpus.hpp"

namespace recbench {

// One user's top-n list. Scores are non-increasing; equal scores are
// ordered by ascending item index.
struct RankedList {
  UserIndex user = 0;
  std::vector<ItemIndex> items;
  std::vector<double> scores;
};

// Selects the top-n entries of a dense score vector. Items flagged in
// `excluded` (sorted) are skipped.
RankedList select_top_n(UserIndex user, std::span<const double> scores, std::size_t n,
                        std::span<const ItemIndex> excluded);

class Recommender {
 public:
  virtual ~Recommender() = default;

  virtual std::string name() const = 0;

  // Trains on `train`; the matrix is copied and kept for profile lookups.
  void fit(const InteractionMatrix& train);

  // Writes one score per catalog item into `out` (size n_items).
  virtual void score(UserIndex user, std::span<double> out) const = 0;

  // Pure after fit. With exclude_train the user's train items never appear.
  RankedList recommend(UserIndex user, std::size_t n, bool exclude_train = true) const;

  const InteractionMatrix& train() const { return train_; }
  bool fitted() const { return fitted_; }

 protected:
  virtual void do_fit(const InteractionMatrix& train) = 0;
  void require_fitted() const;

 private:
  InteractionMatrix train_;
  bool fitted_ = false;
};

// Builds a recommender by algorithm name ("EASE", "SLIM", "RP3beta",
// "UserKNN", "ItemKNN", "MostPop", "Random", "iALS", "BPRMF", "MF2020",
// "NeuMF", "MultiVAE"); unknown names and bad parameters raise ConfigError.
std::unique_ptr<Recommender> make_recommender(const std::string& algorithm, const ParamMap& params,
                                              std::uint64_t seed);

const std::vector<std::string>& algorithm_names();

}  // namespace recbench

#endif  // RECBENCH_MODEL_HPP
