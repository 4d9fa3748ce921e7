// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef RECBENCH_MEMORY_MODELS_HPP
#define RECBENCH_MEMORY_MODELS_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "recbench/model.hpp"

namespace recbench {

class MostPop final : public Recommender {
 public:
  std::string name() const override { return "MostPop"; }
  void score(UserIndex user, std::span<double> out) const override;
  const std::vector<double>& popularity() const { return popularity_; }

 protected:
  void do_fit(const InteractionMatrix& train) override;

 private:
  std::vector<double> popularity_;
};

// Uniform sample without replacement from the unseen items. Scores are
// i.i.d. uniforms drawn from a stream keyed by (seed, user).
class RandomRecommender final : public Recommender {
 public:
  explicit RandomRecommender(std::uint64_t seed) : seed_(seed) {}
  std::string name() const override { return "Random"; }
  void score(UserIndex user, std::span<double> out) const override;

 protected:
  void do_fit(const InteractionMatrix&) override {}

 private:
  std::uint64_t seed_;
};

enum class SimilarityKind { cosine, jaccard, dice, pearson, euclidean };

SimilarityKind parse_similarity_kind(const std::string& name);  // also accepts "correlation"
std::string to_string(SimilarityKind kind);

// Similarity of two binary vectors over a `dim`-dimensional space, from the
// overlap count and the two supports:
//   cosine    |a∩b| / sqrt(|a||b|)
//   jaccard   |a∩b| / |a∪b|
//   dice      2|a∩b| / (|a|+|b|)
//   pearson   cosine of the mean-centred vectors (zeros included)
//   euclidean 1 / (1 + ||a-b||_2)
double binary_similarity(SimilarityKind kind, std::size_t overlap, std::size_t size_a, std::size_t size_b,
                         std::size_t dim);

struct Neighbor {
  Index index;
  double weight;
};

struct SimilarityMatrix {
  SimilarityKind kind = SimilarityKind::cosine;
  std::size_t k = 0;
  std::vector<std::vector<Neighbor>> rows;  // per row, descending weight, ties by index
};

enum class Axis { user, item };

// Row-wise top-k similarities between users (Axis::user) or items. Empty
// rows have no neighbours and are never chosen as neighbours; zero weights
// are dropped.
SimilarityMatrix build_similarity(const InteractionMatrix& train, Axis axis, SimilarityKind kind, std::size_t k);

class UserKnn final : public Recommender {
 public:
  UserKnn(SimilarityKind kind, std::size_t k) : kind_(kind), k_(k) {}
  std::string name() const override { return "UserKNN"; }
  void score(UserIndex user, std::span<double> out) const override;
  const SimilarityMatrix& similarity() const { return sim_; }

 protected:
  void do_fit(const InteractionMatrix& train) override;

 private:
  SimilarityKind kind_;
  std::size_t k_;
  SimilarityMatrix sim_;
};

class ItemKnn final : public Recommender {
 public:
  ItemKnn(SimilarityKind kind, std::size_t k) : kind_(kind), k_(k) {}
  std::string name() const override { return "ItemKNN"; }
  void score(UserIndex user, std::span<double> out) const override;
  const SimilarityMatrix& similarity() const { return sim_; }

 protected:
  void do_fit(const InteractionMatrix& train) override;

 private:
  SimilarityKind kind_;
  std::size_t k_;
  SimilarityMatrix sim_;
  // by_source[j] lists (i, sim(i, j)) for every item i keeping j among its top-k.
  std::vector<std::vector<Neighbor>> by_source_;
};

// Item-item random-walk model with popularity penalisation.
class Rp3Beta final : public Recommender {
 public:
  static constexpr std::size_t kNoPruning = std::numeric_limits<std::size_t>::max();

  Rp3Beta(double alpha, double beta, std::size_t k, bool normalize)
      : alpha_(alpha), beta_(beta), k_(k), normalize_(normalize) {}
  std::string name() const override { return "RP3beta"; }
  void score(UserIndex user, std::span<double> out) const override;

  // Kept row i of the item-item weight matrix.
  const std::vector<Neighbor>& weights(ItemIndex i) const { return rows_.at(i); }

 protected:
  void do_fit(const InteractionMatrix& train) override;

 private:
  double alpha_, beta_;
  std::size_t k_;
  bool normalize_;
  std::vector<std::vector<Neighbor>> rows_;
};

// Keeps the k largest (then lowest-index) entries of a dense row, dropping
// zeros and position `skip`.
std::vector<Neighbor> top_k_row(std::span<const double> row, std::size_t k, std::size_t skip);

}  // namespace recbench

#endif  // RECBENCH_MEMORY_MODELS_HPP
