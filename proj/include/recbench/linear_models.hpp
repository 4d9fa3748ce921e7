// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef RECBENCH_LINEAR_MODELS_HPP
#define RECBENCH_LINEAR_MODELS_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "recbench/memory_models.hpp"
#include "recbench/model.hpp"

namespace recbench {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Item-item weights B with a zero diagonal; a user's scores are the sum of
// the rows of B selected by the profile.
class ItemWeightMatrix {
 public:
  ItemWeightMatrix() = default;
  static ItemWeightMatrix dense(RowMajorMatrix b);
  static ItemWeightMatrix sparse(std::size_t n_items, std::vector<std::vector<Neighbor>> rows);

  std::size_t n_items() const { return n_items_; }
  bool is_dense() const { return dense_.size() > 0 || n_items_ == 0; }
  double at(ItemIndex row, ItemIndex col) const;
  void accumulate_row(ItemIndex row, std::span<double> out) const;
  double max_abs() const;
  std::size_t nonzeros() const;

  // "row<TAB>col<TAB>weight" lines after a "# item-weights <n>" header.
  void write_triplets(const std::string& path) const;
  static ItemWeightMatrix read_triplets(const std::string& path);

 private:
  std::size_t n_items_ = 0;
  RowMajorMatrix dense_;
  std::vector<std::vector<Neighbor>> sparse_rows_;
};

// Dense Gram matrix X^T X of the binary interaction matrix.
Eigen::MatrixXd gram_matrix(const InteractionMatrix& x);

struct EaseSolution {
  RowMajorMatrix weights;   // B
  Eigen::MatrixXd inverse;  // P = (G + l2 I)^-1
};

// Closed-form shallow autoencoder: P = (G + l2 I)^-1, B_ij = -P_ij / P_jj,
// B_jj = 0. Throws NumericError when the factorisation is not positive.
EaseSolution solve_ease(const Eigen::MatrixXd& gram, double l2);

class Ease final : public Recommender {
 public:
  explicit Ease(double l2) : l2_(l2) {}
  std::string name() const override { return "EASE"; }
  void score(UserIndex user, std::span<double> out) const override;
  const ItemWeightMatrix& weights() const { return b_; }

 protected:
  void do_fit(const InteractionMatrix& train) override;

 private:
  double l2_;
  ItemWeightMatrix b_;
};

struct SlimParams {
  double alpha = 1.0;
  double l1_ratio = 0.1;
  std::size_t top_k = 100;
  int max_sweeps = 100;
  double tolerance = 1e-4;  // relative objective change
};

struct SlimColumn {
  std::vector<Neighbor> weights;  // nonzero w_i for target column j, before top-k
  int sweeps = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // objective after each sweep, [0] = at w = 0
};

// Non-negative elastic net for one target column j:
//   min_w 1/2 ||x_j - X w||^2 + alpha*l1_ratio*m*||w||_1
//         + 1/2*alpha*(1-l1_ratio)*m*||w||^2,  w >= 0, w_j = 0
// with m the number of users (per-sample scaling of the penalties), solved
// by cyclic coordinate descent clipped at zero.
SlimColumn solve_slim_column(const InteractionMatrix& x, ItemIndex j, const SlimParams& params);

// Objective above evaluated directly for a candidate weight vector.
double slim_objective(const InteractionMatrix& x, ItemIndex j, std::span<const double> w, const SlimParams& params);

class Slim final : public Recommender {
 public:
  explicit Slim(SlimParams params) : params_(params) {}
  std::string name() const override { return "SLIM"; }
  void score(UserIndex user, std::span<double> out) const override;
  const ItemWeightMatrix& weights() const { return b_; }
  std::size_t unconverged_columns() const { return unconverged_; }

 protected:
  void do_fit(const InteractionMatrix& train) override;

 private:
  SlimParams params_;
  ItemWeightMatrix b_;
  std::size_t unconverged_ = 0;
};

}  // namespace recbench

#endif  // RECBENCH_LINEAR_MODELS_HPP
