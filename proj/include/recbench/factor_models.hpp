// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef RECBENCH_FACTOR_MODELS_HPP
#define RECBENCH_FACTOR_MODELS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "recbench/model.hpp"

namespace recbench {

// score(u, i) = U_u . V_i (+ global + b_u + b_i when biases are enabled).
struct FactorModel {
  Eigen::MatrixXd user_factors;  // n_users x f
  Eigen::MatrixXd item_factors;  // n_items x f
  bool has_biases = false;
  double global_bias = 0.0;
  Eigen::VectorXd user_bias;
  Eigen::VectorXd item_bias;

  int factors() const { return static_cast<int>(user_factors.cols()); }
  double predict(UserIndex u, ItemIndex i) const;
  void score_all(UserIndex u, std::span<double> out) const;
  bool all_finite() const;

  // Text format: "factors <f> <n_users> <n_items> <biases 0|1>" header, one
  // row per user then per item, then the bias block when present.
  void write(const std::string& path) const;
  static FactorModel read(const std::string& path);
};

// Zero-mean Gaussian init with std 0.01; biases start at zero.
FactorModel init_factor_model(std::size_t n_users, std::size_t n_items, int factors, bool biases, Rng& rng);

enum class ConfidenceScaling { linear, log };

struct IalsParams {
  int factors = 10;
  int epochs = 10;
  double alpha = 1.0;
  ConfidenceScaling scaling = ConfidenceScaling::linear;
  double epsilon = 1.0;
  double reg = 0.01;
  std::uint64_t seed = 0;
  bool track_objective = false;
};

// c = 1 + alpha*r (linear) or 1 + alpha*log(1 + r/epsilon) (log).
double ials_confidence(const IalsParams& p, double r = 1.0);

// Exact ridge solve for one row against the fixed opposite factors:
// (Y^T Y + (c-1) sum_{i in obs} y_i y_i^T + reg I) x = c sum_{i in obs} y_i.
Eigen::VectorXd ials_solve_row(const Eigen::MatrixXd& opposite, const Eigen::MatrixXd& opposite_gram,
                               std::span<const Index> observed, double confidence, double reg);

// sum_{u,i} c_ui (p_ui - U_u.V_i)^2 + reg (||U||^2 + ||V||^2), computed with
// the Gram trick in O((m + n) f^2 + nnz f).
double ials_objective(const InteractionMatrix& train, const FactorModel& m, double confidence, double reg);

class Ials final : public Recommender {
 public:
  explicit Ials(IalsParams params) : params_(params) {}
  std::string name() const override { return "iALS"; }
  void score(UserIndex user, std::span<double> out) const override;
  const FactorModel& factors() const { return model_; }
  // Objective before training and after every full user+item sweep (when tracked).
  const std::vector<double>& objective_trace() const { return trace_; }

  // One half-sweep: re-solves every user row (users = true) or item row.
  static void solve_side(const InteractionMatrix& train, FactorModel& m, bool users, double confidence,
                         double reg);

 protected:
  void do_fit(const InteractionMatrix& train) override;

 private:
  IalsParams params_;
  FactorModel model_;
  std::vector<double> trace_;
};

struct BprParams {
  int factors = 10;
  int epochs = 10;
  double learning_rate = 0.05;
  int batch_size = 256;
  double reg_user = 0.0025;
  double reg_positive = 0.0025;
  double reg_negative = 0.00025;
  std::uint64_t seed = 0;
};

struct BprTripleGradient {
  double loss = 0.0;
  Eigen::VectorXd user, positive, negative;
};

// loss = -ln sigma(u.(v_pos - v_neg)) + reg_user/2 ||u||^2
//        + reg_positive/2 ||v_pos||^2 + reg_negative/2 ||v_neg||^2
BprTripleGradient bpr_triple_gradient(const Eigen::VectorXd& user, const Eigen::VectorXd& positive,
                                      const Eigen::VectorXd& negative, const BprParams& p);

class Bprmf final : public Recommender {
 public:
  explicit Bprmf(BprParams params) : params_(params) {}
  std::string name() const override { return "BPRMF"; }
  void score(UserIndex user, std::span<double> out) const override;
  const FactorModel& factors() const { return model_; }
  // Replaces the random initialisation (used by tests before fit()).
  void set_initial_factors(FactorModel m) { initial_ = std::move(m); }

 protected:
  void do_fit(const InteractionMatrix& train) override;

 private:
  BprParams params_;
  FactorModel model_;
  std::optional<FactorModel> initial_;
};

struct Mf2020Params {
  int factors = 16;
  int epochs = 10;
  double learning_rate = 0.01;
  double reg = 0.001;
  int negatives = 4;
  std::uint64_t seed = 0;
};

struct PointwiseGradient {
  double loss = 0.0;
  Eigen::VectorXd user, item;
  double user_bias = 0.0, item_bias = 0.0, global_bias = 0.0;
};

// Logistic loss on x = b + b_u + b_i + U_u.V_i with label y, plus
// reg * (||U_u||^2 + ||V_i||^2 + b_u^2 + b_i^2).
PointwiseGradient mf2020_sample_gradient(const Eigen::VectorXd& user, const Eigen::VectorXd& item, double user_bias,
                                         double item_bias, double global_bias, double label, double reg);

class Mf2020 final : public Recommender {
 public:
  explicit Mf2020(Mf2020Params params) : params_(params) {}
  std::string name() const override { return "MF2020"; }
  void score(UserIndex user, std::span<double> out) const override;
  const FactorModel& factors() const { return model_; }

 protected:
  void do_fit(const InteractionMatrix& train) override;

 private:
  Mf2020Params params_;
  FactorModel model_;
};

// Uniform draw from the items not in `profile` (sorted). Returns false when
// the profile covers the catalog.
bool sample_unseen_item(std::span<const ItemIndex> profile, std::size_t n_items, Rng& rng, ItemIndex& out);

double sigmoid(double x);
// log(sigmoid(x)) without overflow.
double log_sigmoid(double x);

}  // namespace recbench

#endif  // RECBENCH_FACTOR_MODELS_HPP
