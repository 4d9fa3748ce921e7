// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef RECBENCH_NEURAL_HPP
#define RECBENCH_NEURAL_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "recbench/model.hpp"

namespace recbench {

enum class Activation { identity, relu, tanh, sigmoid };

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
  Activation activation = Activation::identity;
  Eigen::MatrixXd weight_grad;
  Eigen::VectorXd bias_grad;
};

// Minimal feed-forward stack. Batches are column-major: one sample per column.
class DenseNet {
 public:
  DenseNet() = default;
  // dims = {in, hidden..., out}; activations has dims.size() - 1 entries.
  // Weights use Glorot-uniform init, biases start at zero.
  DenseNet(const std::vector<int>& dims, const std::vector<Activation>& activations, Rng& rng);

  // Training forward pass; caches what backward() needs.
  const Eigen::MatrixXd& forward(const Eigen::MatrixXd& input);
  // Inference without touching the caches.
  Eigen::MatrixXd predict(const Eigen::MatrixXd& input) const;
  // Accumulates parameter gradients from dL/d(output); returns dL/d(input).
  Eigen::MatrixXd backward(const Eigen::MatrixXd& grad_output);

  void zero_grad();
  void sgd_step(double learning_rate);

  // Flattening map: parameter i and its gradient live at the same position.
  std::vector<double*> parameters();
  std::vector<double*> gradients();

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  int input_dim() const;
  int output_dim() const;

 private:
  std::vector<DenseLayer> layers_;
  std::vector<Eigen::MatrixXd> inputs_;
  std::vector<Eigen::MatrixXd> outputs_;
};

// Central differences on `probe_count` randomly chosen parameters; returns
// the worst relative error |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
// `loss` must re-evaluate the objective at the current parameter values.
double gradient_check(std::span<double* const> parameters, std::span<const double> analytic,
                      const std::function<double()>& loss, std::size_t probe_count, double h,
                      std::uint64_t seed = 7);

struct NeumfParams {
  int factors = 8;
  int epochs = 10;
  double learning_rate = 0.01;
  int batch_size = 256;
  int negatives = 4;
  std::uint64_t seed = 0;
};

struct LabeledPair {
  UserIndex user;
  ItemIndex item;
  double label;
};

// GMF branch (elementwise product of embeddings) and an MLP tower
// 2f -> f -> f/2 (relu) over concatenated embeddings, fused by one linear
// unit into a logit; trained with pointwise binary cross-entropy.
class NeuMF final : public Recommender {
 public:
  explicit NeuMF(NeumfParams params) : params_(params) {}
  std::string name() const override { return "NeuMF"; }
  void score(UserIndex user, std::span<double> out) const override;

  // Allocates and randomly initialises all parameters for a catalog shape.
  void initialize(std::size_t n_users, std::size_t n_items);
  // Summed cross-entropy over the samples; fills every gradient buffer
  // (dense embedding gradients included) when `with_gradient` is set.
  double loss(std::span<const LabeledPair> samples, bool with_gradient);
  std::vector<double*> parameters();
  std::vector<double*> gradients();
  double predict_logit(UserIndex u, ItemIndex i) const;
  DenseNet& fusion() { return fusion_; }

 protected:
  void do_fit(const InteractionMatrix& train) override;

 private:
  void apply_step(double learning_rate);

  NeumfParams params_;
  Eigen::MatrixXd gmf_user_, gmf_item_, mlp_user_, mlp_item_;  // row per entity
  Eigen::MatrixXd gmf_user_grad_, gmf_item_grad_, mlp_user_grad_, mlp_item_grad_;
  std::vector<UserIndex> touched_users_;
  std::vector<ItemIndex> touched_items_;
  DenseNet tower_;
  DenseNet fusion_;
};

struct MultiVaeParams {
  int intermediate = 600;
  int latent = 200;
  int epochs = 10;
  double learning_rate = 0.001;
  int batch_size = 128;
  double anneal_cap = 0.2;  // the KL weight reached after half of training
  double dropout = 0.5;
  std::uint64_t seed = 0;
};

// Variational autoencoder with a multinomial likelihood over items.
class MultiVae final : public Recommender {
 public:
  explicit MultiVae(MultiVaeParams params) : params_(params) {}
  std::string name() const override { return "MultiVAE"; }
  void score(UserIndex user, std::span<double> out) const override;

  void initialize(std::size_t n_items);
  // Loss summed over the batch columns of `profiles` (raw binary, n_items x B):
  //   -sum_i x_i log softmax(logits)_i + beta * KL(q || N(0, I)).
  // `keep_mask` (n_items x B, entries 0 or 1/(1-p)) may be empty for no
  // dropout; `noise` (latent x B) is the reparameterisation draw. Gradients
  // are accumulated into the encoder/decoder buffers.
  double loss(const Eigen::MatrixXd& profiles, const Eigen::MatrixXd& keep_mask, const Eigen::MatrixXd& noise,
              double beta);
  std::vector<double*> parameters();
  std::vector<double*> gradients();
  void zero_grad();

  // KL(N(mu, exp(logvar)) || N(0, I)) summed over the vector.
  static double kl_divergence(const Eigen::VectorXd& mu, const Eigen::VectorXd& logvar);

  const std::vector<double>& epoch_losses() const { return epoch_losses_; }

 protected:
  void do_fit(const InteractionMatrix& train) override;

 private:
  MultiVaeParams params_;
  DenseNet encoder_;
  DenseNet decoder_;
  std::vector<double> epoch_losses_;
};

}  // namespace recbench

#endif  // RECBENCH_NEURAL_HPP
