// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "recbench/neural.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "recbench/factor_models.hpp"

namespace recbench {

namespace {

void activate(Activation a, Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::identity: break;
    case Activation::relu: z = z.cwiseMax(0.0); break;
    case Activation::tanh: z = z.array().tanh().matrix(); break;
    case Activation::sigmoid: z = z.unaryExpr([](double v) { return sigmoid(v); }); break;
  }
}

// Derivative of the activation expressed through its output.
Eigen::MatrixXd activation_slope(Activation a, const Eigen::MatrixXd& out) {
  switch (a) {
    case Activation::identity: return Eigen::MatrixXd::Ones(out.rows(), out.cols());
    case Activation::relu: return (out.array() > 0.0).cast<double>().matrix();
    case Activation::tanh: return (1.0 - out.array().square()).matrix();
    case Activation::sigmoid: return (out.array() * (1.0 - out.array())).matrix();
  }
  return {};
}

void append_pointers(Eigen::MatrixXd& m, std::vector<double*>& out) {
  for (Eigen::Index k = 0; k < m.size(); ++k) out.push_back(m.data() + k);
}

void append_pointers(Eigen::VectorXd& v, std::vector<double*>& out) {
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v.data() + k);
}

}  // namespace

DenseNet::DenseNet(const std::vector<int>& dims, const std::vector<Activation>& activations, Rng& rng) {
  if (dims.size() < 2 || activations.size() + 1 != dims.size())
    throw ConfigError("DenseNet needs n+1 dimensions for n activations");
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l] < 1 || dims[l + 1] < 1) throw ConfigError("DenseNet layer dimensions must be positive");
    DenseLayer layer;
    const double bound = std::sqrt(6.0 / (dims[l] + dims[l + 1]));
    std::uniform_real_distribution<double> init(-bound, bound);
    layer.weight.resize(dims[l + 1], dims[l]);
    for (Eigen::Index k = 0; k < layer.weight.size(); ++k) layer.weight.data()[k] = init(rng);
    layer.bias = Eigen::VectorXd::Zero(dims[l + 1]);
    layer.activation = activations[l];
    layer.weight_grad = Eigen::MatrixXd::Zero(dims[l + 1], dims[l]);
    layer.bias_grad = Eigen::VectorXd::Zero(dims[l + 1]);
    layers_.push_back(std::move(layer));
  }
}

int DenseNet::input_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols()); }
int DenseNet::output_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows()); }

const Eigen::MatrixXd& DenseNet::forward(const Eigen::MatrixXd& input) {
  inputs_.resize(layers_.size());
  outputs_.resize(layers_.size());
  const Eigen::MatrixXd* x = &input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    inputs_[l] = *x;
    outputs_[l].noalias() = layers_[l].weight * *x;
    outputs_[l].colwise() += layers_[l].bias;
    activate(layers_[l].activation, outputs_[l]);
    x = &outputs_[l];
  }
  return outputs_.back();
}

Eigen::MatrixXd DenseNet::predict(const Eigen::MatrixXd& input) const {
  Eigen::MatrixXd x = input;
  for (const auto& layer : layers_) {
    Eigen::MatrixXd z = layer.weight * x;
    z.colwise() += layer.bias;
    activate(layer.activation, z);
    x = std::move(z);
  }
  return x;
}

Eigen::MatrixXd DenseNet::backward(const Eigen::MatrixXd& grad_output) {
  if (inputs_.size() != layers_.size()) throw Error("DenseNet::backward called before forward");
  Eigen::MatrixXd grad = grad_output;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    auto& layer = layers_[l];
    const Eigen::MatrixXd delta = grad.cwiseProduct(activation_slope(layer.activation, outputs_[l]));
    layer.weight_grad.noalias() += delta * inputs_[l].transpose();
    layer.bias_grad += delta.rowwise().sum();
    grad.noalias() = layer.weight.transpose() * delta;
  }
  return grad;
}

void DenseNet::zero_grad() {
  for (auto& layer : layers_) {
    layer.weight_grad.setZero();
    layer.bias_grad.setZero();
  }
}

void DenseNet::sgd_step(double learning_rate) {
  for (auto& layer : layers_) {
    layer.weight -= learning_rate * layer.weight_grad;
    layer.bias -= learning_rate * layer.bias_grad;
  }
}

std::vector<double*> DenseNet::parameters() {
  std::vector<double*> out;
  for (auto& layer : layers_) {
    append_pointers(layer.weight, out);
    append_pointers(layer.bias, out);
  }
  return out;
}

std::vector<double*> DenseNet::gradients() {
  std::vector<double*> out;
  for (auto& layer : layers_) {
    append_pointers(layer.weight_grad, out);
    append_pointers(layer.bias_grad, out);
  }
  return out;
}

double gradient_check(std::span<double* const> parameters, std::span<const double> analytic,
                      const std::function<double()>& loss, std::size_t probe_count, double h, std::uint64_t seed) {
  if (!(h > 0)) throw ConfigError("gradient_check requires h > 0");
  if (parameters.size() != analytic.size()) throw Error("gradient_check: parameter/gradient size mismatch");
  std::vector<std::size_t> order(parameters.size());
  std::iota(order.begin(), order.end(), 0);
  if (probe_count < order.size()) {
    Rng rng = make_rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(probe_count);
  }
  double worst = 0.0;
  for (std::size_t k : order) {
    double* p = parameters[k];
    const double saved = *p;
    *p = saved + h;
    const double up = loss();
    *p = saved - h;
    const double down = loss();
    *p = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic[k];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  }
  return worst;
}

// NeuMF ---------------------------------------------------------------------

void NeuMF::initialize(std::size_t n_users, std::size_t n_items) {
  const int f = params_.factors;
  if (f < 2) throw ConfigError("NeuMF requires at least 2 factors");
  Rng rng = make_rng(params_.seed);
  std::normal_distribution<double> init(0.0, 0.01);
  auto embed = [&](Eigen::MatrixXd& m, std::size_t rows) {
    m.resize(static_cast<Eigen::Index>(rows), f);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = init(rng);
  };
  embed(gmf_user_, n_users);
  embed(gmf_item_, n_items);
  embed(mlp_user_, n_users);
  embed(mlp_item_, n_items);
  gmf_user_grad_ = Eigen::MatrixXd::Zero(gmf_user_.rows(), f);
  gmf_item_grad_ = Eigen::MatrixXd::Zero(gmf_item_.rows(), f);
  mlp_user_grad_ = Eigen::MatrixXd::Zero(mlp_user_.rows(), f);
  mlp_item_grad_ = Eigen::MatrixXd::Zero(mlp_item_.rows(), f);
  touched_users_.clear();
  touched_items_.clear();
  tower_ = DenseNet({2 * f, f, f / 2}, {Activation::relu, Activation::relu}, rng);
  fusion_ = DenseNet({f + f / 2, 1}, {Activation::identity}, rng);
}

double NeuMF::loss(std::span<const LabeledPair> samples, bool with_gradient) {
  const int f = params_.factors;
  const auto b = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd gmf(f, b), mlp_in(2 * f, b);
  for (Eigen::Index c = 0; c < b; ++c) {
    const auto& s = samples[static_cast<std::size_t>(c)];
    gmf.col(c) = gmf_user_.row(s.user).cwiseProduct(gmf_item_.row(s.item)).transpose();
    mlp_in.col(c).head(f) = mlp_user_.row(s.user).transpose();
    mlp_in.col(c).tail(f) = mlp_item_.row(s.item).transpose();
  }
  const Eigen::MatrixXd tower_out = tower_.forward(mlp_in);
  Eigen::MatrixXd fused(f + f / 2, b);
  fused.topRows(f) = gmf;
  fused.bottomRows(f / 2) = tower_out;
  const Eigen::MatrixXd logits = fusion_.forward(fused);

  double total = 0.0;
  Eigen::MatrixXd dlogits(1, b);
  for (Eigen::Index c = 0; c < b; ++c) {
    const double x = logits(0, c);
    const double y = samples[static_cast<std::size_t>(c)].label;
    total -= y * log_sigmoid(x) + (1.0 - y) * log_sigmoid(-x);
    dlogits(0, c) = sigmoid(x) - y;
  }
  if (!with_gradient) return total;

  for (UserIndex u : touched_users_) {
    gmf_user_grad_.row(u).setZero();
    mlp_user_grad_.row(u).setZero();
  }
  for (ItemIndex i : touched_items_) {
    gmf_item_grad_.row(i).setZero();
    mlp_item_grad_.row(i).setZero();
  }
  touched_users_.clear();
  touched_items_.clear();
  tower_.zero_grad();
  fusion_.zero_grad();

  const Eigen::MatrixXd dfused = fusion_.backward(dlogits);
  const Eigen::MatrixXd dmlp = tower_.backward(dfused.bottomRows(f / 2));
  for (Eigen::Index c = 0; c < b; ++c) {
    const auto& s = samples[static_cast<std::size_t>(c)];
    const Eigen::VectorXd dg = dfused.col(c).head(f);
    gmf_user_grad_.row(s.user) += dg.cwiseProduct(gmf_item_.row(s.item).transpose()).transpose();
    gmf_item_grad_.row(s.item) += dg.cwiseProduct(gmf_user_.row(s.user).transpose()).transpose();
    mlp_user_grad_.row(s.user) += dmlp.col(c).head(f).transpose();
    mlp_item_grad_.row(s.item) += dmlp.col(c).tail(f).transpose();
    touched_users_.push_back(s.user);
    touched_items_.push_back(s.item);
  }
  std::sort(touched_users_.begin(), touched_users_.end());
  touched_users_.erase(std::unique(touched_users_.begin(), touched_users_.end()), touched_users_.end());
  std::sort(touched_items_.begin(), touched_items_.end());
  touched_items_.erase(std::unique(touched_items_.begin(), touched_items_.end()), touched_items_.end());
  return total;
}

void NeuMF::apply_step(double learning_rate) {
  tower_.sgd_step(learning_rate);
  fusion_.sgd_step(learning_rate);
  for (UserIndex u : touched_users_) {
    gmf_user_.row(u) -= learning_rate * gmf_user_grad_.row(u);
    mlp_user_.row(u) -= learning_rate * mlp_user_grad_.row(u);
  }
  for (ItemIndex i : touched_items_) {
    gmf_item_.row(i) -= learning_rate * gmf_item_grad_.row(i);
    mlp_item_.row(i) -= learning_rate * mlp_item_grad_.row(i);
  }
}

std::vector<double*> NeuMF::parameters() {
  std::vector<double*> out;
  append_pointers(gmf_user_, out);
  append_pointers(gmf_item_, out);
  append_pointers(mlp_user_, out);
  append_pointers(mlp_item_, out);
  for (double* p : tower_.parameters()) out.push_back(p);
  for (double* p : fusion_.parameters()) out.push_back(p);
  return out;
}

std::vector<double*> NeuMF::gradients() {
  std::vector<double*> out;
  append_pointers(gmf_user_grad_, out);
  append_pointers(gmf_item_grad_, out);
  append_pointers(mlp_user_grad_, out);
  append_pointers(mlp_item_grad_, out);
  for (double* p : tower_.gradients()) out.push_back(p);
  for (double* p : fusion_.gradients()) out.push_back(p);
  return out;
}

double NeuMF::predict_logit(UserIndex u, ItemIndex i) const {
  const int f = params_.factors;
  Eigen::MatrixXd mlp_in(2 * f, 1);
  mlp_in.col(0).head(f) = mlp_user_.row(u).transpose();
  mlp_in.col(0).tail(f) = mlp_item_.row(i).transpose();
  Eigen::MatrixXd fused(f + f / 2, 1);
  fused.col(0).head(f) = gmf_user_.row(u).cwiseProduct(gmf_item_.row(i)).transpose();
  fused.bottomRows(f / 2) = tower_.predict(mlp_in);
  return fusion_.predict(fused)(0, 0);
}

void NeuMF::do_fit(const InteractionMatrix& train) {
  if (params_.epochs < 1 || params_.batch_size < 1 || params_.negatives < 0 || params_.learning_rate < 0)
    throw ConfigError("NeuMF requires epochs >= 1, batch_size >= 1, negatives >= 0, learning_rate >= 0");
  initialize(train.n_users(), train.n_items());
  Rng rng = make_rng(params_.seed, 1);
  const auto positives = train.pairs();
  std::vector<LabeledPair> samples;
  samples.reserve(positives.size() * static_cast<std::size_t>(1 + params_.negatives));
  for (int epoch = 0; epoch < params_.epochs; ++epoch) {
    samples.clear();
    for (const auto& [u, i] : positives) {
      samples.push_back({u, i, 1.0});
      for (int k = 0; k < params_.negatives; ++k) {
        ItemIndex j = 0;
        if (sample_unseen_item(train.items_of(u), train.n_items(), rng, j)) samples.push_back({u, j, 0.0});
      }
    }
    std::shuffle(samples.begin(), samples.end(), rng);
    const auto bs = static_cast<std::size_t>(params_.batch_size);
    for (std::size_t start = 0; start < samples.size(); start += bs) {
      const std::size_t n = std::min(bs, samples.size() - start);
      loss(std::span<const LabeledPair>(samples.data() + start, n), true);
      apply_step(params_.learning_rate);
    }
  }
}

void NeuMF::score(UserIndex user, std::span<double> out) const {
  require_fitted();
  const int f = params_.factors;
  const auto n = static_cast<Eigen::Index>(out.size());
  Eigen::MatrixXd mlp_in(2 * f, n);
  mlp_in.topRows(f) = mlp_user_.row(user).transpose().replicate(1, n);
  mlp_in.bottomRows(f) = mlp_item_.transpose();
  Eigen::MatrixXd fused(f + f / 2, n);
  fused.topRows(f) = (gmf_item_.transpose().array().colwise() * gmf_user_.row(user).transpose().array()).matrix();
  fused.bottomRows(f / 2) = tower_.predict(mlp_in);
  const Eigen::MatrixXd logits = fusion_.predict(fused);
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = logits(0, i);
}

// MultiVAE ------------------------------------------------------------------

void MultiVae::initialize(std::size_t n_items) {
  if (params_.intermediate < 1 || params_.latent < 1) throw ConfigError("MultiVAE dimensions must be positive");
  if (params_.dropout < 0 || params_.dropout >= 1) throw ConfigError("MultiVAE dropout must lie in [0, 1)");
  Rng rng = make_rng(params_.seed);
  const int n = static_cast<int>(n_items);
  encoder_ = DenseNet({n, params_.intermediate, 2 * params_.latent}, {Activation::tanh, Activation::identity}, rng);
  decoder_ = DenseNet({params_.latent, params_.intermediate, n}, {Activation::tanh, Activation::identity}, rng);
}

double MultiVae::kl_divergence(const Eigen::VectorXd& mu, const Eigen::VectorXd& logvar) {
  return 0.5 * (-logvar.array() + logvar.array().exp() + mu.array().square() - 1.0).sum();
}

namespace {

Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out = x;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double norm = out.col(c).norm();
    if (norm > 0) out.col(c) /= norm;
  }
  return out;
}

}  // namespace

double MultiVae::loss(const Eigen::MatrixXd& profiles, const Eigen::MatrixXd& keep_mask, const Eigen::MatrixXd& noise,
                      double beta) {
  const Eigen::Index latent = params_.latent;
  Eigen::MatrixXd input = normalize_columns(profiles);
  if (keep_mask.size() > 0) input = input.cwiseProduct(keep_mask);

  const Eigen::MatrixXd encoded = encoder_.forward(input);
  const Eigen::MatrixXd mu = encoded.topRows(latent);
  const Eigen::MatrixXd logvar = encoded.bottomRows(latent);
  const Eigen::MatrixXd stddev = (0.5 * logvar.array()).exp().matrix();
  const Eigen::MatrixXd z = mu + noise.cwiseProduct(stddev);
  const Eigen::MatrixXd logits = decoder_.forward(z);

  double total = 0.0;
  Eigen::MatrixXd dlogits(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double peak = logits.col(c).maxCoeff();
    const Eigen::ArrayXd shifted = logits.col(c).array() - peak;
    const double log_norm = std::log(shifted.exp().sum());
    const Eigen::ArrayXd log_softmax = shifted - log_norm;
    const double mass = profiles.col(c).sum();
    total -= (profiles.col(c).array() * log_softmax).sum();
    total += beta * kl_divergence(mu.col(c), logvar.col(c));
    dlogits.col(c) = (log_softmax.exp() * mass - profiles.col(c).array()).matrix();
  }

  const Eigen::MatrixXd dz = decoder_.backward(dlogits);
  Eigen::MatrixXd dencoded(2 * latent, logits.cols());
  dencoded.topRows(latent) = dz + beta * mu;
  dencoded.bottomRows(latent) =
      (dz.array() * noise.array() * 0.5 * stddev.array() + beta * 0.5 * (logvar.array().exp() - 1.0)).matrix();
  encoder_.backward(dencoded);
  return total;
}

void MultiVae::zero_grad() {
  encoder_.zero_grad();
  decoder_.zero_grad();
}

std::vector<double*> MultiVae::parameters() {
  auto out = encoder_.parameters();
  for (double* p : decoder_.parameters()) out.push_back(p);
  return out;
}

std::vector<double*> MultiVae::gradients() {
  auto out = encoder_.gradients();
  for (double* p : decoder_.gradients()) out.push_back(p);
  return out;
}

void MultiVae::do_fit(const InteractionMatrix& train) {
  if (params_.epochs < 1 || params_.batch_size < 1 || params_.learning_rate < 0)
    throw ConfigError("MultiVAE requires epochs >= 1, batch_size >= 1, learning_rate >= 0");
  initialize(train.n_items());
  Rng rng = make_rng(params_.seed, 2);
  std::vector<UserIndex> users;
  for (UserIndex u = 0; u < train.n_users(); ++u)
    if (train.user_degree(u) > 0) users.push_back(u);
  epoch_losses_.clear();
  if (users.empty()) return;

  const auto bs = static_cast<std::size_t>(params_.batch_size);
  const std::size_t batches_per_epoch = (users.size() + bs - 1) / bs;
  const double anneal_steps = 0.5 * static_cast<double>(batches_per_epoch * static_cast<std::size_t>(params_.epochs));
  const double keep = 1.0 - params_.dropout;
  std::bernoulli_distribution keep_draw(keep);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto n_items = static_cast<Eigen::Index>(train.n_items());
  std::size_t step = 0;

  for (int epoch = 0; epoch < params_.epochs; ++epoch) {
    std::shuffle(users.begin(), users.end(), rng);
    double epoch_total = 0.0;
    for (std::size_t start = 0; start < users.size(); start += bs) {
      const auto b = static_cast<Eigen::Index>(std::min(bs, users.size() - start));
      Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n_items, b);
      for (Eigen::Index c = 0; c < b; ++c)
        for (ItemIndex i : train.items_of(users[start + static_cast<std::size_t>(c)])) x(i, c) = 1.0;
      Eigen::MatrixXd mask;
      if (params_.dropout > 0) {
        mask.resize(n_items, b);
        for (Eigen::Index k = 0; k < mask.size(); ++k) mask.data()[k] = keep_draw(rng) ? 1.0 / keep : 0.0;
      }
      Eigen::MatrixXd noise(params_.latent, b);
      for (Eigen::Index k = 0; k < noise.size(); ++k) noise.data()[k] = gauss(rng);
      const double beta = params_.anneal_cap * std::min(1.0, static_cast<double>(step) / std::max(anneal_steps, 1.0));
      zero_grad();
      epoch_total += loss(x, mask, noise, beta);
      encoder_.sgd_step(params_.learning_rate);
      decoder_.sgd_step(params_.learning_rate);
      ++step;
    }
    epoch_losses_.push_back(epoch_total / static_cast<double>(users.size()));
  }
}

void MultiVae::score(UserIndex user, std::span<double> out) const {
  require_fitted();
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out.size()), 1);
  for (ItemIndex i : train().items_of(user)) x(i, 0) = 1.0;
  const Eigen::MatrixXd encoded = encoder_.predict(normalize_columns(x));
  const Eigen::MatrixXd logits = decoder_.predict(encoded.topRows(params_.latent));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = logits(static_cast<Eigen::Index>(i), 0);
}

}  // namespace recbench
