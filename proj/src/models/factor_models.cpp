// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "recbench/factor_models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace recbench {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double FactorModel::predict(UserIndex u, ItemIndex i) const {
  double s = user_factors.row(u).dot(item_factors.row(i));
  if (has_biases) s += global_bias + user_bias(u) + item_bias(i);
  return s;
}

void FactorModel::score_all(UserIndex u, std::span<double> out) const {
  Eigen::Map<Eigen::VectorXd> scores(out.data(), static_cast<Eigen::Index>(out.size()));
  scores.noalias() = item_factors * user_factors.row(u).transpose();
  if (has_biases) scores.array() += item_bias.array() + (global_bias + user_bias(u));
}

bool FactorModel::all_finite() const {
  bool ok = user_factors.allFinite() && item_factors.allFinite();
  if (has_biases) ok = ok && std::isfinite(global_bias) && user_bias.allFinite() && item_bias.allFinite();
  return ok;
}

void FactorModel::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write factors to '" + path + "'");
  out << "factors " << factors() << ' ' << user_factors.rows() << ' ' << item_factors.rows() << ' '
      << (has_biases ? 1 : 0) << '\n'
      << std::setprecision(17);
  auto dump = [&](const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
      out << '\n';
    }
  };
  dump(user_factors);
  dump(item_factors);
  if (has_biases) {
    out << global_bias << '\n';
    for (Eigen::Index r = 0; r < user_bias.size(); ++r) out << user_bias(r) << '\n';
    for (Eigen::Index r = 0; r < item_bias.size(); ++r) out << item_bias(r) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

FactorModel FactorModel::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open factors '" + path + "'");
  std::string tag;
  Eigen::Index f = 0, nu = 0, ni = 0;
  int biases = 0;
  if (!(in >> tag >> f >> nu >> ni >> biases) || tag != "factors" || f < 1 || nu < 0 || ni < 0)
    throw ParseError(path + ": bad factor header", 1);
  FactorModel m;
  m.user_factors.resize(nu, f);
  m.item_factors.resize(ni, f);
  auto load = [&](Eigen::MatrixXd& mat) {
    for (Eigen::Index r = 0; r < mat.rows(); ++r)
      for (Eigen::Index c = 0; c < mat.cols(); ++c)
        if (!(in >> mat(r, c))) throw ParseError(path + ": truncated factor block", 0);
  };
  load(m.user_factors);
  load(m.item_factors);
  m.has_biases = biases != 0;
  if (m.has_biases) {
    m.user_bias.resize(nu);
    m.item_bias.resize(ni);
    if (!(in >> m.global_bias)) throw ParseError(path + ": missing global bias", 0);
    for (Eigen::Index r = 0; r < nu; ++r)
      if (!(in >> m.user_bias(r))) throw ParseError(path + ": truncated user biases", 0);
    for (Eigen::Index r = 0; r < ni; ++r)
      if (!(in >> m.item_bias(r))) throw ParseError(path + ": truncated item biases", 0);
  }
  return m;
}

FactorModel init_factor_model(std::size_t n_users, std::size_t n_items, int factors, bool biases, Rng& rng) {
  if (factors < 1) throw ConfigError("factor models require at least one factor");
  std::normal_distribution<double> init(0.0, 0.01);
  FactorModel m;
  m.user_factors.resize(static_cast<Eigen::Index>(n_users), factors);
  m.item_factors.resize(static_cast<Eigen::Index>(n_items), factors);
  for (Eigen::Index r = 0; r < m.user_factors.rows(); ++r)
    for (Eigen::Index c = 0; c < factors; ++c) m.user_factors(r, c) = init(rng);
  for (Eigen::Index r = 0; r < m.item_factors.rows(); ++r)
    for (Eigen::Index c = 0; c < factors; ++c) m.item_factors(r, c) = init(rng);
  m.has_biases = biases;
  if (biases) {
    m.user_bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_users));
    m.item_bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_items));
  }
  return m;
}

bool sample_unseen_item(std::span<const ItemIndex> profile, std::size_t n_items, Rng& rng, ItemIndex& out) {
  if (profile.size() >= n_items) return false;
  std::uniform_int_distribution<std::size_t> pick(0, n_items - profile.size() - 1);
  std::size_t x = pick(rng);
  // Shift the k-th slot past every seen item at or below it.
  for (ItemIndex p : profile) {
    if (p <= x) ++x;
    else break;
  }
  out = static_cast<ItemIndex>(x);
  return true;
}

// iALS ----------------------------------------------------------------------

double ials_confidence(const IalsParams& p, double r) {
  if (p.scaling == ConfidenceScaling::linear) return 1.0 + p.alpha * r;
  return 1.0 + p.alpha * std::log(1.0 + r / p.epsilon);
}

Eigen::VectorXd ials_solve_row(const Eigen::MatrixXd& opposite, const Eigen::MatrixXd& opposite_gram,
                               std::span<const Index> observed, double confidence, double reg) {
  const Eigen::Index f = opposite.cols();
  Eigen::MatrixXd a = opposite_gram;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(f);
  for (Index i : observed) {
    const auto y = opposite.row(i);
    a.noalias() += (confidence - 1.0) * y.transpose() * y;
    b.noalias() += confidence * y.transpose();
  }
  a.diagonal().array() += reg;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw NumericError("iALS: singular normal equations");
  return llt.solve(b);
}

double ials_objective(const InteractionMatrix& train, const FactorModel& m, double confidence, double reg) {
  const Eigen::MatrixXd utu = m.user_factors.transpose() * m.user_factors;
  const Eigen::MatrixXd vtv = m.item_factors.transpose() * m.item_factors;
  double total = utu.cwiseProduct(vtv).sum();  // sum over all cells of s^2
  for (UserIndex u = 0; u < train.n_users(); ++u)
    for (ItemIndex i : train.items_of(u)) {
      const double s = m.user_factors.row(u).dot(m.item_factors.row(i));
      total += confidence * (1.0 - s) * (1.0 - s) - s * s;
    }
  return total + reg * (m.user_factors.squaredNorm() + m.item_factors.squaredNorm());
}

void Ials::solve_side(const InteractionMatrix& train, FactorModel& m, bool users, double confidence, double reg) {
  const Eigen::MatrixXd& opposite = users ? m.item_factors : m.user_factors;
  Eigen::MatrixXd& target = users ? m.user_factors : m.item_factors;
  const Eigen::MatrixXd gram = opposite.transpose() * opposite;
  const std::size_t rows = users ? train.n_users() : train.n_items();
  parallel_for(0, rows, [&](std::size_t r) {
    auto observed = users ? train.items_of(static_cast<Index>(r)) : train.users_of(static_cast<Index>(r));
    target.row(static_cast<Eigen::Index>(r)) = ials_solve_row(opposite, gram, observed, confidence, reg).transpose();
  });
}

void Ials::do_fit(const InteractionMatrix& train) {
  if (params_.factors < 1) throw ConfigError("iALS requires factors >= 1");
  if (!(params_.alpha > 0) || !(params_.reg > 0)) throw ConfigError("iALS requires alpha > 0 and reg > 0");
  if (params_.scaling == ConfidenceScaling::log && !(params_.epsilon > 0))
    throw ConfigError("iALS log scaling requires epsilon > 0");
  Rng rng = make_rng(params_.seed);
  model_ = init_factor_model(train.n_users(), train.n_items(), params_.factors, false, rng);
  const double c = ials_confidence(params_);
  trace_.clear();
  if (params_.track_objective) trace_.push_back(ials_objective(train, model_, c, params_.reg));
  for (int e = 0; e < params_.epochs; ++e) {
    solve_side(train, model_, true, c, params_.reg);
    solve_side(train, model_, false, c, params_.reg);
    if (params_.track_objective) trace_.push_back(ials_objective(train, model_, c, params_.reg));
  }
}

void Ials::score(UserIndex user, std::span<double> out) const {
  require_fitted();
  model_.score_all(user, out);
}

// BPRMF ---------------------------------------------------------------------

BprTripleGradient bpr_triple_gradient(const Eigen::VectorXd& user, const Eigen::VectorXd& positive,
                                      const Eigen::VectorXd& negative, const BprParams& p) {
  const Eigen::VectorXd diff = positive - negative;
  const double x = user.dot(diff);
  const double g = -sigmoid(-x);  // d(-ln sigma(x))/dx
  BprTripleGradient out;
  out.loss = -log_sigmoid(x) + 0.5 * p.reg_user * user.squaredNorm() +
             0.5 * p.reg_positive * positive.squaredNorm() + 0.5 * p.reg_negative * negative.squaredNorm();
  out.user = g * diff + p.reg_user * user;
  out.positive = g * user + p.reg_positive * positive;
  out.negative = -g * user + p.reg_negative * negative;
  return out;
}

void Bprmf::do_fit(const InteractionMatrix& train) {
  if (params_.epochs < 1 || params_.batch_size < 1 || params_.learning_rate < 0)
    throw ConfigError("BPRMF requires epochs >= 1, batch_size >= 1 and learning_rate >= 0");
  Rng rng = make_rng(params_.seed);
  model_ = initial_ ? *initial_ : init_factor_model(train.n_users(), train.n_items(), params_.factors, false, rng);
  const auto positives = train.pairs();
  if (positives.empty()) return;
  std::uniform_int_distribution<std::size_t> pick(0, positives.size() - 1);

  struct Step {
    UserIndex u;
    ItemIndex i, j;
    BprTripleGradient grad;
  };
  std::vector<Step> batch;
  batch.reserve(static_cast<std::size_t>(params_.batch_size));
  for (int epoch = 0; epoch < params_.epochs; ++epoch) {
    std::size_t remaining = positives.size();
    while (remaining > 0) {
      const std::size_t n = std::min<std::size_t>(remaining, static_cast<std::size_t>(params_.batch_size));
      remaining -= n;
      batch.clear();
      for (std::size_t b = 0; b < n; ++b) {
        const auto [u, i] = positives[pick(rng)];
        ItemIndex j = 0;
        if (!sample_unseen_item(train.items_of(u), train.n_items(), rng, j)) continue;
        batch.push_back({u, i, j,
                         bpr_triple_gradient(model_.user_factors.row(u).transpose(),
                                             model_.item_factors.row(i).transpose(),
                                             model_.item_factors.row(j).transpose(), params_)});
      }
      // Summed mini-batch gradient, evaluated at the parameters before the step.
      for (const auto& s : batch) {
        model_.user_factors.row(s.u) -= params_.learning_rate * s.grad.user.transpose();
        model_.item_factors.row(s.i) -= params_.learning_rate * s.grad.positive.transpose();
        model_.item_factors.row(s.j) -= params_.learning_rate * s.grad.negative.transpose();
      }
    }
  }
  if (!model_.all_finite()) throw NumericError("BPRMF diverged (non-finite factors); lower the learning rate");
}

void Bprmf::score(UserIndex user, std::span<double> out) const {
  require_fitted();
  model_.score_all(user, out);
}

// MF2020 --------------------------------------------------------------------

PointwiseGradient mf2020_sample_gradient(const Eigen::VectorXd& user, const Eigen::VectorXd& item, double user_bias,
                                         double item_bias, double global_bias, double label, double reg) {
  const double x = global_bias + user_bias + item_bias + user.dot(item);
  PointwiseGradient g;
  g.loss = -(label * log_sigmoid(x) + (1.0 - label) * log_sigmoid(-x)) +
           reg * (user.squaredNorm() + item.squaredNorm() + user_bias * user_bias + item_bias * item_bias);
  const double d = sigmoid(x) - label;
  g.user = d * item + 2.0 * reg * user;
  g.item = d * user + 2.0 * reg * item;
  g.user_bias = d + 2.0 * reg * user_bias;
  g.item_bias = d + 2.0 * reg * item_bias;
  g.global_bias = d;
  return g;
}

void Mf2020::do_fit(const InteractionMatrix& train) {
  if (params_.epochs < 1 || params_.learning_rate < 0 || params_.negatives < 0)
    throw ConfigError("MF2020 requires epochs >= 1, learning_rate >= 0, negatives >= 0");
  Rng rng = make_rng(params_.seed);
  model_ = init_factor_model(train.n_users(), train.n_items(), params_.factors, true, rng);
  auto positives = train.pairs();
  const double lr = params_.learning_rate;

  auto step = [&](UserIndex u, ItemIndex i, double label) {
    auto g = mf2020_sample_gradient(model_.user_factors.row(u).transpose(), model_.item_factors.row(i).transpose(),
                                    model_.user_bias(u), model_.item_bias(i), model_.global_bias, label, params_.reg);
    model_.user_factors.row(u) -= lr * g.user.transpose();
    model_.item_factors.row(i) -= lr * g.item.transpose();
    model_.user_bias(u) -= lr * g.user_bias;
    model_.item_bias(i) -= lr * g.item_bias;
    model_.global_bias -= lr * g.global_bias;
  };

  for (int epoch = 0; epoch < params_.epochs; ++epoch) {
    std::shuffle(positives.begin(), positives.end(), rng);
    for (const auto& [u, i] : positives) {
      step(u, i, 1.0);
      for (int k = 0; k < params_.negatives; ++k) {
        ItemIndex j = 0;
        if (!sample_unseen_item(train.items_of(u), train.n_items(), rng, j)) break;
        step(u, j, 0.0);
      }
    }
  }
  if (!model_.all_finite()) throw NumericError("MF2020 diverged (non-finite parameters); lower the learning rate");
}

void Mf2020::score(UserIndex user, std::span<double> out) const {
  require_fitted();
  model_.score_all(user, out);
}

}  // namespace recbench
