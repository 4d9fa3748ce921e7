// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "recbench/linear_models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace recbench {

ItemWeightMatrix ItemWeightMatrix::dense(RowMajorMatrix b) {
  if (b.rows() != b.cols()) throw Error("item weight matrix must be square");
  ItemWeightMatrix w;
  w.n_items_ = static_cast<std::size_t>(b.rows());
  w.dense_ = std::move(b);
  return w;
}

ItemWeightMatrix ItemWeightMatrix::sparse(std::size_t n_items, std::vector<std::vector<Neighbor>> rows) {
  if (rows.size() != n_items) throw Error("sparse item weight rows must cover the catalog");
  ItemWeightMatrix w;
  w.n_items_ = n_items;
  w.sparse_rows_ = std::move(rows);
  for (auto& r : w.sparse_rows_)
    std::sort(r.begin(), r.end(), [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
  return w;
}

double ItemWeightMatrix::at(ItemIndex row, ItemIndex col) const {
  if (dense_.size() > 0) return dense_(row, col);
  const auto& r = sparse_rows_.at(row);
  auto it = std::lower_bound(r.begin(), r.end(), col, [](const Neighbor& n, ItemIndex c) { return n.index < c; });
  return (it != r.end() && it->index == col) ? it->weight : 0.0;
}

void ItemWeightMatrix::accumulate_row(ItemIndex row, std::span<double> out) const {
  if (dense_.size() > 0) {
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) += dense_.row(row).transpose();
    return;
  }
  for (const auto& nb : sparse_rows_[row]) out[nb.index] += nb.weight;
}

double ItemWeightMatrix::max_abs() const {
  if (dense_.size() > 0) return dense_.cwiseAbs().maxCoeff();
  double m = 0.0;
  for (const auto& r : sparse_rows_)
    for (const auto& nb : r) m = std::max(m, std::abs(nb.weight));
  return m;
}

std::size_t ItemWeightMatrix::nonzeros() const {
  if (dense_.size() > 0) return static_cast<std::size_t>((dense_.array() != 0.0).count());
  std::size_t n = 0;
  for (const auto& r : sparse_rows_) n += r.size();
  return n;
}

void ItemWeightMatrix::write_triplets(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write item weights to '" + path + "'");
  out << "# item-weights " << n_items_ << '\n' << std::setprecision(17);
  for (ItemIndex i = 0; i < n_items_; ++i) {
    if (dense_.size() > 0) {
      for (ItemIndex j = 0; j < n_items_; ++j)
        if (dense_(i, j) != 0.0) out << i << '\t' << j << '\t' << dense_(i, j) << '\n';
    } else {
      for (const auto& nb : sparse_rows_[i]) out << i << '\t' << nb.index << '\t' << nb.weight << '\n';
    }
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

ItemWeightMatrix ItemWeightMatrix::read_triplets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open item weights '" + path + "'");
  std::string line;
  std::size_t n = 0;
  if (!std::getline(in, line) || std::sscanf(line.c_str(), "# item-weights %zu", &n) != 1)
    throw ParseError(path + ": missing '# item-weights <n>' header", 1);
  std::vector<std::vector<Neighbor>> rows(n);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream fields(line);
    std::size_t i = 0, j = 0;
    double w = 0;
    if (!(fields >> i >> j >> w) || i >= n || j >= n) throw ParseError(path + ": malformed triplet", line_no);
    rows[i].push_back({static_cast<Index>(j), w});
  }
  return sparse(n, std::move(rows));
}

Eigen::MatrixXd gram_matrix(const InteractionMatrix& x) {
  const auto n = static_cast<Eigen::Index>(x.n_items());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (UserIndex u = 0; u < x.n_users(); ++u) {
    auto row = x.items_of(u);
    for (ItemIndex a : row)
      for (ItemIndex b : row) g(a, b) += 1.0;
  }
  return g;
}

EaseSolution solve_ease(const Eigen::MatrixXd& gram, double l2) {
  if (!(l2 > 0)) throw ConfigError("EASE requires l2 > 0");
  Eigen::MatrixXd a = gram;
  a.diagonal().array() += l2;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || (ldlt.vectorD().array() <= 0.0).any())
    throw NumericError("EASE: (G + l2 I) is numerically singular");
  EaseSolution s;
  s.inverse = ldlt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
  if (!s.inverse.allFinite()) throw NumericError("EASE: inverse is not finite");
  const Eigen::VectorXd diag = s.inverse.diagonal();
  s.weights = RowMajorMatrix(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) s.weights.col(j) = -s.inverse.col(j) / diag(j);
  s.weights.diagonal().setZero();
  return s;
}

void Ease::do_fit(const InteractionMatrix& train) {
  auto solution = solve_ease(gram_matrix(train), l2_);
  b_ = ItemWeightMatrix::dense(std::move(solution.weights));
}

void Ease::score(UserIndex user, std::span<double> out) const {
  require_fitted();
  std::fill(out.begin(), out.end(), 0.0);
  for (ItemIndex i : train().items_of(user)) b_.accumulate_row(i, out);
}

namespace {

struct SlimPenalty {
  double l1;
  double l2;
};

SlimPenalty slim_penalty(const InteractionMatrix& x, const SlimParams& p) {
  const double m = static_cast<double>(x.n_users());
  return {p.alpha * p.l1_ratio * m, p.alpha * (1.0 - p.l1_ratio) * m};
}

void check_slim_params(const SlimParams& p) {
  if (!(p.alpha > 0)) throw ConfigError("SLIM requires alpha > 0");
  if (!(p.l1_ratio > 0 && p.l1_ratio <= 1)) throw ConfigError("SLIM requires 0 < l1_ratio <= 1");
  if (p.top_k < 1) throw ConfigError("SLIM requires topK >= 1");
}

}  // namespace

double slim_objective(const InteractionMatrix& x, ItemIndex j, std::span<const double> w, const SlimParams& params) {
  const auto pen = slim_penalty(x, params);
  std::vector<double> r(x.n_users(), 0.0);
  for (UserIndex u : x.users_of(j)) r[u] = 1.0;
  double l1 = 0.0, sq = 0.0;
  for (ItemIndex k = 0; k < x.n_items(); ++k) {
    if (w[k] == 0.0) continue;
    for (UserIndex u : x.users_of(k)) r[u] -= w[k];
    l1 += std::abs(w[k]);
    sq += w[k] * w[k];
  }
  double rss = 0.0;
  for (double v : r) rss += v * v;
  return 0.5 * rss + pen.l1 * l1 + 0.5 * pen.l2 * sq;
}

SlimColumn solve_slim_column(const InteractionMatrix& x, ItemIndex j, const SlimParams& params) {
  check_slim_params(params);
  const auto pen = slim_penalty(x, params);

  // With w >= 0 the residual is <= 0 outside users(j), so only items that
  // co-occur with j can ever receive a positive weight.
  std::vector<char> mark(x.n_items(), 0);
  for (UserIndex u : x.users_of(j))
    for (ItemIndex k : x.items_of(u)) mark[k] = 1;
  mark[j] = 0;
  std::vector<ItemIndex> coords;
  for (ItemIndex k = 0; k < x.n_items(); ++k)
    if (mark[k]) coords.push_back(k);

  std::vector<double> r(x.n_users(), 0.0);  // x_j - X w
  for (UserIndex u : x.users_of(j)) r[u] = 1.0;
  std::vector<double> w(coords.size(), 0.0);

  auto objective = [&] {
    double rss = 0.0;
    for (double v : r) rss += v * v;
    double l1 = 0.0, sq = 0.0;
    for (double v : w) {
      l1 += v;
      sq += v * v;
    }
    return 0.5 * rss + pen.l1 * l1 + 0.5 * pen.l2 * sq;
  };

  SlimColumn out;
  out.objective_trace.push_back(objective());
  for (int sweep = 0; sweep < params.max_sweeps; ++sweep) {
    for (std::size_t c = 0; c < coords.size(); ++c) {
      const auto users = x.users_of(coords[c]);
      const double norm = static_cast<double>(users.size());
      double rho = 0.0;
      for (UserIndex u : users) rho += r[u];
      rho += norm * w[c];
      const double updated = std::max(0.0, rho - pen.l1) / (norm + pen.l2);
      const double delta = updated - w[c];
      if (delta != 0.0) {
        for (UserIndex u : users) r[u] -= delta;
        w[c] = updated;
      }
    }
    ++out.sweeps;
    const double prev = out.objective_trace.back();
    const double cur = objective();
    out.objective_trace.push_back(cur);
    if (std::abs(prev - cur) <= params.tolerance * std::max(std::abs(prev), 1e-300)) {
      out.converged = true;
      break;
    }
  }
  for (std::size_t c = 0; c < coords.size(); ++c)
    if (w[c] > 0.0) out.weights.push_back({coords[c], w[c]});
  return out;
}

void Slim::do_fit(const InteractionMatrix& train) {
  check_slim_params(params_);
  const std::size_t n = train.n_items();
  std::vector<std::vector<Neighbor>> columns(n);
  std::vector<char> converged(n, 1);
  parallel_for(0, n, [&](std::size_t j) {
    if (train.item_degree(static_cast<ItemIndex>(j)) == 0) return;
    auto col = solve_slim_column(train, static_cast<ItemIndex>(j), params_);
    converged[j] = col.converged;
    auto& w = col.weights;
    if (w.size() > params_.top_k) {
      std::nth_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(params_.top_k), w.end(),
                       [](const Neighbor& a, const Neighbor& b) {
                         return a.weight != b.weight ? a.weight > b.weight : a.index < b.index;
                       });
      w.resize(params_.top_k);
    }
    columns[j] = std::move(w);
  });
  unconverged_ = static_cast<std::size_t>(std::count(converged.begin(), converged.end(), 0));

  std::vector<std::vector<Neighbor>> rows(n);
  for (ItemIndex j = 0; j < n; ++j)
    for (const auto& nb : columns[j]) rows[nb.index].push_back({j, nb.weight});
  b_ = ItemWeightMatrix::sparse(n, std::move(rows));
}

void Slim::score(UserIndex user, std::span<double> out) const {
  require_fitted();
  std::fill(out.begin(), out.end(), 0.0);
  for (ItemIndex i : train().items_of(user)) b_.accumulate_row(i, out);
}

}  // namespace recbench
