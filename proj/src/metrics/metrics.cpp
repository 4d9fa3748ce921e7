// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "recbench/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace recbench {

const std::array<Metric, kMetricCount>& all_metrics() {
  static const std::array<Metric, kMetricCount> all = {
      Metric::ndcg, Metric::map, Metric::mrr,  Metric::precision, Metric::recall, Metric::f1,   Metric::ic,  Metric::gini,
      Metric::efd,  Metric::epc, Metric::preo, Metric::prsp,      Metric::aplt,   Metric::aclt, Metric::arp};
  return all;
}

const std::string& metric_name(Metric m) {
  static const std::array<std::string, kMetricCount> names = {
      "nDCG", "MAP", "MRR", "Precision", "Recall", "F1", "IC", "GiniComplement",
      "EFD",  "EPC", "PREO", "PRSP",     "APLT",   "ACLT", "ARP"};
  return names[static_cast<std::size_t>(m)];
}

std::optional<Metric> parse_metric(const std::string& name) {
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  const std::string want = lower(name);
  for (Metric m : all_metrics())
    if (lower(metric_name(m)) == want) return m;
  if (want == "gini") return Metric::gini;
  return std::nullopt;
}

bool is_accuracy_metric(Metric m) { return static_cast<int>(m) <= static_cast<int>(Metric::f1); }

EvalContext EvalContext::build(const InteractionMatrix& train, const GroundTruth& truth, std::size_t k) {
  if (k < 1) throw ConfigError("cutoff must be >= 1");
  EvalContext ctx;
  ctx.k = k;
  ctx.train = &train;
  ctx.truth = &truth;
  ctx.catalog_size = train.n_items();
  ctx.popularity.resize(ctx.catalog_size);
  for (ItemIndex i = 0; i < ctx.catalog_size; ++i) ctx.popularity[i] = static_cast<double>(train.item_degree(i));
  ctx.total_train = static_cast<double>(train.nnz());

  ctx.short_head_size = static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(ctx.catalog_size)));
  std::vector<ItemIndex> order(ctx.catalog_size);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](ItemIndex a, ItemIndex b) { return ctx.popularity[a] > ctx.popularity[b]; });
  ctx.short_head.assign(ctx.catalog_size, 0);
  for (std::size_t r = 0; r < ctx.short_head_size; ++r) ctx.short_head[order[r]] = 1;
  return ctx;
}

namespace {

bool is_relevant(std::span<const ItemIndex> truth, ItemIndex i) { return std::binary_search(truth.begin(), truth.end(), i); }

std::size_t cut(std::span<const ItemIndex> list, std::size_t k) { return std::min(list.size(), k); }

}  // namespace

std::size_t count_hits(std::span<const ItemIndex> list, std::span<const ItemIndex> truth, std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t r = 0; r < cut(list, k); ++r) hits += is_relevant(truth, list[r]);
  return hits;
}

PrecisionRecall precision_recall(std::span<const ItemIndex> list, std::span<const ItemIndex> truth, std::size_t k) {
  if (k < 1) throw ConfigError("cutoff must be >= 1");
  PrecisionRecall pr;
  if (truth.empty()) return pr;
  const auto hits = static_cast<double>(count_hits(list, truth, k));
  pr.precision = hits / static_cast<double>(k);
  pr.recall = hits / static_cast<double>(truth.size());
  return pr;
}

double ndcg_at_k(std::span<const ItemIndex> list, std::span<const ItemIndex> truth, std::size_t k) {
  if (truth.empty()) return 0.0;
  double dcg = 0.0;
  for (std::size_t r = 0; r < cut(list, k); ++r)
    if (is_relevant(truth, list[r])) dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  double idcg = 0.0;
  for (std::size_t r = 0; r < std::min(truth.size(), k); ++r) idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  return dcg / idcg;
}

double average_precision_at_k(std::span<const ItemIndex> list, std::span<const ItemIndex> truth, std::size_t k) {
  if (truth.empty()) return 0.0;
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < cut(list, k); ++r) {
    if (!is_relevant(truth, list[r])) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(r + 1);
  }
  return sum / static_cast<double>(std::min(truth.size(), k));
}

double reciprocal_rank_at_k(std::span<const ItemIndex> list, std::span<const ItemIndex> truth, std::size_t k) {
  for (std::size_t r = 0; r < cut(list, k); ++r)
    if (is_relevant(truth, list[r])) return 1.0 / static_cast<double>(r + 1);
  return 0.0;
}

double f1_per_user(std::span<const double> precision, std::span<const double> recall) {
  if (precision.size() != recall.size()) throw Error("f1_per_user: precision/recall length mismatch");
  if (precision.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t u = 0; u < precision.size(); ++u) sum += f1_from_averages(precision[u], recall[u]);
  return sum / static_cast<double>(precision.size());
}

double f1_from_averages(double p, double r) { return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

std::size_t item_coverage(std::span<const RankedList> lists, std::size_t k) {
  std::vector<ItemIndex> seen;
  for (const auto& l : lists) seen.insert(seen.end(), l.items.begin(), l.items.begin() + static_cast<std::ptrdiff_t>(cut(l.items, k)));
  std::sort(seen.begin(), seen.end());
  return static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
}

GiniResult gini_complement(std::span<const RankedList> lists, std::size_t catalog_size, std::size_t k) {
  std::vector<double> freq(catalog_size, 0.0);
  for (const auto& l : lists)
    for (std::size_t r = 0; r < cut(l.items, k); ++r) freq.at(l.items[r]) += 1.0;
  const double total = std::accumulate(freq.begin(), freq.end(), 0.0);
  GiniResult g;
  if (total == 0.0 || catalog_size == 0) {
    g.degenerate = true;
    return g;
  }
  std::sort(freq.begin(), freq.end());
  const auto n = static_cast<double>(catalog_size);
  double acc = 0.0;
  for (std::size_t i = 0; i < catalog_size; ++i) acc += (2.0 * static_cast<double>(i + 1) - n - 1.0) * freq[i];
  g.value = 1.0 - acc / (n * total);
  return g;
}

NoveltyResult novelty(std::span<const RankedList> lists, const EvalContext& ctx) {
  NoveltyResult out;
  const double max_pop = ctx.popularity.empty() ? 0.0 : *std::max_element(ctx.popularity.begin(), ctx.popularity.end());
  double epc_sum = 0.0, efd_sum = 0.0;
  std::size_t epc_users = 0, efd_users = 0;
  for (const auto& l : lists) {
    const std::size_t n = cut(l.items, ctx.k);
    if (n == 0) continue;
    double epc = 0.0, efd = 0.0;
    std::size_t efd_terms = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const double phi = ctx.popularity[l.items[r]];
      epc += 1.0 - (max_pop > 0 ? phi / max_pop : 0.0);
      if (phi > 0) {
        efd += -std::log2(phi / ctx.total_train);
        ++efd_terms;
      } else {
        ++out.efd_excluded;
      }
    }
    epc_sum += epc / static_cast<double>(n);
    ++epc_users;
    if (efd_terms > 0) {
      efd_sum += efd / static_cast<double>(efd_terms);
      ++efd_users;
    }
  }
  if (epc_users > 0) out.epc = epc_sum / static_cast<double>(epc_users);
  if (efd_users > 0) out.efd = efd_sum / static_cast<double>(efd_users);
  return out;
}

PopularityResult popularity_bias(std::span<const RankedList> lists, const EvalContext& ctx) {
  PopularityResult out;
  if (lists.empty()) return out;
  const auto k = static_cast<double>(ctx.k);
  for (const auto& l : lists) {
    double pop = 0.0, tail = 0.0;
    for (std::size_t r = 0; r < cut(l.items, ctx.k); ++r) {
      pop += ctx.popularity[l.items[r]];
      tail += ctx.short_head[l.items[r]] ? 0.0 : 1.0;
    }
    out.arp += pop / k;
    out.aplt += tail / k;
    out.aclt += tail;
  }
  const auto users = static_cast<double>(lists.size());
  out.arp /= users;
  out.aplt /= users;
  out.aclt /= users;
  return out;
}

double dispersion(std::span<const double> rates) {
  if (rates.empty()) return 0.0;
  const double mean = std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
  if (mean == 0.0) return 0.0;
  double var = 0.0;
  for (double r : rates) var += (r - mean) * (r - mean);
  var /= static_cast<double>(rates.size());
  return std::sqrt(var) / mean;
}

ParityResult popularity_parity(std::span<const RankedList> lists, const EvalContext& ctx) {
  if (ctx.train == nullptr || ctx.truth == nullptr) throw Error("popularity_parity: context without train/truth");
  // index 0 = short head, 1 = long tail
  std::array<double, 2> rec{}, cand{}, rec_rel{}, rel{};
  const std::array<double, 2> group_size = {static_cast<double>(ctx.short_head_size),
                                            static_cast<double>(ctx.catalog_size - ctx.short_head_size)};
  for (const auto& l : lists) {
    std::array<double, 2> profile{};
    for (ItemIndex i : ctx.train->items_of(l.user)) profile[ctx.short_head[i] ? 0 : 1] += 1.0;
    for (int g = 0; g < 2; ++g) cand[g] += group_size[g] - profile[g];
    std::span<const ItemIndex> truth;
    if (l.user < ctx.truth->size()) truth = (*ctx.truth)[l.user];
    for (ItemIndex i : truth) rel[ctx.short_head[i] ? 0 : 1] += 1.0;
    for (std::size_t r = 0; r < cut(l.items, ctx.k); ++r) {
      const int g = ctx.short_head[l.items[r]] ? 0 : 1;
      rec[g] += 1.0;
      if (is_relevant(truth, l.items[r])) rec_rel[g] += 1.0;
    }
  }
  static const std::array<const char*, 2> group_names = {"short head", "long tail"};
  std::array<double, 2> prsp_rates{}, preo_rates{};
  for (int g = 0; g < 2; ++g) {
    if (cand[g] == 0) throw Error(std::string("PRSP: group '") + group_names[g] + "' has no candidate items");
    if (rel[g] == 0) throw Error(std::string("PREO: group '") + group_names[g] + "' has no relevant test items");
    prsp_rates[g] = rec[g] / cand[g];
    preo_rates[g] = rec_rel[g] / rel[g];
  }
  return {dispersion(prsp_rates), dispersion(preo_rates)};
}

Evaluation evaluate(std::span<const RankedList> lists, const EvalContext& ctx) {
  Evaluation ev;
  ev.users_with_lists = lists.size();
  std::vector<double> precisions, recalls;
  double ndcg = 0.0, ap = 0.0, rr = 0.0;
  for (const auto& l : lists) {
    if (l.user >= ctx.truth->size() || (*ctx.truth)[l.user].empty()) continue;
    const auto& truth = (*ctx.truth)[l.user];
    const auto pr = precision_recall(l.items, truth, ctx.k);
    precisions.push_back(pr.precision);
    recalls.push_back(pr.recall);
    ndcg += ndcg_at_k(l.items, truth, ctx.k);
    ap += average_precision_at_k(l.items, truth, ctx.k);
    rr += reciprocal_rank_at_k(l.items, truth, ctx.k);
  }
  ev.users_evaluated = precisions.size();
  auto& v = ev.values;
  auto set = [&v](Metric m, double x) { v[static_cast<std::size_t>(m)] = x; };
  if (ev.users_evaluated > 0) {
    const auto n = static_cast<double>(ev.users_evaluated);
    set(Metric::ndcg, ndcg / n);
    set(Metric::map, ap / n);
    set(Metric::mrr, rr / n);
    set(Metric::precision, std::accumulate(precisions.begin(), precisions.end(), 0.0) / n);
    set(Metric::recall, std::accumulate(recalls.begin(), recalls.end(), 0.0) / n);
    set(Metric::f1, f1_per_user(precisions, recalls));
  } else {
    ev.warnings.push_back("no user has a non-empty test set");
  }
  set(Metric::ic, static_cast<double>(item_coverage(lists, ctx.k)));
  const auto gini = gini_complement(lists, ctx.catalog_size, ctx.k);
  if (gini.degenerate) ev.warnings.push_back("Gini: nothing was recommended");
  set(Metric::gini, gini.value);
  const auto nov = novelty(lists, ctx);
  if (nov.efd_excluded > 0)
    ev.warnings.push_back("EFD: " + std::to_string(nov.efd_excluded) + " recommended items have no train interactions");
  set(Metric::epc, nov.epc);
  set(Metric::efd, nov.efd);
  const auto pop = popularity_bias(lists, ctx);
  set(Metric::arp, pop.arp);
  set(Metric::aplt, pop.aplt);
  set(Metric::aclt, pop.aclt);
  const auto parity = popularity_parity(lists, ctx);
  set(Metric::prsp, parity.prsp);
  set(Metric::preo, parity.preo);
  return ev;
}

std::vector<CorrelationEntry> pearson_correlations(const std::vector<std::string>& columns,
                                                   const std::vector<std::vector<double>>& values, double threshold) {
  if (values.size() < 3) throw ConfigError("correlations need at least three algorithms");
  for (const auto& row : values)
    if (row.size() != columns.size()) throw Error("correlation input rows must match the column count");
  const std::size_t n = values.size();
  const std::size_t m = columns.size();
  std::vector<double> mean(m, 0.0), ss(m, 0.0);
  for (std::size_t c = 0; c < m; ++c) {
    for (const auto& row : values) mean[c] += row[c];
    mean[c] /= static_cast<double>(n);
    for (const auto& row : values) ss[c] += (row[c] - mean[c]) * (row[c] - mean[c]);
  }
  std::vector<CorrelationEntry> out;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      CorrelationEntry e{columns[a], columns[b], std::nullopt, false};
      if (ss[a] > 0 && ss[b] > 0) {
        double cross = 0.0;
        for (const auto& row : values) cross += (row[a] - mean[a]) * (row[b] - mean[b]);
        const double r = std::clamp(cross / std::sqrt(ss[a] * ss[b]), -1.0, 1.0);
        e.r = r;
        e.flagged = std::abs(r) > threshold;
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace recbench
