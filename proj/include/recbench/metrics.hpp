// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef RECBENCH_METRICS_HPP
#define RECBENCH_METRICS_HPP

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recbench/corpus.hpp"
#include "recbench/model.hpp"

namespace recbench {

enum class Metric { ndcg, map, mrr, precision, recall, f1, ic, gini, efd, epc, preo, prsp, aplt, aclt, arp };

inline constexpr std::size_t kMetricCount = 15;
using MetricValues = std::array<double, kMetricCount>;

const std::array<Metric, kMetricCount>& all_metrics();
const std::string& metric_name(Metric m);
std::optional<Metric> parse_metric(const std::string& name);  // case-insensitive
bool is_accuracy_metric(Metric m);

// Everything the metrics need besides the lists. Holds non-owning pointers:
// `train` and `truth` must outlive the context.
struct EvalContext {
  std::size_t k = 10;
  const InteractionMatrix* train = nullptr;
  const GroundTruth* truth = nullptr;
  std::vector<double> popularity;  // train interaction count per item
  double total_train = 0.0;
  std::vector<char> short_head;    // 1 for the ceil(20%) most popular items
  std::size_t short_head_size = 0;
  std::size_t catalog_size = 0;

  static EvalContext build(const InteractionMatrix& train, const GroundTruth& truth, std::size_t k);
};

// --- per-user accuracy terms; `truth` is sorted, lists are cut at k ---

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

std::size_t count_hits(std::span<const ItemIndex> list, std::span<const ItemIndex> truth, std::size_t k);
PrecisionRecall precision_recall(std::span<const ItemIndex> list, std::span<const ItemIndex> truth, std::size_t k);
double ndcg_at_k(std::span<const ItemIndex> list, std::span<const ItemIndex> truth, std::size_t k);
double average_precision_at_k(std::span<const ItemIndex> list, std::span<const ItemIndex> truth, std::size_t k);
double reciprocal_rank_at_k(std::span<const ItemIndex> list, std::span<const ItemIndex> truth, std::size_t k);

// Mean of the per-user harmonic means (0 where P + R = 0).
double f1_per_user(std::span<const double> precision, std::span<const double> recall);
// Harmonic mean of the averaged precision and recall.
double f1_from_averages(double mean_precision, double mean_recall);

// --- list-set metrics ---

std::size_t item_coverage(std::span<const RankedList> lists, std::size_t k);

struct GiniResult {
  double value = 1.0;  // 1 - Gini
  bool degenerate = false;  // nothing was recommended
};
GiniResult gini_complement(std::span<const RankedList> lists, std::size_t catalog_size, std::size_t k);

struct NoveltyResult {
  double epc = 0.0;
  double efd = 0.0;
  std::size_t efd_excluded = 0;  // recommended items without train interactions
};
NoveltyResult novelty(std::span<const RankedList> lists, const EvalContext& ctx);

struct PopularityResult {
  double arp = 0.0;
  double aplt = 0.0;
  double aclt = 0.0;
};
PopularityResult popularity_bias(std::span<const RankedList> lists, const EvalContext& ctx);

struct ParityResult {
  double prsp = 0.0;
  double preo = 0.0;
};
// Throws Error naming the group when a group has no candidates (PRSP) or
// no relevant test items (PREO).
ParityResult popularity_parity(std::span<const RankedList> lists, const EvalContext& ctx);

// Population std / mean of a set of group rates; 0 when every rate is 0.
double dispersion(std::span<const double> rates);

struct Evaluation {
  MetricValues values{};
  std::size_t users_with_lists = 0;
  std::size_t users_evaluated = 0;  // lists with a non-empty test set
  std::vector<std::string> warnings;
};

// All fifteen metrics at ctx.k. Accuracy terms average over users with a
// non-empty test set; the others cover every list.
Evaluation evaluate(std::span<const RankedList> lists, const EvalContext& ctx);

struct CorrelationEntry {
  std::string a, b;
  std::optional<double> r;  // empty when either column has zero variance
  bool flagged = false;     // |r| > threshold
};

// Pearson r between every pair of columns of `values` (one row per
// algorithm). Requires at least three rows.
std::vector<CorrelationEntry> pearson_correlations(const std::vector<std::string>& columns,
                                                   const std::vector<std::vector<double>>& values,
                                                   double threshold = 0.9);

}  // namespace recbench

#endif  // RECBENCH_METRICS_HPP
