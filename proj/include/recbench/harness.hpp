// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef RECBENCH_HARNESS_HPP
#define RECBENCH_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "recbench/corpus.hpp"
#include "recbench/metrics.hpp"
#include "recbench/model.hpp"

namespace recbench {

// ---------------------------------------------------------------- config

struct DatasetSpec {
  std::string path;
  std::string label;  // defaults to the file stem
  FileFormat format;
  std::optional<double> threshold;  // unset: keep every interaction
  int pcore = 1;
};

struct AlgorithmSpec {
  std::string algorithm;
  std::optional<std::string> preset;  // dataset tag, e.g. "movielens"
  ParamMap overrides;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<std::size_t> cutoffs = {10, 20};
  int repeats = 5;
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  std::string output_dir = "results";
  unsigned threads = 0;
  std::string source;  // path the config was read from
};

inline constexpr const char* kOutputDirEnv = "RECBENCH_OUTPUT_DIR";

// INI file with [dataset], [experiment] and [algorithms] sections. In
// [algorithms], each key is an algorithm name and the value a whitespace
// separated list of "preset:<tag>" and key=value tokens. Relative dataset
// paths resolve against the config file's directory. RECBENCH_OUTPUT_DIR
// replaces experiment.output when set.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");

// Parses "preset:movielens topK=100 similarity=cosine".
AlgorithmSpec parse_algorithm_spec(const std::string& algorithm, const std::string& value);

// ---------------------------------------------------------------- spaces and presets

enum class Sampling { uniform, log_uniform, choice };

struct HyperParameter {
  std::string name;
  Sampling sampling = Sampling::uniform;
  bool integer = false;
  double low = 0.0, high = 0.0;       // ranges
  std::vector<ParamValue> choices;    // choice
};

struct SearchSpace {
  std::string algorithm;
  std::vector<HyperParameter> parameters;

  ParamMap sample(Rng& rng) const;
  // Number of distinct points when finite (every parameter a choice or a
  // degenerate range); nullopt otherwise.
  std::optional<std::size_t> cardinality() const;
  // Messages for each value outside its domain; keys absent from the space
  // are ignored.
  std::vector<std::string> violations(const ParamMap& params) const;
};

SearchSpace search_space(const std::string& algorithm);

struct Preset {
  std::string algorithm;
  std::string dataset;  // movielens | amazon | epinions
  ParamMap values;
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& algorithm, const std::string& dataset);
const std::vector<std::string>& preset_datasets();

// Preset values (if any) with the overrides applied on top.
ParamMap resolve_params(const AlgorithmSpec& spec);

// ---------------------------------------------------------------- reports

struct MetricCell {
  std::string algorithm;
  int fold = 0;
  std::size_t cutoff = 10;
  MetricValues values{};
  double train_seconds = 0.0;
  double eval_seconds = 0.0;
  std::size_t users_evaluated = 0;
  std::size_t users_excluded = 0;  // empty train profile in this fold
  bool failed = false;
  std::string error;
  std::vector<std::string> warnings;
};

struct MetricReport {
  std::string dataset;
  std::string hardware;
  std::uint64_t seed = 0;
  int folds = 0;
  std::vector<MetricCell> cells;

  std::vector<std::string> algorithms() const;  // first-appearance order
  std::vector<std::size_t> cutoffs() const;     // ascending
  // Arithmetic mean over folds; nullopt when absent or any fold failed.
  std::optional<double> fold_mean(const std::string& algorithm, std::size_t cutoff, Metric m) const;
  std::optional<MetricValues> fold_means(const std::string& algorithm, std::size_t cutoff) const;
  double mean_train_seconds(const std::string& algorithm) const;
  double mean_eval_seconds(const std::string& algorithm) const;
  bool all_succeeded() const;
};

std::string hardware_description();

// ---------------------------------------------------------------- preparation and runs

struct PreparedDataset {
  DatasetStats before;
  DatasetStats after;
  RawDataset filtered;
  InteractionMatrix matrix;
};

PreparedDataset prepare_dataset(const DatasetSpec& spec);

using ProgressSink = std::function<void(const std::string&)>;

// Produces top-n lists for every user with a non-empty train profile.
std::vector<RankedList> recommend_all(const Recommender& model, std::size_t n, unsigned threads = 0);

// Fits and evaluates every algorithm on every fold.
MetricReport run_experiment(const ExperimentConfig& config, const SplitSet& splits, const std::string& dataset_label,
                            const ProgressSink& progress = {});
MetricReport run_experiment(const ExperimentConfig& config, const ProgressSink& progress = {});

// ---------------------------------------------------------------- tuning

struct TrialRecord {
  ParamMap params;
  std::optional<double> score;  // empty when the trial failed
  std::string error;
};

struct TuneResult {
  ParamMap best;
  double best_score = 0.0;
  int best_trial = -1;
  std::vector<TrialRecord> trials;
};

// 50 trials for spaces with at least four hyperparameters, 20 otherwise;
// a finite space smaller than that is sampled only as often as it has points.
int default_trials(const SearchSpace& space);

// Random search: `trials` samples from `space` (merged under `fixed`), each
// scored by `objective`; the highest score wins, ties go to the earlier trial.
// Throws Error with per-trial diagnostics when every trial fails.
TuneResult random_search(const SearchSpace& space, int trials, std::uint64_t seed, const ParamMap& fixed,
                         const std::function<double(const ParamMap&)>& objective);

// Mean nDCG@k over users with both a train profile and validation items.
double validation_ndcg(const Recommender& model, const GroundTruth& validation, std::size_t k = 10);

// Tunes on a validation split carved out of `train` (the first fold's
// training part), maximising nDCG@10.
TuneResult tune(const std::string& algorithm, const SearchSpace& space, int trials, const InteractionMatrix& train,
                std::uint64_t seed, const ParamMap& fixed = {}, const ProgressSink& progress = {});

// ---------------------------------------------------------------- Borda count

struct Vote {
  std::string dataset;
  std::string metric;
  std::map<std::string, double> values;  // algorithm -> metric value
  bool higher_is_better = true;
};

struct LeaderboardEntry {
  std::string algorithm;
  double points = 0.0;
  std::map<std::string, double> ranks;  // "dataset/metric" -> 0-based (mean) rank
};

// Each vote awards c - 1 - rank points; tied candidates share the mean of
// the tied positions' points. Sorted by points descending, then name.
std::vector<LeaderboardEntry> borda_count(const std::vector<Vote>& votes, const std::vector<std::string>& candidates);

std::vector<Vote> votes_from_reports(const std::vector<MetricReport>& reports, const std::vector<Metric>& metrics,
                                     std::size_t cutoff);

// CSV with header "dataset,algorithm,<metric>..." and one row per pair.
std::vector<Vote> load_vote_table(const std::string& path, const std::vector<Metric>& metrics);

// ---------------------------------------------------------------- output

enum class ReportFormat { csv, json, markdown };

// Algorithm x metric fold means at `cutoff` for algorithms without failures.
std::vector<CorrelationEntry> report_correlations(const MetricReport& report, std::size_t cutoff,
                                                  double threshold = 0.9);

// csv writes <stem>.csv (metrics) and <stem>_timing.csv; json writes
// <stem>.json; markdown writes <stem>.md. Returns the written paths.
std::vector<std::string> emit_report(const MetricReport& report, const std::vector<LeaderboardEntry>& leaderboard,
                                     ReportFormat format, const std::string& directory,
                                     const std::string& stem = "report");

std::string report_to_json(const MetricReport& report);
MetricReport report_from_json(const std::string& text);
MetricReport load_report(const std::string& path);
void save_report(const MetricReport& report, const std::string& path);

std::string report_markdown(const MetricReport& report, const std::vector<LeaderboardEntry>& leaderboard);
std::string leaderboard_markdown(const std::vector<LeaderboardEntry>& leaderboard);
std::string correlation_markdown(const std::vector<CorrelationEntry>& entries);

}  // namespace recbench

#endif  // RECBENCH_HARNESS_HPP
