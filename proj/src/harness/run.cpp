// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <sys/utsname.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "recbench/harness.hpp"

namespace recbench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void say(const ProgressSink& sink, const std::string& msg) {
  if (sink) sink(msg);
}

}  // namespace

// ---------------------------------------------------------------- report queries

std::vector<std::string> MetricReport::algorithms() const {
  std::vector<std::string> out;
  for (const auto& c : cells)
    if (std::find(out.begin(), out.end(), c.algorithm) == out.end()) out.push_back(c.algorithm);
  return out;
}

std::vector<std::size_t> MetricReport::cutoffs() const {
  std::vector<std::size_t> out;
  for (const auto& c : cells) out.push_back(c.cutoff);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<MetricValues> MetricReport::fold_means(const std::string& algorithm, std::size_t cutoff) const {
  MetricValues sum{};
  std::size_t n = 0;
  for (const auto& c : cells) {
    if (c.algorithm != algorithm || c.cutoff != cutoff) continue;
    if (c.failed) return std::nullopt;
    for (std::size_t m = 0; m < kMetricCount; ++m) sum[m] += c.values[m];
    ++n;
  }
  if (n == 0) return std::nullopt;
  for (auto& v : sum) v /= static_cast<double>(n);
  return sum;
}

std::optional<double> MetricReport::fold_mean(const std::string& algorithm, std::size_t cutoff, Metric m) const {
  auto means = fold_means(algorithm, cutoff);
  if (!means) return std::nullopt;
  return (*means)[static_cast<std::size_t>(m)];
}

namespace {

double mean_seconds(const std::vector<MetricCell>& cells, const std::string& algorithm, bool train) {
  // Timings are per fold; every cutoff row of a fold repeats them.
  std::map<int, double> per_fold;
  for (const auto& c : cells)
    if (c.algorithm == algorithm && !c.failed) per_fold[c.fold] = train ? c.train_seconds : c.eval_seconds;
  if (per_fold.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [fold, s] : per_fold) sum += s;
  return sum / static_cast<double>(per_fold.size());
}

}  // namespace

double MetricReport::mean_train_seconds(const std::string& algorithm) const { return mean_seconds(cells, algorithm, true); }
double MetricReport::mean_eval_seconds(const std::string& algorithm) const { return mean_seconds(cells, algorithm, false); }

bool MetricReport::all_succeeded() const {
  return std::none_of(cells.begin(), cells.end(), [](const MetricCell& c) { return c.failed; });
}

std::string hardware_description() {
  std::string cpu = "unknown cpu";
  std::ifstream info("/proc/cpuinfo");
  for (std::string line; std::getline(info, line);) {
    if (line.starts_with("model name")) {
      auto colon = line.find(':');
      if (colon != std::string::npos) cpu = trim(line.substr(colon + 1));
      break;
    }
  }
  std::ostringstream out;
  out << cpu << "; " << std::thread::hardware_concurrency() << " hardware threads";
  utsname u{};
  if (uname(&u) == 0) out << "; " << u.sysname << ' ' << u.release << ' ' << u.machine;
  return out.str();
}

// ---------------------------------------------------------------- preparation and runs

PreparedDataset prepare_dataset(const DatasetSpec& spec) {
  PreparedDataset out;
  RawDataset raw = load_interactions(spec.path, spec.format);
  out.before = compute_stats(raw);
  if (spec.threshold) raw = binarize(raw, *spec.threshold);
  out.filtered = pcore_filter(raw, spec.pcore);
  out.after = compute_stats(out.filtered);
  out.matrix = build_matrix(out.filtered);
  return out;
}

std::vector<RankedList> recommend_all(const Recommender& model, std::size_t n, unsigned threads) {
  const auto& train = model.train();
  std::vector<UserIndex> users;
  for (UserIndex u = 0; u < train.n_users(); ++u)
    if (train.user_degree(u) > 0) users.push_back(u);
  std::vector<RankedList> lists(users.size());
  parallel_for(
      0, users.size(), [&](std::size_t k) { lists[k] = model.recommend(users[k], n, true); }, threads);
  return lists;
}

MetricReport run_experiment(const ExperimentConfig& config, const SplitSet& splits, const std::string& dataset_label,
                            const ProgressSink& progress) {
  MetricReport report;
  report.dataset = dataset_label;
  report.hardware = hardware_description();
  report.seed = config.seed;
  report.folds = static_cast<int>(splits.folds.size());
  const std::size_t max_cutoff = *std::max_element(config.cutoffs.begin(), config.cutoffs.end());

  for (const auto& spec : config.algorithms) {
    const ParamMap params = resolve_params(spec);
    for (std::size_t f = 0; f < splits.folds.size(); ++f) {
      const Fold& fold = splits.folds[f];
      const int fold_id = static_cast<int>(f);
      std::vector<MetricCell> cells;
      try {
        auto model = make_recommender(spec.algorithm, params, config.seed + f);
        say(progress, spec.algorithm + ": fold " + std::to_string(f) + " training");
        const auto t_train = Clock::now();
        model->fit(fold.train);
        const double train_seconds = seconds_since(t_train);

        const auto t_eval = Clock::now();
        const auto lists = recommend_all(*model, max_cutoff, config.threads);
        for (std::size_t k : config.cutoffs) {
          const auto ctx = EvalContext::build(fold.train, fold.test, k);
          const auto ev = evaluate(lists, ctx);
          MetricCell cell;
          cell.algorithm = spec.algorithm;
          cell.fold = fold_id;
          cell.cutoff = k;
          cell.values = ev.values;
          cell.users_evaluated = ev.users_evaluated;
          cell.users_excluded = fold.non_evaluable.size();
          cell.train_seconds = train_seconds;
          cell.warnings = ev.warnings;
          cells.push_back(std::move(cell));
        }
        const double eval_seconds = seconds_since(t_eval);
        for (auto& c : cells) c.eval_seconds = eval_seconds;
        say(progress, spec.algorithm + ": fold " + std::to_string(f) + " done (train " +
                          std::to_string(train_seconds) + " s, eval " + std::to_string(eval_seconds) + " s)");
      } catch (const std::exception& e) {
        cells.clear();
        for (std::size_t k : config.cutoffs) {
          MetricCell cell;
          cell.algorithm = spec.algorithm;
          cell.fold = fold_id;
          cell.cutoff = k;
          cell.failed = true;
          cell.error = e.what();
          cell.users_excluded = fold.non_evaluable.size();
          cells.push_back(std::move(cell));
        }
        say(progress, spec.algorithm + ": fold " + std::to_string(f) + " FAILED: " + e.what());
      }
      for (auto& c : cells) report.cells.push_back(std::move(c));
    }
  }
  return report;
}

MetricReport run_experiment(const ExperimentConfig& config, const ProgressSink& progress) {
  if (config.threads > 0) set_default_thread_count(config.threads);
  say(progress, "preparing " + config.dataset.path);
  const auto prepared = prepare_dataset(config.dataset);
  say(progress, "after preprocessing: " + prepared.after.csv_row());
  const auto splits = split_repeated_holdout(prepared.matrix, config.test_fraction, config.repeats, config.seed);
  return run_experiment(config, splits, config.dataset.label, progress);
}

// ---------------------------------------------------------------- tuning

int default_trials(const SearchSpace& space) {
  const int base = space.parameters.size() >= 4 ? 50 : 20;
  if (auto n = space.cardinality(); n && *n < static_cast<std::size_t>(base)) return static_cast<int>(*n);
  return base;
}

namespace {

// Every point of a finite space, in mixed-radix order.
std::vector<ParamMap> enumerate_space(const SearchSpace& space) {
  std::vector<std::vector<ParamValue>> axes;
  for (const auto& h : space.parameters) {
    std::vector<ParamValue> values;
    if (h.sampling == Sampling::choice) values = h.choices;
    else if (h.integer)
      for (auto v = static_cast<std::int64_t>(h.low); v <= static_cast<std::int64_t>(h.high); ++v) values.push_back(v);
    else values.push_back(h.low);
    axes.push_back(std::move(values));
  }
  std::vector<ParamMap> out(1);
  for (std::size_t a = 0; a < axes.size(); ++a) {
    std::vector<ParamMap> next;
    for (const auto& partial : out)
      for (const auto& v : axes[a]) {
        ParamMap m = partial;
        m[space.parameters[a].name] = v;
        next.push_back(std::move(m));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

TuneResult random_search(const SearchSpace& space, int trials, std::uint64_t seed, const ParamMap& fixed,
                         const std::function<double(const ParamMap&)>& objective) {
  if (trials < 1) throw ConfigError("tuning needs at least one trial");
  // fixed values take their parameters out of the search
  SearchSpace free = space;
  std::erase_if(free.parameters, [&](const HyperParameter& h) { return fixed.contains(h.name); });
  std::vector<ParamMap> candidates;
  if (auto n = free.cardinality(); n && *n <= static_cast<std::size_t>(trials)) {
    candidates = enumerate_space(free);
  } else {
    Rng rng = make_rng(seed, 0x74756e65);
    for (int t = 0; t < trials; ++t) candidates.push_back(free.sample(rng));
  }
  TuneResult result;
  for (auto& params : candidates) {
    for (const auto& [k, v] : fixed) params[k] = v;
    TrialRecord rec;
    rec.params = params;
    try {
      const double score = objective(params);
      if (!std::isfinite(score)) throw NumericError("objective is not finite");
      rec.score = score;
      if (result.best_trial < 0 || score > result.best_score) {
        result.best_trial = static_cast<int>(result.trials.size());
        result.best_score = score;
        result.best = params;
      }
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    result.trials.push_back(std::move(rec));
  }
  if (result.best_trial < 0) {
    std::ostringstream msg;
    msg << "all " << result.trials.size() << " trials failed for " << space.algorithm << ':';
    for (std::size_t t = 0; t < result.trials.size(); ++t) msg << "\n  trial " << t << ": " << result.trials[t].error;
    throw Error(msg.str());
  }
  return result;
}

double validation_ndcg(const Recommender& model, const GroundTruth& validation, std::size_t k) {
  const auto& train = model.train();
  std::vector<UserIndex> users;
  for (UserIndex u = 0; u < train.n_users() && u < validation.size(); ++u)
    if (train.user_degree(u) > 0 && !validation[u].empty()) users.push_back(u);
  if (users.empty()) throw Error("validation split has no evaluable users");
  std::vector<double> per_user(users.size());
  parallel_for(0, users.size(), [&](std::size_t j) {
    const auto list = model.recommend(users[j], k, true);
    per_user[j] = ndcg_at_k(list.items, validation[users[j]], k);
  });
  double sum = 0.0;
  for (double v : per_user) sum += v;
  return sum / static_cast<double>(users.size());
}

TuneResult tune(const std::string& algorithm, const SearchSpace& space, int trials, const InteractionMatrix& train,
                std::uint64_t seed, const ParamMap& fixed, const ProgressSink& progress) {
  const auto split = carve_validation(train, 0.2, seed);
  int trial = 0;
  auto objective = [&](const ParamMap& params) {
    std::ostringstream desc;
    for (const auto& [k, v] : params) desc << ' ' << k << '=' << to_string(v);
    say(progress, algorithm + ": trial " + std::to_string(trial++) + desc.str());
    auto model = make_recommender(algorithm, params, seed);
    model->fit(split.train);
    return validation_ndcg(*model, split.validation, 10);
  };
  return random_search(space, trials, seed, fixed, objective);
}

}  // namespace recbench
