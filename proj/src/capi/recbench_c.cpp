// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "recbench/recbench.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "json.hpp"
#include "recbench/harness.hpp"

using nlohmann::json;

struct rb_config {
  recbench::ExperimentConfig cfg;
};

struct rb_dataset {
  recbench::PreparedDataset data;
};

struct rb_splits {
  recbench::SplitSet splits;
};

struct rb_report {
  recbench::MetricReport report;
};

namespace {

thread_local std::string last_error;

template <typename F>
rb_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return RB_OK;
  } catch (const recbench::ParseError& e) {
    last_error = e.what();
    return RB_PARSE;
  } catch (const recbench::IoError& e) {
    last_error = e.what();
    return RB_IO;
  } catch (const recbench::DatasetVanishedError& e) {
    last_error = e.what();
    return RB_DATASET_VANISHED;
  } catch (const recbench::ConfigError& e) {
    last_error = e.what();
    return RB_CONFIG;
  } catch (const recbench::NumericError& e) {
    last_error = e.what();
    return RB_NUMERIC;
  } catch (const recbench::MissingCellError& e) {
    last_error = e.what();
    return RB_MISSING_CELL;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return RB_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return RB_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return RB_INTERNAL;
  }
}

rb_status invalid(const char* what) {
  last_error = what;
  return RB_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

recbench::ProgressSink make_sink(rb_progress_fn fn, void* user) {
  if (fn == nullptr) return {};
  return [fn, user](const std::string& msg) { fn(msg.c_str(), user); };
}

json param_json(const recbench::ParamMap& params) {
  json out = json::object();
  for (const auto& [k, v] : params) std::visit([&out, &k](const auto& x) { out[k] = x; }, v);
  return out;
}

std::vector<recbench::Metric> parse_metric_list(const char* text) {
  std::vector<recbench::Metric> out;
  for (const auto& name : recbench::split_string(text, ",")) {
    const auto trimmed = recbench::trim(name);
    if (trimmed.empty()) continue;
    auto m = recbench::parse_metric(trimmed);
    if (!m) throw recbench::ConfigError("unknown metric '" + trimmed + "'");
    out.push_back(*m);
  }
  if (out.empty()) throw recbench::ConfigError("no metrics given");
  return out;
}

}  // namespace

extern "C" {

const char* rb_last_error(void) { return last_error.c_str(); }

const char* rb_status_name(rb_status status) {
  switch (status) {
    case RB_OK: return "ok";
    case RB_INVALID_ARGUMENT: return "invalid argument";
    case RB_IO: return "io error";
    case RB_PARSE: return "parse error";
    case RB_DATASET_VANISHED: return "dataset vanished";
    case RB_CONFIG: return "configuration error";
    case RB_NUMERIC: return "numeric error";
    case RB_MISSING_CELL: return "missing cell";
    case RB_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rb_version(void) { return "1.0.0"; }

void rb_string_free(char* s) { std::free(s); }

// ---- configuration

rb_status rb_config_load(const char* path, rb_config** out) {
  if (path == nullptr || out == nullptr) return invalid("rb_config_load: null argument");
  *out = nullptr;
  return guard([&] { *out = new rb_config{recbench::load_config(path)}; });
}

void rb_config_free(rb_config* cfg) { delete cfg; }

const char* rb_config_output_dir(const rb_config* cfg) { return cfg ? cfg->cfg.output_dir.c_str() : ""; }

rb_status rb_config_set_output_dir(rb_config* cfg, const char* dir) {
  if (cfg == nullptr || dir == nullptr || *dir == '\0') return invalid("rb_config_set_output_dir: bad argument");
  cfg->cfg.output_dir = dir;
  return RB_OK;
}

rb_status rb_config_set_threads(rb_config* cfg, unsigned threads) {
  if (cfg == nullptr) return invalid("rb_config_set_threads: null config");
  cfg->cfg.threads = threads;
  return RB_OK;
}

size_t rb_config_algorithm_count(const rb_config* cfg) { return cfg ? cfg->cfg.algorithms.size() : 0; }

const char* rb_config_algorithm_name(const rb_config* cfg, size_t index) {
  if (cfg == nullptr || index >= cfg->cfg.algorithms.size()) return nullptr;
  return cfg->cfg.algorithms[index].algorithm.c_str();
}

// ---- datasets

rb_status rb_dataset_prepare(const rb_config* cfg, rb_dataset** out) {
  if (cfg == nullptr || out == nullptr) return invalid("rb_dataset_prepare: null argument");
  *out = nullptr;
  return guard([&] { *out = new rb_dataset{recbench::prepare_dataset(cfg->cfg.dataset)}; });
}

void rb_dataset_free(rb_dataset* ds) { delete ds; }

rb_status rb_dataset_stats(const rb_dataset* ds, int before, rb_stats* out) {
  if (ds == nullptr || out == nullptr) return invalid("rb_dataset_stats: null argument");
  const auto& s = before ? ds->data.before : ds->data.after;
  *out = {s.interactions, s.users, s.items, s.density};
  return RB_OK;
}

rb_status rb_dataset_write(const rb_dataset* ds, const char* path) {
  if (ds == nullptr || path == nullptr) return invalid("rb_dataset_write: null argument");
  return guard([&] { recbench::write_interactions_tsv(path, ds->data.matrix); });
}

rb_status rb_stats_csv(const rb_stats* stats, char** header_out, char** row_out) {
  if (stats == nullptr || header_out == nullptr || row_out == nullptr) return invalid("rb_stats_csv: null argument");
  return guard([&] {
    recbench::DatasetStats s{stats->interactions, stats->users, stats->items, stats->density};
    *header_out = dup_string(s.csv_header());
    *row_out = dup_string(s.csv_row());
  });
}

// ---- splits

rb_status rb_split(const rb_dataset* ds, const rb_config* cfg, rb_splits** out) {
  if (ds == nullptr || cfg == nullptr || out == nullptr) return invalid("rb_split: null argument");
  *out = nullptr;
  return guard([&] {
    *out = new rb_splits{recbench::split_repeated_holdout(ds->data.matrix, cfg->cfg.test_fraction, cfg->cfg.repeats,
                                                          cfg->cfg.seed)};
  });
}

void rb_splits_free(rb_splits* splits) { delete splits; }

size_t rb_splits_fold_count(const rb_splits* splits) { return splits ? splits->splits.folds.size() : 0; }

rb_status rb_splits_fold_sizes(const rb_splits* splits, size_t fold, uint64_t* train_size, uint64_t* test_size) {
  if (splits == nullptr || fold >= splits->splits.folds.size()) return invalid("rb_splits_fold_sizes: bad fold");
  const auto& f = splits->splits.folds[fold];
  if (train_size) *train_size = f.train.nnz();
  if (test_size) *test_size = f.test_size();
  return RB_OK;
}

rb_status rb_splits_write(const rb_splits* splits, const rb_config* cfg, const char* dir) {
  if (splits == nullptr || cfg == nullptr || dir == nullptr) return invalid("rb_splits_write: null argument");
  return guard([&] {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw recbench::IoError("cannot create '" + std::string(dir) + "': " + ec.message());
    const auto& s = splits->splits;
    for (std::size_t f = 0; f < s.folds.size(); ++f) {
      const auto stem = (fs::path(dir) / ("fold" + std::to_string(f))).string();
      recbench::write_interactions_tsv(stem + "_train.tsv", s.folds[f].train);
      recbench::write_ground_truth_tsv(stem + "_test.tsv", s.folds[f].test, s.folds[f].train);
    }
    recbench::ManifestInfo info{cfg->cfg.dataset.path, cfg->cfg.dataset.threshold.value_or(-1.0),
                                cfg->cfg.dataset.pcore};
    recbench::write_manifest((fs::path(dir) / "manifest.json").string(), s, info);
  });
}

// ---- tuning and runs

rb_status rb_tune(const rb_config* cfg, const rb_splits* splits, const char* algorithm, int trials,
                  rb_progress_fn progress, void* user_data, char** json_out) {
  if (cfg == nullptr || splits == nullptr || algorithm == nullptr || json_out == nullptr)
    return invalid("rb_tune: null argument");
  if (splits->splits.folds.empty()) return invalid("rb_tune: no folds");
  if (trials < 0) return invalid("rb_tune: negative trial count");
  return guard([&] {
    recbench::ParamMap fixed;
    for (const auto& a : cfg->cfg.algorithms)
      if (a.algorithm == algorithm) fixed = a.overrides;
    const auto space = recbench::search_space(algorithm);
    const int n = trials > 0 ? trials : recbench::default_trials(space);
    const auto result = recbench::tune(algorithm, space, n, splits->splits.folds.front().train, cfg->cfg.seed, fixed,
                                       make_sink(progress, user_data));
    json doc;
    doc["algorithm"] = algorithm;
    doc["best"] = param_json(result.best);
    doc["best_ndcg_at_10"] = result.best_score;
    doc["best_trial"] = result.best_trial;
    json rows = json::array();
    for (const auto& t : result.trials) {
      json row;
      row["params"] = param_json(t.params);
      row["ndcg_at_10"] = t.score ? json(*t.score) : json(nullptr);
      if (!t.error.empty()) row["error"] = t.error;
      rows.push_back(std::move(row));
    }
    doc["trials"] = std::move(rows);
    *json_out = dup_string(doc.dump(2) + "\n");
  });
}

rb_status rb_run(const rb_config* cfg, const rb_splits* splits, rb_progress_fn progress, void* user_data,
                 rb_report** out) {
  if (cfg == nullptr || out == nullptr) return invalid("rb_run: null argument");
  *out = nullptr;
  return guard([&] {
    if (cfg->cfg.threads > 0) recbench::set_default_thread_count(cfg->cfg.threads);
    auto sink = make_sink(progress, user_data);
    if (splits != nullptr)
      *out = new rb_report{recbench::run_experiment(cfg->cfg, splits->splits, cfg->cfg.dataset.label, sink)};
    else
      *out = new rb_report{recbench::run_experiment(cfg->cfg, sink)};
  });
}

void rb_report_free(rb_report* report) { delete report; }

rb_status rb_report_load(const char* path, rb_report** out) {
  if (path == nullptr || out == nullptr) return invalid("rb_report_load: null argument");
  *out = nullptr;
  return guard([&] { *out = new rb_report{recbench::load_report(path)}; });
}

rb_status rb_report_save(const rb_report* report, const char* path) {
  if (report == nullptr || path == nullptr) return invalid("rb_report_save: null argument");
  return guard([&] { recbench::save_report(report->report, path); });
}

int rb_report_ok(const rb_report* report) { return report != nullptr && report->report.all_succeeded() ? 1 : 0; }

rb_status rb_report_mean(const rb_report* report, const char* algorithm, size_t cutoff, const char* metric,
                         double* out) {
  if (report == nullptr || algorithm == nullptr || metric == nullptr || out == nullptr)
    return invalid("rb_report_mean: null argument");
  return guard([&] {
    auto m = recbench::parse_metric(metric);
    if (!m) throw recbench::ConfigError(std::string("unknown metric '") + metric + "'");
    auto v = report->report.fold_mean(algorithm, cutoff, *m);
    if (!v)
      throw recbench::MissingCellError(std::string("no successful cells for ") + algorithm + " @" +
                                       std::to_string(cutoff));
    *out = *v;
  });
}

rb_status rb_report_emit(const rb_report* report, rb_format format, const char* dir, const char* stem) {
  if (report == nullptr || dir == nullptr) return invalid("rb_report_emit: null argument");
  return guard([&] {
    const auto f = format == RB_FORMAT_CSV    ? recbench::ReportFormat::csv
                   : format == RB_FORMAT_JSON ? recbench::ReportFormat::json
                                              : recbench::ReportFormat::markdown;
    recbench::emit_report(report->report, {}, f, dir, stem ? stem : "report");
  });
}

// ---- aggregation

rb_status rb_borda(const char* const* report_paths, size_t n_reports, const char* table_path, const char* metrics,
                   size_t cutoff, rb_format format, char** out) {
  if (metrics == nullptr || out == nullptr) return invalid("rb_borda: null argument");
  if (table_path == nullptr && (report_paths == nullptr || n_reports == 0))
    return invalid("rb_borda: give report paths or a table");
  return guard([&] {
    const auto metric_list = parse_metric_list(metrics);
    std::vector<recbench::Vote> votes;
    if (table_path != nullptr) {
      votes = recbench::load_vote_table(table_path, metric_list);
    } else {
      std::vector<recbench::MetricReport> reports;
      for (size_t i = 0; i < n_reports; ++i) reports.push_back(recbench::load_report(report_paths[i]));
      votes = recbench::votes_from_reports(reports, metric_list, cutoff);
    }
    std::vector<std::string> candidates;
    for (const auto& v : votes)
      for (const auto& [name, value] : v.values)
        if (std::find(candidates.begin(), candidates.end(), name) == candidates.end()) candidates.push_back(name);
    const auto board = recbench::borda_count(votes, candidates);
    if (format == RB_FORMAT_JSON) {
      json doc = json::array();
      for (const auto& e : board) doc.push_back({{"algorithm", e.algorithm}, {"points", e.points}, {"ranks", e.ranks}});
      *out = dup_string(doc.dump(2) + "\n");
    } else if (format == RB_FORMAT_CSV) {
      std::string text = "rank,algorithm,points\n";
      for (std::size_t i = 0; i < board.size(); ++i)
        text += std::to_string(i + 1) + "," + board[i].algorithm + "," + recbench::to_string(board[i].points) + "\n";
      *out = dup_string(text);
    } else {
      *out = dup_string(recbench::leaderboard_markdown(board));
    }
  });
}

rb_status rb_correlate(const rb_report* report, size_t cutoff, double threshold, rb_format format, char** out) {
  if (report == nullptr || out == nullptr) return invalid("rb_correlate: null argument");
  return guard([&] {
    const auto entries = recbench::report_correlations(report->report, cutoff, threshold);
    if (format == RB_FORMAT_JSON) {
      json doc = json::array();
      for (const auto& e : entries)
        doc.push_back({{"a", e.a}, {"b", e.b}, {"r", e.r ? json(*e.r) : json(nullptr)}, {"flagged", e.flagged}});
      *out = dup_string(doc.dump(2) + "\n");
    } else if (format == RB_FORMAT_CSV) {
      std::string text = "metric_a,metric_b,r,flagged\n";
      for (const auto& e : entries)
        text += e.a + "," + e.b + "," + (e.r ? recbench::to_string(*e.r) : std::string("undefined")) + "," +
                (e.flagged ? "1" : "0") + "\n";
      *out = dup_string(text);
    } else {
      *out = dup_string(recbench::correlation_markdown(entries));
    }
  });
}

}  // extern "C"
