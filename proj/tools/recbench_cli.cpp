// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the library only through recbench.h.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "recbench/recbench.h"

namespace {

namespace fs = std::filesystem;

constexpr int kExitFailure = 1;
constexpr int kExitPartial = 3;

struct Failure {
  int code;
};

void check(rb_status s, const char* what) {
  if (s == RB_OK) return;
  std::cerr << "recbench: " << what << ": " << rb_status_name(s) << ": " << rb_last_error() << '\n';
  throw Failure{kExitFailure};
}

struct ConfigDeleter {
  void operator()(rb_config* p) const { rb_config_free(p); }
};
struct DatasetDeleter {
  void operator()(rb_dataset* p) const { rb_dataset_free(p); }
};
struct SplitsDeleter {
  void operator()(rb_splits* p) const { rb_splits_free(p); }
};
struct ReportDeleter {
  void operator()(rb_report* p) const { rb_report_free(p); }
};
struct StringDeleter {
  void operator()(char* p) const { rb_string_free(p); }
};

using Config = std::unique_ptr<rb_config, ConfigDeleter>;
using Dataset = std::unique_ptr<rb_dataset, DatasetDeleter>;
using Splits = std::unique_ptr<rb_splits, SplitsDeleter>;
using Report = std::unique_ptr<rb_report, ReportDeleter>;
using String = std::unique_ptr<char, StringDeleter>;

void progress(const char* message, void*) { std::cerr << "[recbench] " << message << '\n'; }

Config open_config(const std::string& path, const std::string& output, unsigned threads) {
  rb_config* raw = nullptr;
  check(rb_config_load(path.c_str(), &raw), "loading config");
  Config cfg(raw);
  if (!output.empty()) check(rb_config_set_output_dir(cfg.get(), output.c_str()), "setting output directory");
  if (threads > 0) check(rb_config_set_threads(cfg.get(), threads), "setting threads");
  return cfg;
}

Dataset prepare(const rb_config* cfg) {
  rb_dataset* raw = nullptr;
  check(rb_dataset_prepare(cfg, &raw), "preparing dataset");
  return Dataset(raw);
}

Splits make_splits(const rb_dataset* ds, const rb_config* cfg) {
  rb_splits* raw = nullptr;
  check(rb_split(ds, cfg, &raw), "splitting");
  return Splits(raw);
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "recbench: cannot create '" << dir << "': " << ec.message() << '\n';
    throw Failure{kExitFailure};
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr || std::fwrite(text.data(), 1, text.size(), f) != text.size()) {
    if (f) std::fclose(f);
    std::cerr << "recbench: cannot write '" << path.string() << "'\n";
    throw Failure{kExitFailure};
  }
  std::fclose(f);
}

rb_format parse_format(const std::string& name) {
  if (name == "csv") return RB_FORMAT_CSV;
  if (name == "json") return RB_FORMAT_JSON;
  return RB_FORMAT_MARKDOWN;
}

std::string stats_line(const rb_stats& s) {
  char* header = nullptr;
  char* row = nullptr;
  check(rb_stats_csv(&s, &header, &row), "formatting stats");
  String h(header), r(row);
  return std::string(r.get()) + '\n';
}

std::string stats_header() {
  rb_stats zero{0, 0, 0, 0.0};
  char* header = nullptr;
  char* row = nullptr;
  check(rb_stats_csv(&zero, &header, &row), "formatting stats");
  String h(header), r(row);
  return std::string(h.get()) + '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recbench: top-N recommendation benchmark toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rb_version()));

  std::string config_path, output_dir;
  unsigned threads = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "experiment configuration (INI)")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", output_dir, "output directory (overrides config and environment)");
    sub->add_option("-j,--threads", threads, "worker threads (0 = all cores)");
  };

  auto* prep = app.add_subcommand("prep", "ingest, binarize and p-core filter; print dataset statistics");
  add_common(prep);

  auto* split = app.add_subcommand("split", "write the repeated-holdout folds and manifest");
  add_common(split);

  auto* tune = app.add_subcommand("tune", "random search on a validation split of the first fold");
  add_common(tune);
  std::vector<std::string> tune_algorithms;
  int trials = 0;
  tune->add_option("-a,--algorithm", tune_algorithms, "algorithms to tune (default: all configured)");
  tune->add_option("-t,--trials", trials, "trials per algorithm (default: 50 or 20 by space size)");

  auto* run = app.add_subcommand("run", "train and evaluate every configured algorithm on every fold");
  add_common(run);

  std::vector<std::string> report_paths;
  std::string table_path, metrics = "nDCG,MAP,MRR,Precision,Recall,F1", format = "markdown";
  std::size_t cutoff = 10;
  double threshold = 0.9;

  auto* borda = app.add_subcommand("borda", "Borda-count leaderboard over reports or a metric table");
  borda->add_option("-r,--report", report_paths, "report JSON files, one per dataset")->check(CLI::ExistingFile);
  borda->add_option("--table", table_path, "CSV table: dataset,algorithm,<metric>...")->check(CLI::ExistingFile);
  borda->add_option("-m,--metrics", metrics, "comma-separated metrics that vote");
  borda->add_option("-k,--cutoff", cutoff, "cutoff used from reports");
  borda->add_option("-f,--format", format, "markdown, json or csv")->check(CLI::IsMember({"markdown", "json", "csv"}));

  auto* correlate = app.add_subcommand("correlate", "Pearson correlations between metrics across algorithms");
  std::string single_report;
  correlate->add_option("-r,--report", single_report, "report JSON")->required()->check(CLI::ExistingFile);
  correlate->add_option("-k,--cutoff", cutoff, "cutoff");
  correlate->add_option("--threshold", threshold, "flag pairs with |r| above this");
  correlate->add_option("-f,--format", format, "markdown, json or csv")
      ->check(CLI::IsMember({"markdown", "json", "csv"}));

  auto* report = app.add_subcommand("report", "render a saved report as markdown, CSV or JSON");
  report->add_option("-r,--report", single_report, "report JSON")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--output", output_dir, "output directory")->required();
  report->add_option("-f,--format", format, "markdown, json or csv")->check(CLI::IsMember({"markdown", "json", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prep) {
      auto cfg = open_config(config_path, output_dir, threads);
      auto ds = prepare(cfg.get());
      rb_stats before{}, after{};
      check(rb_dataset_stats(ds.get(), 1, &before), "reading stats");
      check(rb_dataset_stats(ds.get(), 0, &after), "reading stats");
      const std::string header = "stage," + stats_header();
      const std::string text = header + "before," + stats_line(before) + "after," + stats_line(after);
      std::cout << text;
      const std::string out = rb_config_output_dir(cfg.get());
      make_dir(out);
      write_file(fs::path(out) / "stats.csv", text);
      check(rb_dataset_write(ds.get(), (fs::path(out) / "dataset.tsv").c_str()), "writing dataset");
      return 0;
    }

    if (*split) {
      auto cfg = open_config(config_path, output_dir, threads);
      auto ds = prepare(cfg.get());
      auto sp = make_splits(ds.get(), cfg.get());
      const auto dir = (fs::path(rb_config_output_dir(cfg.get())) / "splits").string();
      check(rb_splits_write(sp.get(), cfg.get(), dir.c_str()), "writing splits");
      for (std::size_t f = 0; f < rb_splits_fold_count(sp.get()); ++f) {
        std::uint64_t train = 0, test = 0;
        check(rb_splits_fold_sizes(sp.get(), f, &train, &test), "reading fold sizes");
        std::cout << "fold " << f << ": train " << train << ", test " << test << '\n';
      }
      std::cout << "wrote " << dir << '\n';
      return 0;
    }

    if (*tune) {
      auto cfg = open_config(config_path, output_dir, threads);
      auto ds = prepare(cfg.get());
      auto sp = make_splits(ds.get(), cfg.get());
      if (tune_algorithms.empty())
        for (std::size_t i = 0; i < rb_config_algorithm_count(cfg.get()); ++i)
          tune_algorithms.emplace_back(rb_config_algorithm_name(cfg.get(), i));
      const std::string out = rb_config_output_dir(cfg.get());
      make_dir(out);
      for (const auto& a : tune_algorithms) {
        char* json = nullptr;
        check(rb_tune(cfg.get(), sp.get(), a.c_str(), trials, progress, nullptr, &json), ("tuning " + a).c_str());
        String text(json);
        const auto path = fs::path(out) / ("tune_" + a + ".json");
        write_file(path, text.get());
        std::cout << a << ": " << path.string() << '\n';
      }
      return 0;
    }

    if (*run) {
      auto cfg = open_config(config_path, output_dir, threads);
      rb_report* raw = nullptr;
      check(rb_run(cfg.get(), nullptr, progress, nullptr, &raw), "running experiment");
      Report rep(raw);
      const std::string out = rb_config_output_dir(cfg.get());
      check(rb_report_emit(rep.get(), RB_FORMAT_JSON, out.c_str(), "report"), "writing JSON report");
      check(rb_report_emit(rep.get(), RB_FORMAT_CSV, out.c_str(), "report"), "writing CSV report");
      check(rb_report_emit(rep.get(), RB_FORMAT_MARKDOWN, out.c_str(), "report"), "writing markdown report");
      std::cout << "wrote " << (fs::path(out) / "report.{json,csv,md}").string() << '\n';
      if (!rb_report_ok(rep.get())) {
        std::cerr << "recbench: some (algorithm, fold) cells failed; see report.md\n";
        return kExitPartial;
      }
      return 0;
    }

    if (*borda) {
      if (report_paths.empty() == table_path.empty()) {
        std::cerr << "recbench borda: give either --report files or --table\n";
        return kExitFailure;
      }
      std::vector<const char*> paths;
      for (const auto& p : report_paths) paths.push_back(p.c_str());
      char* text = nullptr;
      check(rb_borda(paths.data(), paths.size(), table_path.empty() ? nullptr : table_path.c_str(), metrics.c_str(),
                     cutoff, parse_format(format), &text),
            "Borda count");
      String owned(text);
      std::cout << owned.get();
      return 0;
    }

    if (*correlate || *report) {
      rb_report* raw = nullptr;
      check(rb_report_load(single_report.c_str(), &raw), "loading report");
      Report rep(raw);
      if (*correlate) {
        char* text = nullptr;
        check(rb_correlate(rep.get(), cutoff, threshold, parse_format(format), &text), "correlating");
        String owned(text);
        std::cout << owned.get();
        return 0;
      }
      check(rb_report_emit(rep.get(), parse_format(format), output_dir.c_str(), "report"), "writing report");
      std::cout << "wrote report to " << output_dir << '\n';
      return 0;
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitFailure;
}
