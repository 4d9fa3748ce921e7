// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"
#include "recbench/harness.hpp"

namespace recbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<Metric> kAccuracy = {Metric::ndcg, Metric::map, Metric::mrr,
                                       Metric::precision, Metric::recall, Metric::f1};
const std::vector<Metric> kBeyond = {Metric::ic,   Metric::gini, Metric::efd,  Metric::epc, Metric::preo,
                                     Metric::prsp, Metric::aplt, Metric::aclt, Metric::arp};

std::string fixed(double v, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace

// ---------------------------------------------------------------- JSON

std::string report_to_json(const MetricReport& report) {
  json doc;
  doc["dataset"] = report.dataset;
  doc["hardware"] = report.hardware;
  doc["seed"] = report.seed;
  doc["folds"] = report.folds;
  json cells = json::array();
  for (const auto& c : report.cells) {
    json cell;
    cell["algorithm"] = c.algorithm;
    cell["fold"] = c.fold;
    cell["cutoff"] = c.cutoff;
    cell["failed"] = c.failed;
    if (c.failed) cell["error"] = c.error;
    json values;
    for (Metric m : all_metrics()) values[metric_name(m)] = c.values[static_cast<std::size_t>(m)];
    cell["values"] = values;
    cell["train_seconds"] = c.train_seconds;
    cell["eval_seconds"] = c.eval_seconds;
    cell["users_evaluated"] = c.users_evaluated;
    cell["users_excluded"] = c.users_excluded;
    cell["warnings"] = c.warnings;
    cells.push_back(std::move(cell));
  }
  doc["cells"] = std::move(cells);
  json means = json::object();
  for (const auto& a : report.algorithms()) {
    for (std::size_t k : report.cutoffs()) {
      auto fm = report.fold_means(a, k);
      if (!fm) continue;
      json row;
      for (Metric m : all_metrics()) row[metric_name(m)] = (*fm)[static_cast<std::size_t>(m)];
      means[a][std::to_string(k)] = row;
    }
  }
  doc["fold_means"] = std::move(means);
  return doc.dump(2) + "\n";
}

MetricReport report_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("report JSON: ") + e.what(), 0);
  }
  try {
    MetricReport r;
    r.dataset = doc.at("dataset").get<std::string>();
    r.hardware = doc.value("hardware", std::string());
    r.seed = doc.value("seed", std::uint64_t{0});
    r.folds = doc.value("folds", 0);
    for (const auto& cell : doc.at("cells")) {
      MetricCell c;
      c.algorithm = cell.at("algorithm").get<std::string>();
      c.fold = cell.at("fold").get<int>();
      c.cutoff = cell.at("cutoff").get<std::size_t>();
      c.failed = cell.value("failed", false);
      c.error = cell.value("error", std::string());
      const auto& values = cell.at("values");
      for (Metric m : all_metrics()) c.values[static_cast<std::size_t>(m)] = values.at(metric_name(m)).get<double>();
      c.train_seconds = cell.value("train_seconds", 0.0);
      c.eval_seconds = cell.value("eval_seconds", 0.0);
      c.users_evaluated = cell.value("users_evaluated", std::size_t{0});
      c.users_excluded = cell.value("users_excluded", std::size_t{0});
      c.warnings = cell.value("warnings", std::vector<std::string>{});
      r.cells.push_back(std::move(c));
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what(), 0);
  }
}

MetricReport load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open report '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return report_from_json(text.str());
}

void save_report(const MetricReport& report, const std::string& path) { write_text(path, report_to_json(report)); }

// ---------------------------------------------------------------- correlations

std::vector<CorrelationEntry> report_correlations(const MetricReport& report, std::size_t cutoff, double threshold) {
  std::vector<std::string> columns;
  for (Metric m : all_metrics()) columns.push_back(metric_name(m));
  std::vector<std::vector<double>> rows;
  for (const auto& a : report.algorithms())
    if (auto fm = report.fold_means(a, cutoff)) rows.emplace_back(fm->begin(), fm->end());
  return pearson_correlations(columns, rows, threshold);
}

// ---------------------------------------------------------------- markdown

namespace {

std::string metric_table(const MetricReport& report, std::size_t cutoff, const std::vector<Metric>& metrics,
                         const std::vector<std::string>& order) {
  std::ostringstream out;
  out << "| Algorithm |";
  for (Metric m : metrics) out << ' ' << metric_name(m) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < metrics.size(); ++i) out << "---:|";
  out << '\n';
  for (const auto& a : order) {
    auto fm = report.fold_means(a, cutoff);
    out << "| " << a << " |";
    for (Metric m : metrics) {
      if (!fm) {
        out << " failed |";
        continue;
      }
      const double v = (*fm)[static_cast<std::size_t>(m)];
      out << ' ' << fixed(v, 3) << " |";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

std::string leaderboard_markdown(const std::vector<LeaderboardEntry>& leaderboard) {
  std::ostringstream out;
  out << "| Rank | Algorithm | Points |\n|---:|---|---:|\n";
  for (std::size_t i = 0; i < leaderboard.size(); ++i) {
    const double p = leaderboard[i].points;
    out << "| " << i + 1 << " | " << leaderboard[i].algorithm << " | "
        << (p == std::floor(p) ? fixed(p, 0) : fixed(p, 1)) << " |\n";
  }
  return out.str();
}

std::string correlation_markdown(const std::vector<CorrelationEntry>& entries) {
  std::ostringstream out;
  out << "| Metric A | Metric B | r | abs(r) > 0.9 |\n|---|---|---:|:---:|\n";
  for (const auto& e : entries)
    out << "| " << e.a << " | " << e.b << " | " << (e.r ? fixed(*e.r, 2) : std::string("undefined")) << " | "
        << (e.flagged ? "yes" : "") << " |\n";
  return out.str();
}

std::string report_markdown(const MetricReport& report, const std::vector<LeaderboardEntry>& leaderboard) {
  std::ostringstream out;
  out << "# Results: " << report.dataset << "\n\n";
  out << "Hardware: " << report.hardware << "  \n";
  out << "Seed: " << report.seed << ", folds: " << report.folds << "\n\n";

  const auto algorithms = report.algorithms();
  for (std::size_t k : report.cutoffs()) {
    // accuracy tables follow nDCG, descending; failed algorithms go last
    auto order = algorithms;
    std::stable_sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
      auto va = report.fold_mean(a, k, Metric::ndcg), vb = report.fold_mean(b, k, Metric::ndcg);
      if (va.has_value() != vb.has_value()) return va.has_value();
      return va && *va > *vb;
    });
    out << "## Accuracy @" << k << "\n\n" << metric_table(report, k, kAccuracy, order) << '\n';
    out << "## Beyond accuracy @" << k << "\n\n" << metric_table(report, k, kBeyond, order) << '\n';
  }

  auto by_time = algorithms;
  std::stable_sort(by_time.begin(), by_time.end(), [&](const std::string& a, const std::string& b) {
    return report.mean_train_seconds(a) > report.mean_train_seconds(b);
  });
  out << "## Timing (seconds, mean over folds)\n\n| Algorithm | Train | Recommend and evaluate |\n|---|---:|---:|\n";
  for (const auto& a : by_time)
    out << "| " << a << " | " << fixed(report.mean_train_seconds(a), 3) << " | " << fixed(report.mean_eval_seconds(a), 3)
        << " |\n";
  out << '\n';

  const auto cutoffs = report.cutoffs();
  if (!cutoffs.empty()) {
    const std::size_t k = std::find(cutoffs.begin(), cutoffs.end(), 10) != cutoffs.end() ? 10 : cutoffs.front();
    std::size_t usable = 0;
    for (const auto& a : algorithms) usable += report.fold_means(a, k).has_value();
    if (usable >= 3) out << "## Metric correlations @" << k << "\n\n" << correlation_markdown(report_correlations(report, k)) << '\n';
  }

  if (!leaderboard.empty()) out << "## Borda count\n\n" << leaderboard_markdown(leaderboard) << '\n';

  std::vector<const MetricCell*> failures;
  for (const auto& c : report.cells)
    if (c.failed) failures.push_back(&c);
  if (!failures.empty()) {
    out << "## Failed cells\n\n";
    for (const auto* c : failures)
      out << "- " << c->algorithm << ", fold " << c->fold << ", @" << c->cutoff << ": " << c->error << '\n';
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------- files

std::vector<std::string> emit_report(const MetricReport& report, const std::vector<LeaderboardEntry>& leaderboard,
                                     ReportFormat format, const std::string& directory, const std::string& stem) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoError("cannot create output directory '" + directory + "': " + ec.message());
  const fs::path base = fs::path(directory) / stem;
  std::vector<std::string> written;

  switch (format) {
    case ReportFormat::csv: {
      std::ostringstream metrics;
      metrics << "algorithm,fold,cutoff,status,users_evaluated,users_excluded";
      for (Metric m : all_metrics()) metrics << ',' << metric_name(m);
      metrics << ",error\n" << std::setprecision(12);
      std::ostringstream timing;
      timing << "algorithm,fold,train_seconds,eval_seconds\n" << std::setprecision(6);
      std::set<std::pair<std::string, int>> timed;
      for (const auto& c : report.cells) {
        metrics << csv_field(c.algorithm) << ',' << c.fold << ',' << c.cutoff << ',' << (c.failed ? "failed" : "ok")
                << ',' << c.users_evaluated << ',' << c.users_excluded;
        for (double v : c.values) metrics << ',' << v;
        metrics << ',' << csv_field(c.error) << '\n';
        if (timed.insert({c.algorithm, c.fold}).second)
          timing << csv_field(c.algorithm) << ',' << c.fold << ',' << c.train_seconds << ',' << c.eval_seconds << '\n';
      }
      write_text(base.string() + ".csv", metrics.str());
      write_text(base.string() + "_timing.csv", timing.str());
      written = {base.string() + ".csv", base.string() + "_timing.csv"};
      break;
    }
    case ReportFormat::json:
      write_text(base.string() + ".json", report_to_json(report));
      written = {base.string() + ".json"};
      break;
    case ReportFormat::markdown:
      write_text(base.string() + ".md", report_markdown(report, leaderboard));
      written = {base.string() + ".md"};
      break;
  }
  return written;
}

}  // namespace recbench
