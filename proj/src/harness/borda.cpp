// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <fstream>
#include <numeric>

#include "recbench/harness.hpp"

namespace recbench {

namespace {

bool higher_is_better(Metric m) {
  switch (m) {
    case Metric::preo:
    case Metric::prsp:
    case Metric::arp: return false;
    default: return true;
  }
}

}  // namespace

std::vector<LeaderboardEntry> borda_count(const std::vector<Vote>& votes, const std::vector<std::string>& candidates) {
  const std::size_t c = candidates.size();
  std::map<std::string, LeaderboardEntry> board;
  for (const auto& name : candidates) board[name].algorithm = name;

  for (const auto& vote : votes) {
    const std::string key = vote.dataset + "/" + vote.metric;
    std::vector<std::pair<std::string, double>> entries;
    for (const auto& name : candidates) {
      auto it = vote.values.find(name);
      if (it == vote.values.end()) throw MissingCellError("missing cell " + key + "/" + name);
      entries.emplace_back(name, vote.higher_is_better ? it->second : -it->second);
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    for (std::size_t start = 0; start < c;) {
      std::size_t end = start + 1;
      while (end < c && entries[end].second == entries[start].second) ++end;
      // positions start..end-1 share the mean of their points
      const double mean_rank = 0.5 * static_cast<double>(start + end - 1);
      const double points = static_cast<double>(c - 1) - mean_rank;
      for (std::size_t r = start; r < end; ++r) {
        auto& e = board[entries[r].first];
        e.points += points;
        e.ranks[key] = mean_rank;
      }
      start = end;
    }
  }

  std::vector<LeaderboardEntry> out;
  for (auto& [name, e] : board) out.push_back(std::move(e));
  std::sort(out.begin(), out.end(), [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
    return a.points != b.points ? a.points > b.points : a.algorithm < b.algorithm;
  });
  return out;
}

std::vector<Vote> votes_from_reports(const std::vector<MetricReport>& reports, const std::vector<Metric>& metrics,
                                     std::size_t cutoff) {
  std::vector<Vote> votes;
  for (const auto& report : reports) {
    for (Metric m : metrics) {
      Vote v{report.dataset, metric_name(m), {}, higher_is_better(m)};
      for (const auto& a : report.algorithms())
        if (auto mean = report.fold_mean(a, cutoff, m)) v.values[a] = *mean;
      votes.push_back(std::move(v));
    }
  }
  return votes;
}

std::vector<Vote> load_vote_table(const std::string& path, const std::vector<Metric>& metrics) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vote table '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty vote table", 1);
  const auto header = split_string(line, ",");
  if (header.size() < 3 || trim(header[0]) != "dataset" || trim(header[1]) != "algorithm")
    throw ParseError(path + ": header must start with dataset,algorithm", 1);
  std::vector<std::size_t> column(metrics.size());
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) {
      auto parsed = parse_metric(trim(h));
      return parsed && *parsed == metrics[m];
    });
    if (it == header.end()) throw ConfigError(path + ": no column for metric " + metric_name(metrics[m]));
    column[m] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<std::string> datasets;
  std::map<std::string, std::map<std::string, std::vector<double>>> rows;  // dataset -> algorithm -> values
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line).starts_with('#')) continue;
    const auto fields = split_string(line, ",");
    if (fields.size() != header.size()) throw ParseError(path + ": wrong field count", line_no);
    const std::string dataset = trim(fields[0]);
    const std::string algorithm = trim(fields[1]);
    if (std::find(datasets.begin(), datasets.end(), dataset) == datasets.end()) datasets.push_back(dataset);
    std::vector<double> values;
    for (std::size_t col : column) {
      const auto v = parse_param_value(fields[col]);
      if (auto d = std::get_if<double>(&v)) values.push_back(*d);
      else if (auto i = std::get_if<std::int64_t>(&v)) values.push_back(static_cast<double>(*i));
      else throw ParseError(path + ": non-numeric value '" + fields[col] + "'", line_no);
    }
    rows[dataset][algorithm] = std::move(values);
  }

  std::vector<Vote> votes;
  for (const auto& d : datasets) {
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      Vote v{d, metric_name(metrics[m]), {}, higher_is_better(metrics[m])};
      for (const auto& [algorithm, values] : rows[d]) v.values[algorithm] = values[m];
      votes.push_back(std::move(v));
    }
  }
  return votes;
}

}  // namespace recbench
