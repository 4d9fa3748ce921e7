// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "recbench/harness.hpp"

using namespace recbench;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = RECBENCH_FIXTURE_DIR;

const char* kMinimal = R"(
[dataset]
path = ratings.csv
[experiment]
cutoffs = 20, 10, 10
repeats = 3
test_fraction = 0.25
seed = 11
output = somewhere
[algorithms]
MostPop =
EASE = preset:movielens l2=10
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const std::string& name) : path(fs::temp_directory_path() / ("recbench_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() { fs::remove_all(path); }
};

ExperimentConfig toy_config(std::vector<std::string> keep = {}) {
  auto cfg = load_config(kFixtures + "/toy.ini");
  if (!keep.empty())
    std::erase_if(cfg.algorithms, [&](const AlgorithmSpec& a) {
      return std::find(keep.begin(), keep.end(), a.algorithm) == keep.end();
    });
  return cfg;
}

MetricCell cell(const std::string& a, int fold, std::size_t k, double ndcg) {
  MetricCell c;
  c.algorithm = a;
  c.fold = fold;
  c.cutoff = k;
  c.values[static_cast<std::size_t>(Metric::ndcg)] = ndcg;
  c.values[static_cast<std::size_t>(Metric::recall)] = ndcg / 2;
  return c;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config parsing") {
  const auto cfg = parse_config(kMinimal, "/data");
  CHECK(cfg.dataset.path == "/data/ratings.csv");
  CHECK(cfg.dataset.label == "ratings");
  CHECK(cfg.cutoffs == std::vector<std::size_t>{10, 20});
  CHECK(cfg.repeats == 3);
  CHECK(cfg.seed == 11);
  REQUIRE(cfg.algorithms.size() == 2);
  CHECK(cfg.algorithms[1].preset == "movielens");
  CHECK(std::get<std::int64_t>(cfg.algorithms[1].overrides.at("l2")) == 10);
  const auto params = resolve_params(cfg.algorithms[1]);
  CHECK(param_real(params, "l2", 0) == 10.0);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("[dataset]\npath = x\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[dataset]\npath = x\n[extra]\na = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nrepeats = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[dataset]\npath = x\n[experiment]\nrepeats = 6\ntest_fraction = 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[dataset]\npath = x\n[experiment]\ncutoffs = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[dataset]\npath = x\n[algorithms]\nNoSuchModel =\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[dataset]\npath = x\n[algorithms]\nEASE = l2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[dataset]\npath = x\n[algorithms]\nEASE = preset:mars\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/recbench.ini"), IoError);
}

TEST_CASE("output directory comes from the environment when set") {
  ::setenv(kOutputDirEnv, "/tmp/from-env", 1);
  const auto cfg = parse_config(kMinimal);
  ::unsetenv(kOutputDirEnv);
  CHECK(cfg.output_dir == "/tmp/from-env");
  CHECK(parse_config(kMinimal).output_dir == "somewhere");
}

TEST_CASE("every preset resolves to a working model") {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& p : presets()) {
    seen.insert({p.algorithm, p.dataset});
    AlgorithmSpec spec{p.algorithm, p.dataset, {}};
    CHECK_NOTHROW(make_recommender(p.algorithm, resolve_params(spec), 1));
  }
  CHECK(seen.size() == algorithm_names().size() * preset_datasets().size());
  CHECK_THROWS_AS(find_preset("EASE", "netflix"), ConfigError);
}

TEST_CASE("presets outside their search space are exactly the known ones") {
  std::set<std::string> found;
  for (const auto& p : presets())
    for (const auto& msg : search_space(p.algorithm).violations(p.values))
      found.insert(p.dataset + ":" + msg.substr(0, msg.find(' ')));
  const std::set<std::string> expected = {"movielens:iALS.reg", "amazon:iALS.reg", "epinions:iALS.reg",
                                          "amazon:NeuMF.batch_size"};
  CHECK(found == expected);
}

TEST_CASE("search space sampling stays in range") {
  for (const auto& name : algorithm_names()) {
    if (name == "Random") continue;
    const auto space = search_space(name);
    Rng rng = make_rng(3);
    for (int t = 0; t < 50; ++t) CHECK(space.violations(space.sample(rng)).empty());
  }
  CHECK(default_trials(search_space("EASE")) == 20);
  CHECK(default_trials(search_space("SLIM")) >= 1);
}

TEST_CASE("Borda count over the reference accuracy fixture") {
  const std::vector<Metric> metrics = {Metric::ndcg, Metric::map, Metric::mrr, Metric::precision, Metric::recall, Metric::f1};
  const auto votes = load_vote_table(kFixtures + "/borda_at10.csv", metrics);
  REQUIRE(votes.size() == 18);
  std::vector<std::string> candidates;
  for (const auto& [a, v] : votes.front().values) candidates.push_back(a);
  REQUIRE(candidates.size() == 12);
  const auto board = borda_count(votes, candidates);

  const std::map<std::string, double> reference = {
      {"EASE", 185},   {"RP3beta", 169}, {"SLIM", 160}, {"UserKNN", 154}, {"MF2020", 115}, {"ItemKNN", 99},
      {"MultiVAE", 92}, {"iALS", 90},    {"NeuMF", 61}, {"BPRMF", 45},   {"MostPop", 18}, {"Random", 0}};
  for (const auto& e : board) CHECK(std::abs(e.points - reference.at(e.algorithm)) <= 4.0);
  CHECK(board.front().algorithm == "EASE");
  std::set<std::string> top4;
  for (int r = 0; r < 4; ++r) top4.insert(board[r].algorithm);
  CHECK(top4 == std::set<std::string>{"EASE", "RP3beta", "SLIM", "UserKNN"});

  double total = 0;
  for (const auto& e : board) total += e.points;
  CHECK(total == 18.0 * 12 * 11 / 2);

  // the ceiling for one dataset and one metric
  const std::vector<Vote> one = {votes.front()};
  CHECK(borda_count(votes, candidates).front().points <= 11.0 * 6 * 3);
  double one_max = 0;
  for (const auto& e : borda_count(one, candidates)) one_max = std::max(one_max, e.points);
  CHECK(one_max == 11.0);
}

TEST_CASE("Borda maxima and tie sharing") {
  std::vector<Vote> votes;
  for (const auto* d : {"a", "b", "c"})
    for (const auto* m : {"m1", "m2", "m3", "m4", "m5", "m6"}) {
      Vote v{d, m, {}, true};
      for (int c = 0; c < 12; ++c) v.values["alg" + std::to_string(c)] = c;
      votes.push_back(v);
    }
  std::vector<std::string> cands;
  for (int c = 0; c < 12; ++c) cands.push_back("alg" + std::to_string(c));
  CHECK(borda_count(votes, cands).front().points == 198.0);
  CHECK(borda_count(votes, cands).front().algorithm == "alg11");
  CHECK(borda_count({votes.front()}, cands).front().points * 6 == 66.0);  // 11 per vote
  CHECK(11 * 1 * 3 == 33);

  Vote tie{"d", "m", {{"x", 1.0}, {"y", 1.0}, {"z", 0.5}}, true};
  const auto board = borda_count({tie}, {"x", "y", "z"});
  CHECK(board[0].points == 1.5);
  CHECK(board[1].points == 1.5);
  CHECK(board[2].points == 0.0);

  Vote lower{"d", "ARP", {{"x", 10.0}, {"y", 5.0}}, false};
  CHECK(borda_count({lower}, {"x", "y"}).front().algorithm == "y");

  Vote missing{"d", "m", {{"x", 1.0}}, true};
  CHECK_THROWS_AS(borda_count({missing}, {"x", "y"}), MissingCellError);
}

TEST_CASE("Borda points depend only on ranks") {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vote> votes, transformed;
    std::vector<std::string> cands = {"a", "b", "c", "d", "e"};
    for (int v = 0; v < 4; ++v) {
      Vote x{"ds", "m" + std::to_string(v), {}, true};
      for (const auto& c : cands) x.values[c] = std::round(u(rng) * 5) / 5;  // forces some ties
      Vote y = x;
      for (auto& [c, val] : y.values) val = std::exp(3 * val) + 7;
      votes.push_back(x);
      transformed.push_back(y);
    }
    const auto a = borda_count(votes, cands), b = borda_count(transformed, cands);
    double total = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].algorithm == b[i].algorithm);
      CHECK(a[i].points == b[i].points);
      total += a[i].points;
    }
    CHECK(total == doctest::Approx(4.0 * 5 * 4 / 2));
  }
}

TEST_CASE("vote table errors") {
  ScratchDir dir("votes");
  const auto bad = dir.path / "bad.csv";
  std::ofstream(bad) << "dataset,algorithm,nDCG\nml,EASE,abc\n";
  CHECK_THROWS_AS(load_vote_table(bad.string(), {Metric::ndcg}), ParseError);
  CHECK_THROWS_AS(load_vote_table(bad.string(), {Metric::map}), ConfigError);
  const auto empty = dir.path / "empty.csv";
  std::ofstream(empty) << "";
  CHECK_THROWS_AS(load_vote_table(empty.string(), {Metric::ndcg}), ParseError);
  CHECK_THROWS_AS(load_vote_table((dir.path / "none.csv").string(), {Metric::ndcg}), IoError);
}

TEST_CASE("fold means and report round trip") {
  MetricReport r;
  r.dataset = "toy";
  r.folds = 2;
  r.cells = {cell("A", 0, 10, 0.2), cell("A", 1, 10, 0.4), cell("B", 0, 10, 0.1), cell("B", 1, 10, 0.3)};
  r.cells[3].failed = true;
  r.cells[3].error = "boom, \"quoted\"";
  CHECK(*r.fold_mean("A", 10, Metric::ndcg) == doctest::Approx(0.3));
  CHECK_FALSE(r.fold_mean("B", 10, Metric::ndcg).has_value());
  CHECK_FALSE(r.fold_mean("A", 20, Metric::ndcg).has_value());
  CHECK_FALSE(r.all_succeeded());

  const auto back = report_from_json(report_to_json(r));
  CHECK(back.dataset == "toy");
  REQUIRE(back.cells.size() == 4);
  CHECK(back.cells[3].failed);
  CHECK(back.cells[3].error == r.cells[3].error);
  for (std::size_t i = 0; i < 4; ++i) CHECK(back.cells[i].values == r.cells[i].values);
  CHECK_THROWS_AS(report_from_json("{not json"), ParseError);
  CHECK_THROWS_AS(report_from_json("{}"), ParseError);
}

TEST_CASE("markdown tables have one column per header") {
  MetricReport r;
  r.dataset = "toy";
  for (const auto* a : {"A", "B", "C"})
    for (int f = 0; f < 2; ++f) r.cells.push_back(cell(a, f, 10, 0.1 * (a[0] - 'A' + 1) + 0.01 * f));
  const auto md = report_markdown(r, {});
  std::istringstream lines(md);
  std::string line;
  std::size_t header_pipes = 0;
  int tables = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] != '|') {
      header_pipes = 0;
      continue;
    }
    const auto pipes = static_cast<std::size_t>(std::count(line.begin(), line.end(), '|'));
    if (header_pipes == 0) header_pipes = pipes, ++tables;
    CHECK(pipes == header_pipes);
  }
  CHECK(tables >= 4);
  CHECK(md.find("| Metric A | Metric B |") != std::string::npos);
  CHECK(leaderboard_markdown({}).find("| Rank |") == 0);
}

TEST_CASE("run_experiment on the toy corpus") {
  auto cfg = toy_config({"Random", "MostPop"});
  const auto report = run_experiment(cfg);
  CHECK(report.all_succeeded());
  CHECK(report.cells.size() == 2 * 2 * 2);  // algorithms x folds x cutoffs
  CHECK(report.folds == 2);
  CHECK(report.cutoffs() == std::vector<std::size_t>{5, 10});
  CHECK(*report.fold_mean("Random", 10, Metric::ic) > *report.fold_mean("MostPop", 10, Metric::ic));
  CHECK(*report.fold_mean("MostPop", 10, Metric::ic) == doctest::Approx(10.0).epsilon(0.5));

  ScratchDir a("run_a"), b("run_b");
  emit_report(report, {}, ReportFormat::csv, a.path.string());
  emit_report(run_experiment(cfg), {}, ReportFormat::csv, b.path.string());
  CHECK(slurp(a.path / "report.csv") == slurp(b.path / "report.csv"));
  CHECK(fs::exists(a.path / "report_timing.csv"));
  const auto written = emit_report(report, {}, ReportFormat::json, a.path.string(), "r");
  CHECK(load_report(written.front()).cells.size() == report.cells.size());
}

TEST_CASE("no algorithm ever recommends a train item") {
  const auto cfg = toy_config();
  REQUIRE(cfg.algorithms.size() == 12);
  const auto prepared = prepare_dataset(cfg.dataset);
  const auto splits = split_repeated_holdout(prepared.matrix, 0.2, 2, 5);
  for (const auto& spec : cfg.algorithms) {
    CAPTURE(spec.algorithm);
    for (const auto& fold : splits.folds) {
      auto model = make_recommender(spec.algorithm, resolve_params(spec), 9);
      model->fit(fold.train);
      for (const auto& list : recommend_all(*model, 20)) {
        CHECK(list.items.size() <= 20);
        for (ItemIndex i : list.items) CHECK_FALSE(fold.train.contains(list.user, i));
      }
    }
  }
}

TEST_CASE("failed cells are reported and do not stop the run") {
  auto cfg = toy_config({"MostPop", "EASE"});
  cfg.algorithms[1].overrides["l2"] = std::int64_t{-5};  // rejected when the model is built
  const auto report = run_experiment(cfg);
  CHECK_FALSE(report.all_succeeded());
  CHECK(report.cells.size() == 2 * 2 * 2);
  CHECK(report.fold_mean("MostPop", 10, Metric::ndcg).has_value());
  CHECK(report_markdown(report, {}).find("## Failed cells") != std::string::npos);
}

TEST_CASE("random search") {
  SearchSpace one{"EASE", {{"l2", Sampling::choice, false, 0, 0, {ParamValue{5.0}}}}};
  int calls = 0;
  auto result = random_search(one, 20, 1, {}, [&](const ParamMap&) { return ++calls, 0.5; });
  CHECK(result.trials.size() == 1);
  CHECK(calls == 1);

  // a pinned parameter leaves nothing to search
  SearchSpace range{"EASE", {{"l2", Sampling::log_uniform, false, 1.0, 1e4, {}}}};
  result = random_search(range, 20, 1, {{"l2", 7.0}}, [](const ParamMap& p) { return param_real(p, "l2", 0); });
  CHECK(result.trials.size() == 1);
  CHECK(param_real(result.best, "l2", 0) == 7.0);

  // monotone objective: the best trial is the largest sample
  result = random_search(range, 30, 4, {}, [](const ParamMap& p) { return param_real(p, "l2", 0); });
  REQUIRE(result.trials.size() == 30);
  double largest = 0;
  for (const auto& t : result.trials) largest = std::max(largest, *t.score);
  CHECK(result.best_score == largest);

  auto failing = [](const ParamMap&) -> double { throw NumericError("diverged"); };
  CHECK_THROWS_WITH_AS(random_search(range, 3, 1, {}, failing), doctest::Contains("diverged"), Error);
  CHECK_THROWS_AS(random_search(range, 0, 1, {}, failing), ConfigError);
}

TEST_CASE("tuning on the toy corpus") {
  const auto cfg = toy_config();
  const auto prepared = prepare_dataset(cfg.dataset);
  const auto train = split_repeated_holdout(prepared.matrix, 0.2, 2, 5).folds.front().train;
  const auto result = tune("MostPop", search_space("MostPop"), 5, train, 3);
  CHECK(result.best.empty());
  CHECK(result.trials.size() == 1);
  const auto ease = tune("EASE", search_space("EASE"), 4, train, 3);
  CHECK(ease.trials.size() == 4);
  CHECK(ease.best_score >= 0.0);
  CHECK(ease.best_score <= 1.0);
}

}  // TEST_SUITE
