// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0
//
// Exercises the shared library through recbench.h only.

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "recbench/recbench.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kFixtures = RECBENCH_FIXTURE_DIR;

struct Handles {
  rb_config* cfg = nullptr;
  rb_dataset* ds = nullptr;
  rb_splits* sp = nullptr;
  rb_report* rep = nullptr;
  ~Handles() {
    rb_report_free(rep);
    rb_splits_free(sp);
    rb_dataset_free(ds);
    rb_config_free(cfg);
  }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  rb_string_free(s);
  return out;
}

void count_progress(const char*, void* data) { ++*static_cast<int*>(data); }

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("argument and error reporting") {
  rb_config* cfg = nullptr;
  CHECK(rb_config_load(nullptr, &cfg) == RB_INVALID_ARGUMENT);
  CHECK(std::string(rb_last_error()).size() > 0);
  CHECK(rb_config_load("/nonexistent/x.ini", &cfg) == RB_IO);
  CHECK(cfg == nullptr);
  CHECK(std::string(rb_last_error()).find("/nonexistent/x.ini") != std::string::npos);
  CHECK(std::string(rb_status_name(RB_MISSING_CELL)).size() > 0);
  CHECK(std::string(rb_version()).size() > 0);
  CHECK(rb_report_ok(nullptr) == 0);
  rb_config_free(nullptr);
  rb_string_free(nullptr);
}

TEST_CASE("output directory precedence") {
  Handles h;
  REQUIRE(rb_config_load((kFixtures + "/toy.ini").c_str(), &h.cfg) == RB_OK);
  CHECK(std::string(rb_config_output_dir(h.cfg)) == "out");
  rb_config_free(h.cfg);
  h.cfg = nullptr;

  ::setenv("RECBENCH_OUTPUT_DIR", "/tmp/env-out", 1);
  const auto status = rb_config_load((kFixtures + "/toy.ini").c_str(), &h.cfg);
  ::unsetenv("RECBENCH_OUTPUT_DIR");
  REQUIRE(status == RB_OK);
  CHECK(std::string(rb_config_output_dir(h.cfg)) == "/tmp/env-out");
  CHECK(rb_config_set_output_dir(h.cfg, "/tmp/flag-out") == RB_OK);
  CHECK(std::string(rb_config_output_dir(h.cfg)) == "/tmp/flag-out");
  CHECK(rb_config_algorithm_count(h.cfg) == 12);
  CHECK(std::string(rb_config_algorithm_name(h.cfg, 0)) == "Random");
}

TEST_CASE("prepare, split, run and aggregate the toy corpus") {
  const fs::path out = fs::temp_directory_path() / "recbench_capi";
  fs::remove_all(out);
  Handles h;
  REQUIRE(rb_config_load((kFixtures + "/toy.ini").c_str(), &h.cfg) == RB_OK);
  REQUIRE(rb_dataset_prepare(h.cfg, &h.ds) == RB_OK);
  rb_stats after{};
  REQUIRE(rb_dataset_stats(h.ds, 0, &after) == RB_OK);
  CHECK(after.interactions == 465);
  CHECK(after.users == 60);
  CHECK(after.items == 40);

  REQUIRE(rb_split(h.ds, h.cfg, &h.sp) == RB_OK);
  REQUIRE(rb_splits_fold_count(h.sp) == 2);
  std::uint64_t train = 0, test = 0;
  REQUIRE(rb_splits_fold_sizes(h.sp, 1, &train, &test) == RB_OK);
  CHECK(train + test == 465);
  CHECK(rb_splits_fold_sizes(h.sp, 2, &train, &test) == RB_INVALID_ARGUMENT);
  REQUIRE(rb_splits_write(h.sp, h.cfg, (out / "splits").c_str()) == RB_OK);
  CHECK(fs::exists(out / "splits" / "manifest.json"));

  int calls = 0;
  REQUIRE(rb_run(h.cfg, h.sp, count_progress, &calls, &h.rep) == RB_OK);
  CHECK(calls > 0);
  CHECK(rb_report_ok(h.rep) == 1);
  double ndcg = -1;
  REQUIRE(rb_report_mean(h.rep, "EASE", 10, "nDCG", &ndcg) == RB_OK);
  CHECK(ndcg > 0.0);
  CHECK(ndcg <= 1.0);
  CHECK(rb_report_mean(h.rep, "EASE", 7, "nDCG", &ndcg) == RB_MISSING_CELL);
  CHECK(rb_report_mean(h.rep, "EASE", 10, "RMSE", &ndcg) == RB_CONFIG);

  for (rb_format f : {RB_FORMAT_CSV, RB_FORMAT_JSON, RB_FORMAT_MARKDOWN})
    REQUIRE(rb_report_emit(h.rep, f, out.c_str(), "toy") == RB_OK);
  CHECK(fs::exists(out / "toy.csv"));
  CHECK(fs::exists(out / "toy_timing.csv"));
  CHECK(fs::exists(out / "toy.md"));

  rb_report* loaded = nullptr;
  REQUIRE(rb_report_load((out / "toy.json").c_str(), &loaded) == RB_OK);
  double again = -1;
  REQUIRE(rb_report_mean(loaded, "EASE", 10, "nDCG", &again) == RB_OK);
  CHECK(again == doctest::Approx(ndcg));
  rb_report_free(loaded);

  char* text = nullptr;
  REQUIRE(rb_correlate(h.rep, 10, 0.9, RB_FORMAT_JSON, &text) == RB_OK);
  const auto corr = json::parse(take(text));
  CHECK(corr.size() == 15 * 14 / 2);

  const std::string report_path = (out / "toy.json").string();
  const char* paths[] = {report_path.c_str()};
  REQUIRE(rb_borda(paths, 1, nullptr, "nDCG,Recall", 10, RB_FORMAT_JSON, &text) == RB_OK);
  const auto board = json::parse(take(text));
  REQUIRE(board.size() == 12);
  double total = 0;
  for (const auto& e : board) total += e.at("points").get<double>();
  CHECK(total == 2.0 * 12 * 11 / 2);
  fs::remove_all(out);
}

TEST_CASE("Borda over a metric table") {
  char* text = nullptr;
  REQUIRE(rb_borda(nullptr, 0, (kFixtures + "/borda_at10.csv").c_str(), "nDCG,MAP,MRR,Precision,Recall,F1", 10,
                   RB_FORMAT_CSV, &text) == RB_OK);
  const std::string csv = take(text);
  CHECK(csv.rfind("rank,algorithm,points\n1,EASE,", 0) == 0);
  CHECK(rb_borda(nullptr, 0, nullptr, "nDCG", 10, RB_FORMAT_JSON, &text) == RB_INVALID_ARGUMENT);
  CHECK(rb_borda(nullptr, 0, (kFixtures + "/borda_at10.csv").c_str(), "nDCG,Bogus", 10, RB_FORMAT_JSON, &text) ==
        RB_CONFIG);
}

TEST_CASE("tuning returns every trial") {
  Handles h;
  REQUIRE(rb_config_load((kFixtures + "/toy.ini").c_str(), &h.cfg) == RB_OK);
  REQUIRE(rb_dataset_prepare(h.cfg, &h.ds) == RB_OK);
  REQUIRE(rb_split(h.ds, h.cfg, &h.sp) == RB_OK);
  char* text = nullptr;
  REQUIRE(rb_tune(h.cfg, h.sp, "ItemKNN", 3, nullptr, nullptr, &text) == RB_OK);
  const auto doc = json::parse(take(text));
  CHECK(doc.at("algorithm") == "ItemKNN");
  CHECK(doc.at("trials").size() >= 1);
  CHECK(doc.at("best_ndcg_at_10").get<double>() >= 0.0);
  CHECK(rb_tune(h.cfg, h.sp, "NoSuchModel", 3, nullptr, nullptr, &text) == RB_CONFIG);
  CHECK(rb_tune(h.cfg, h.sp, "EASE", -1, nullptr, nullptr, &text) == RB_INVALID_ARGUMENT);
}

}  // TEST_SUITE
