/*
 * SPDX-FileCopyrightText: (c) 2026 The recbench Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef RECBENCH_H
#define RECBENCH_H

#include <stddef.h>
#include <stdint.h>

#ifndef RB_API
#define RB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rb_status {
  RB_OK = 0,
  RB_INVALID_ARGUMENT = 1,
  RB_IO = 2,
  RB_PARSE = 3,
  RB_DATASET_VANISHED = 4,
  RB_CONFIG = 5,
  RB_NUMERIC = 6,
  RB_MISSING_CELL = 7,
  RB_INTERNAL = 8
} rb_status;

typedef enum rb_format { RB_FORMAT_CSV = 0, RB_FORMAT_JSON = 1, RB_FORMAT_MARKDOWN = 2 } rb_format;

typedef struct rb_config rb_config;
typedef struct rb_dataset rb_dataset;
typedef struct rb_splits rb_splits;
typedef struct rb_report rb_report;

typedef struct rb_stats {
  uint64_t interactions;
  uint64_t users;
  uint64_t items;
  double density;
} rb_stats;

typedef void (*rb_progress_fn)(const char* message, void* user_data);

/* Message for the most recent failure on the calling thread ("" if none). */
RB_API const char* rb_last_error(void);
RB_API const char* rb_status_name(rb_status status);
RB_API const char* rb_version(void);

/* Strings returned through char** out-parameters are released here. */
RB_API void rb_string_free(char* s);

/* ---- configuration ---- */

RB_API rb_status rb_config_load(const char* path, rb_config** out);
RB_API void rb_config_free(rb_config* cfg);
RB_API const char* rb_config_output_dir(const rb_config* cfg);
RB_API rb_status rb_config_set_output_dir(rb_config* cfg, const char* dir);
RB_API rb_status rb_config_set_threads(rb_config* cfg, unsigned threads);
RB_API size_t rb_config_algorithm_count(const rb_config* cfg);
RB_API const char* rb_config_algorithm_name(const rb_config* cfg, size_t index);

/* ---- datasets ---- */

/* Load, binarize and p-core filter the dataset named in the config. */
RB_API rb_status rb_dataset_prepare(const rb_config* cfg, rb_dataset** out);
RB_API void rb_dataset_free(rb_dataset* ds);
/* before != 0 selects the statistics of the raw file. */
RB_API rb_status rb_dataset_stats(const rb_dataset* ds, int before, rb_stats* out);
/* One "user<TAB>item" line per interaction, external ids. */
RB_API rb_status rb_dataset_write(const rb_dataset* ds, const char* path);
RB_API rb_status rb_stats_csv(const rb_stats* stats, char** header_out, char** row_out);

/* ---- splits ---- */

RB_API rb_status rb_split(const rb_dataset* ds, const rb_config* cfg, rb_splits** out);
RB_API void rb_splits_free(rb_splits* splits);
RB_API size_t rb_splits_fold_count(const rb_splits* splits);
RB_API rb_status rb_splits_fold_sizes(const rb_splits* splits, size_t fold, uint64_t* train_size, uint64_t* test_size);
/* Writes fold<i>_train.tsv, fold<i>_test.tsv and manifest.json into dir. */
RB_API rb_status rb_splits_write(const rb_splits* splits, const rb_config* cfg, const char* dir);

/* ---- tuning and runs ---- */

/* Random search for one configured algorithm on the first fold's training
 * part; trials = 0 picks the default. The result is a JSON document. */
RB_API rb_status rb_tune(const rb_config* cfg, const rb_splits* splits, const char* algorithm, int trials,
                         rb_progress_fn progress, void* user_data, char** json_out);

RB_API rb_status rb_run(const rb_config* cfg, const rb_splits* splits, rb_progress_fn progress, void* user_data,
                        rb_report** out);
RB_API void rb_report_free(rb_report* report);
RB_API rb_status rb_report_load(const char* path, rb_report** out);
RB_API rb_status rb_report_save(const rb_report* report, const char* path);
/* Non-zero when no (algorithm, fold) cell failed. */
RB_API int rb_report_ok(const rb_report* report);
RB_API rb_status rb_report_mean(const rb_report* report, const char* algorithm, size_t cutoff, const char* metric,
                                double* out);
/* Writes <stem>.csv + <stem>_timing.csv, <stem>.json or <stem>.md. */
RB_API rb_status rb_report_emit(const rb_report* report, rb_format format, const char* dir, const char* stem);

/* ---- aggregation ---- */

/* Borda count over report files, or over a CSV table of metric values
 * when table_path is non-NULL. metrics is comma separated. The result is
 * JSON or markdown according to format. */
RB_API rb_status rb_borda(const char* const* report_paths, size_t n_reports, const char* table_path,
                          const char* metrics, size_t cutoff, rb_format format, char** out);

/* Pearson correlations between metric columns across algorithms. */
RB_API rb_status rb_correlate(const rb_report* report, size_t cutoff, double threshold, rb_format format, char** out);

#ifdef __cplusplus
}
#endif

#endif /* RECBENCH_H */
