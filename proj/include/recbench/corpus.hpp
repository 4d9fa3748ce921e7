// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef RECBENCH_CORPUS_HPP
#define RECBENCH_CORPUS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "recbench/common.hpp"

namespace recbench {

struct Interaction {
  std::string user;
  std::string item;
  double rating = 1.0;
  std::optional<std::int64_t> timestamp;
};

// Column layout of a delimited interaction file. Field positions are
// zero-based; rating and timestamp are optional.
struct FileFormat {
  std::string delimiter = ",";  // empty = any run of whitespace
  int user_column = 0;
  int item_column = 1;
  int rating_column = 2;     // -1: unary file, every rating is 1.0
  int timestamp_column = -1;
  bool has_header = false;

  static FileFormat csv();
  static FileFormat tsv();
  // "csv", "tsv", "dat" (the "::" separated MovieLens layout), "ws".
  static FileFormat named(const std::string& name);
  // Applies a column map such as "user,item,rating,timestamp" or
  // "user,item" (unary); unknown names are skipped columns ("_").
  void set_columns(const std::string& column_map);
};

struct RawDataset {
  std::vector<Interaction> interactions;
  std::string dedup_policy = "keep-last";
  std::size_t duplicates_dropped = 0;
};

struct DatasetStats {
  std::size_t interactions = 0;
  std::size_t users = 0;
  std::size_t items = 0;
  double density = 0.0;

  std::string csv_header() const;
  std::string csv_row() const;
};

DatasetStats compute_stats(const RawDataset& raw);

// Bidirectional external-id <-> dense-index map.
class IdMap {
 public:
  Index add(const std::string& external);  // returns existing index when present
  std::optional<Index> find(const std::string& external) const;
  const std::string& external(Index dense) const { return to_external_.at(dense); }
  std::size_t size() const { return to_external_.size(); }

 private:
  std::vector<std::string> to_external_;
  std::unordered_map<std::string, Index> to_dense_;
};

// Compressed sparse binary user x item matrix with a column (item -> users)
// index kept alongside. Rows hold strictly increasing item indices.
class InteractionMatrix {
 public:
  InteractionMatrix() = default;

  // Builds from (user, item) pairs over fixed dimensions; duplicates are
  // collapsed. Rows or columns may be empty (training folds).
  static InteractionMatrix from_pairs(std::size_t n_users, std::size_t n_items,
                                      std::vector<std::pair<UserIndex, ItemIndex>> pairs,
                                      std::shared_ptr<const IdMap> users = nullptr,
                                      std::shared_ptr<const IdMap> items = nullptr);

  std::size_t n_users() const { return n_users_; }
  std::size_t n_items() const { return n_items_; }
  std::size_t nnz() const { return cols_.size(); }

  std::span<const ItemIndex> items_of(UserIndex u) const {
    return {cols_.data() + row_ptr_[u], cols_.data() + row_ptr_[u + 1]};
  }
  std::span<const UserIndex> users_of(ItemIndex i) const {
    return {rows_.data() + col_ptr_[i], rows_.data() + col_ptr_[i + 1]};
  }
  std::size_t user_degree(UserIndex u) const { return row_ptr_[u + 1] - row_ptr_[u]; }
  std::size_t item_degree(ItemIndex i) const { return col_ptr_[i + 1] - col_ptr_[i]; }
  bool contains(UserIndex u, ItemIndex i) const;

  // All stored (user, item) pairs in row-major order.
  std::vector<std::pair<UserIndex, ItemIndex>> pairs() const;

  const std::shared_ptr<const IdMap>& user_ids() const { return users_; }
  const std::shared_ptr<const IdMap>& item_ids() const { return items_; }

  DatasetStats stats() const;

 private:
  std::size_t n_users_ = 0;
  std::size_t n_items_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<ItemIndex> cols_;
  std::vector<std::size_t> col_ptr_{0};
  std::vector<UserIndex> rows_;
  std::shared_ptr<const IdMap> users_;
  std::shared_ptr<const IdMap> items_;
};

// Per-user relevant item sets, each sorted ascending.
using GroundTruth = std::vector<std::vector<ItemIndex>>;

struct Fold {
  InteractionMatrix train;
  GroundTruth test;
  std::vector<UserIndex> non_evaluable;  // users with an empty train profile
  std::size_t test_size() const;
  std::uint64_t checksum() const;
};

struct SplitSet {
  std::vector<Fold> folds;
  int repeats = 0;
  double test_fraction = 0.0;
  std::uint64_t seed = 0;
};

RawDataset load_interactions(const std::string& path, const FileFormat& format);
// Same parser over in-memory text; `source` labels error messages.
RawDataset parse_interactions(const std::string& text, const FileFormat& format,
                              const std::string& source = "<memory>");

RawDataset binarize(const RawDataset& raw, double threshold = 3.0);

// Iterative p-core: alternately drops users then items with fewer than p
// interactions until nothing changes. Throws DatasetVanishedError when the
// fixed point is empty.
RawDataset pcore_filter(const RawDataset& raw, int p);

// Dense ids in first-appearance order.
InteractionMatrix build_matrix(const RawDataset& raw);

// Globally shuffles the interactions with `seed` and cuts them into
// `repeats` chunks of test_fraction * nnz each; fold i tests on chunk i.
SplitSet split_repeated_holdout(const InteractionMatrix& m, double test_fraction, int repeats,
                                std::uint64_t seed);

struct ValidationSplit {
  InteractionMatrix train;
  GroundTruth validation;
};

ValidationSplit carve_validation(const InteractionMatrix& train, double fraction, std::uint64_t seed);

struct ManifestInfo {
  std::string source;
  double threshold = 3.0;
  int p = 0;
};

// JSON manifest with seed, p, threshold and per-fold checksums.
void write_manifest(const std::string& path, const SplitSet& splits, const ManifestInfo& info);

// Writes "user<TAB>item" lines using external ids.
void write_interactions_tsv(const std::string& path, const InteractionMatrix& m);
void write_ground_truth_tsv(const std::string& path, const GroundTruth& truth, const InteractionMatrix& ids);

}  // namespace recbench

#endif  // RECBENCH_CORPUS_HPP
