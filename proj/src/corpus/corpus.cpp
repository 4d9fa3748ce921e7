// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "recbench/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace recbench {

FileFormat FileFormat::csv() { return FileFormat{}; }

FileFormat FileFormat::tsv() {
  FileFormat f;
  f.delimiter = "\t";
  return f;
}

FileFormat FileFormat::named(const std::string& name) {
  if (name == "csv") return csv();
  if (name == "tsv") return tsv();
  FileFormat f;
  if (name == "dat") {
    f.delimiter = "::";
    f.timestamp_column = 3;
    return f;
  }
  if (name == "ws") {
    f.delimiter.clear();
    return f;
  }
  throw ConfigError("unknown file format '" + name + "' (expected csv, tsv, dat or ws)");
}

void FileFormat::set_columns(const std::string& column_map) {
  user_column = item_column = rating_column = timestamp_column = -1;
  auto names = split_string(column_map, ",");
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string n = trim(names[i]);
    const int pos = static_cast<int>(i);
    if (n == "user") user_column = pos;
    else if (n == "item") item_column = pos;
    else if (n == "rating") rating_column = pos;
    else if (n == "timestamp") timestamp_column = pos;
  }
  if (user_column < 0 || item_column < 0)
    throw ConfigError("column map '" + column_map + "' must name both 'user' and 'item'");
}

std::string DatasetStats::csv_header() const { return "interactions,users,items,density"; }

std::string DatasetStats::csv_row() const {
  std::ostringstream os;
  os << interactions << ',' << users << ',' << items << ',' << std::setprecision(6) << density;
  return os.str();
}

DatasetStats compute_stats(const RawDataset& raw) {
  std::unordered_map<std::string, char> users, items;
  for (const auto& x : raw.interactions) {
    users.emplace(x.user, 0);
    items.emplace(x.item, 0);
  }
  DatasetStats s;
  s.interactions = raw.interactions.size();
  s.users = users.size();
  s.items = items.size();
  if (s.users && s.items)
    s.density = static_cast<double>(s.interactions) / (static_cast<double>(s.users) * static_cast<double>(s.items));
  return s;
}

Index IdMap::add(const std::string& external) {
  auto [it, inserted] = to_dense_.emplace(external, static_cast<Index>(to_external_.size()));
  if (inserted) to_external_.push_back(external);
  return it->second;
}

std::optional<Index> IdMap::find(const std::string& external) const {
  auto it = to_dense_.find(external);
  if (it == to_dense_.end()) return std::nullopt;
  return it->second;
}

InteractionMatrix InteractionMatrix::from_pairs(std::size_t n_users, std::size_t n_items,
                                                std::vector<std::pair<UserIndex, ItemIndex>> pairs,
                                                std::shared_ptr<const IdMap> users,
                                                std::shared_ptr<const IdMap> items) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  InteractionMatrix m;
  m.n_users_ = n_users;
  m.n_items_ = n_items;
  m.users_ = std::move(users);
  m.items_ = std::move(items);
  m.row_ptr_.assign(n_users + 1, 0);
  m.col_ptr_.assign(n_items + 1, 0);
  m.cols_.reserve(pairs.size());
  for (const auto& [u, i] : pairs) {
    if (u >= n_users || i >= n_items) throw Error("interaction index out of range");
    ++m.row_ptr_[u + 1];
    ++m.col_ptr_[i + 1];
    m.cols_.push_back(i);
  }
  std::partial_sum(m.row_ptr_.begin(), m.row_ptr_.end(), m.row_ptr_.begin());
  std::partial_sum(m.col_ptr_.begin(), m.col_ptr_.end(), m.col_ptr_.begin());

  // Row-major input order makes every column's user list ascending.
  m.rows_.resize(pairs.size());
  std::vector<std::size_t> fill(m.col_ptr_.begin(), m.col_ptr_.end() - 1);
  for (const auto& [u, i] : pairs) m.rows_[fill[i]++] = u;
  return m;
}

bool InteractionMatrix::contains(UserIndex u, ItemIndex i) const {
  auto row = items_of(u);
  return std::binary_search(row.begin(), row.end(), i);
}

std::vector<std::pair<UserIndex, ItemIndex>> InteractionMatrix::pairs() const {
  std::vector<std::pair<UserIndex, ItemIndex>> out;
  out.reserve(nnz());
  for (UserIndex u = 0; u < n_users_; ++u)
    for (ItemIndex i : items_of(u)) out.emplace_back(u, i);
  return out;
}

DatasetStats InteractionMatrix::stats() const {
  DatasetStats s;
  s.interactions = nnz();
  for (UserIndex u = 0; u < n_users_; ++u) s.users += user_degree(u) > 0;
  for (ItemIndex i = 0; i < n_items_; ++i) s.items += item_degree(i) > 0;
  if (s.users && s.items)
    s.density = static_cast<double>(s.interactions) / (static_cast<double>(s.users) * static_cast<double>(s.items));
  return s;
}

namespace {

template <typename T>
bool parse_number(const std::string& field, T& out) {
  const std::string t = trim(field);
  if (t.empty()) return false;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && p == t.data() + t.size();
}

}  // namespace

RawDataset parse_interactions(const std::string& text, const FileFormat& format, const std::string& source) {
  RawDataset raw;
  const int needed = std::max({format.user_column, format.item_column, format.rating_column, format.timestamp_column});

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_pending = format.has_header;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }

    auto fields = split_string(line, format.delimiter);
    if (static_cast<int>(fields.size()) <= needed)
      throw ParseError(source + ": expected at least " + std::to_string(needed + 1) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    Interaction x;
    x.user = trim(fields[format.user_column]);
    x.item = trim(fields[format.item_column]);
    if (x.user.empty() || x.item.empty()) throw ParseError(source + ": empty user or item id", line_no);
    if (format.rating_column >= 0) {
      if (!parse_number(fields[format.rating_column], x.rating) || !std::isfinite(x.rating))
        throw ParseError(source + ": rating '" + fields[format.rating_column] + "' is not a number", line_no);
    }
    if (format.timestamp_column >= 0) {
      std::int64_t ts = 0;
      if (!parse_number(fields[format.timestamp_column], ts))
        throw ParseError(source + ": timestamp '" + fields[format.timestamp_column] + "' is not an integer", line_no);
      x.timestamp = ts;
    }
    raw.interactions.push_back(std::move(x));
  }
  if (raw.interactions.empty()) throw Error(source + ": no interactions found (empty file)");

  // Duplicate (user, item) pairs: the last occurrence wins, at its position.
  std::unordered_map<std::string, std::size_t> last;
  last.reserve(raw.interactions.size());
  std::string key;
  for (std::size_t i = 0; i < raw.interactions.size(); ++i) {
    const auto& x = raw.interactions[i];
    key.assign(x.user).push_back('\x1f');
    key.append(x.item);
    last[key] = i;
  }
  if (last.size() != raw.interactions.size()) {
    std::vector<Interaction> kept;
    kept.reserve(last.size());
    for (std::size_t i = 0; i < raw.interactions.size(); ++i) {
      auto& x = raw.interactions[i];
      key.assign(x.user).push_back('\x1f');
      key.append(x.item);
      if (last[key] == i) kept.push_back(std::move(x));
    }
    raw.duplicates_dropped = raw.interactions.size() - kept.size();
    raw.interactions = std::move(kept);
  }
  return raw;
}

RawDataset load_interactions(const std::string& path, const FileFormat& format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open interaction file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_interactions(buf.str(), format, path);
}

RawDataset binarize(const RawDataset& raw, double threshold) {
  RawDataset out;
  out.dedup_policy = raw.dedup_policy;
  out.duplicates_dropped = raw.duplicates_dropped;
  for (const auto& x : raw.interactions) {
    if (x.rating > threshold) {
      Interaction y = x;
      y.rating = 1.0;
      out.interactions.push_back(std::move(y));
    }
  }
  return out;
}

RawDataset pcore_filter(const RawDataset& raw, int p) {
  if (p < 1) throw ConfigError("p-core requires p >= 1");
  IdMap users, items;
  std::vector<std::pair<Index, Index>> edges;
  edges.reserve(raw.interactions.size());
  for (const auto& x : raw.interactions) edges.emplace_back(users.add(x.user), items.add(x.item));

  std::vector<char> alive(edges.size(), 1);
  std::vector<std::size_t> udeg(users.size()), ideg(items.size());
  const auto threshold = static_cast<std::size_t>(p);

  auto drop_pass = [&](bool user_side) {
    auto& deg = user_side ? udeg : ideg;
    std::fill(deg.begin(), deg.end(), 0);
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (alive[e]) ++deg[user_side ? edges[e].first : edges[e].second];
    bool changed = false;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!alive[e]) continue;
      if (deg[user_side ? edges[e].first : edges[e].second] < threshold) {
        alive[e] = 0;
        changed = true;
      }
    }
    return changed;
  };

  for (;;) {
    const bool users_changed = drop_pass(true);
    const bool items_changed = drop_pass(false);
    if (!users_changed && !items_changed) break;
  }

  RawDataset out;
  out.dedup_policy = raw.dedup_policy;
  out.duplicates_dropped = raw.duplicates_dropped;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (alive[e]) out.interactions.push_back(raw.interactions[e]);
  if (out.interactions.empty())
    throw DatasetVanishedError("dataset vanished: the " + std::to_string(p) + "-core is empty");
  return out;
}

InteractionMatrix build_matrix(const RawDataset& raw) {
  if (raw.interactions.empty()) throw Error("cannot build a matrix from an empty dataset");
  auto users = std::make_shared<IdMap>();
  auto items = std::make_shared<IdMap>();
  std::vector<std::pair<UserIndex, ItemIndex>> pairs;
  pairs.reserve(raw.interactions.size());
  for (const auto& x : raw.interactions) pairs.emplace_back(users->add(x.user), items->add(x.item));
  const std::size_t nu = users->size(), ni = items->size();
  return InteractionMatrix::from_pairs(nu, ni, std::move(pairs), std::move(users), std::move(items));
}

std::size_t Fold::test_size() const {
  std::size_t n = 0;
  for (const auto& t : test) n += t.size();
  return n;
}

std::uint64_t Fold::checksum() const {
  Fnv1a h;
  for (std::size_t u = 0; u < test.size(); ++u)
    for (ItemIndex i : test[u]) {
      h.update_value(static_cast<std::uint32_t>(u));
      h.update_value(i);
    }
  return h.digest();
}

namespace {

// Cuts a shuffled pair list at [lo, hi) into a held-out set and the rest.
void partition_pairs(const InteractionMatrix& m, const std::vector<std::pair<UserIndex, ItemIndex>>& shuffled,
                     std::size_t lo, std::size_t hi, InteractionMatrix& train, GroundTruth& held_out) {
  std::vector<std::pair<UserIndex, ItemIndex>> kept;
  kept.reserve(shuffled.size() - (hi - lo));
  held_out.assign(m.n_users(), {});
  for (std::size_t k = 0; k < shuffled.size(); ++k) {
    if (k >= lo && k < hi) held_out[shuffled[k].first].push_back(shuffled[k].second);
    else kept.push_back(shuffled[k]);
  }
  for (auto& t : held_out) std::sort(t.begin(), t.end());
  train = InteractionMatrix::from_pairs(m.n_users(), m.n_items(), std::move(kept), m.user_ids(), m.item_ids());
}

}  // namespace

SplitSet split_repeated_holdout(const InteractionMatrix& m, double test_fraction, int repeats, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction must lie in (0, 1)");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (repeats * test_fraction > 1.0 + 1e-12) throw ConfigError("repeats * test_fraction must not exceed 1");

  auto shuffled = m.pairs();
  Rng rng = make_rng(seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);

  const double n = static_cast<double>(shuffled.size());
  SplitSet s;
  s.repeats = repeats;
  s.test_fraction = test_fraction;
  s.seed = seed;
  s.folds.resize(repeats);
  for (int f = 0; f < repeats; ++f) {
    auto lo = static_cast<std::size_t>(std::llround(f * test_fraction * n));
    auto hi = static_cast<std::size_t>(std::llround((f + 1) * test_fraction * n));
    hi = std::min(hi, shuffled.size());
    Fold& fold = s.folds[f];
    partition_pairs(m, shuffled, lo, hi, fold.train, fold.test);
    for (UserIndex u = 0; u < m.n_users(); ++u)
      if (fold.train.user_degree(u) == 0) fold.non_evaluable.push_back(u);
  }
  return s;
}

ValidationSplit carve_validation(const InteractionMatrix& train, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("validation fraction must lie in (0, 1)");
  auto shuffled = train.pairs();
  Rng rng = make_rng(seed, 0x76616c6964ULL);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto hi = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(shuffled.size())));
  ValidationSplit v;
  partition_pairs(train, shuffled, 0, hi, v.train, v.validation);
  return v;
}

void write_manifest(const std::string& path, const SplitSet& splits, const ManifestInfo& info) {
  nlohmann::json j;
  j["source"] = info.source;
  j["threshold"] = info.threshold;
  j["p"] = info.p;
  j["seed"] = splits.seed;
  j["repeats"] = splits.repeats;
  j["test_fraction"] = splits.test_fraction;
  j["folds"] = nlohmann::json::array();
  for (const auto& f : splits.folds) {
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << f.checksum();
    j["folds"].push_back({{"train_interactions", f.train.nnz()},
                          {"test_interactions", f.test_size()},
                          {"non_evaluable_users", f.non_evaluable.size()},
                          {"checksum", hex.str()}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest '" + path + "'");
  out << j.dump(2) << '\n';
}

void write_interactions_tsv(const std::string& path, const InteractionMatrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (UserIndex u = 0; u < m.n_users(); ++u)
    for (ItemIndex i : m.items_of(u))
      out << m.user_ids()->external(u) << '\t' << m.item_ids()->external(i) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_ground_truth_tsv(const std::string& path, const GroundTruth& truth, const InteractionMatrix& ids) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (std::size_t u = 0; u < truth.size(); ++u)
    for (ItemIndex i : truth[u])
      out << ids.user_ids()->external(static_cast<UserIndex>(u)) << '\t' << ids.item_ids()->external(i) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace recbench
