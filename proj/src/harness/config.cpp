// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "recbench/harness.hpp"
#include "recbench/memory_models.hpp"

namespace recbench {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::int64_t to_int(const std::string& key, const std::string& text) {
  const auto v = parse_param_value(text);
  if (auto i = std::get_if<std::int64_t>(&v)) return *i;
  throw ConfigError("'" + key + "' must be an integer, got '" + text + "'");
}

double to_real(const std::string& key, const std::string& text) {
  const auto v = parse_param_value(text);
  if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (auto d = std::get_if<double>(&v)) return *d;
  throw ConfigError("'" + key + "' must be a number, got '" + text + "'");
}

bool to_bool(const std::string& key, const std::string& text) {
  const auto v = parse_param_value(text);
  if (auto b = std::get_if<bool>(&v)) return *b;
  throw ConfigError("'" + key + "' must be true or false, got '" + text + "'");
}

}  // namespace

AlgorithmSpec parse_algorithm_spec(const std::string& algorithm, const std::string& value) {
  AlgorithmSpec spec;
  spec.algorithm = trim(algorithm);
  for (const auto& token : split_string(value, "")) {
    if (token.empty()) continue;
    if (token.starts_with("preset:")) {
      spec.preset = token.substr(7);
      if (spec.preset->empty()) throw ConfigError(spec.algorithm + ": empty preset name");
      continue;
    }
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError(spec.algorithm + ": expected key=value or preset:<tag>, got '" + token + "'");
    spec.overrides[token.substr(0, eq)] = parse_param_value(token.substr(eq + 1));
  }
  return spec;
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("config: " + e.message(), e.line());
  }

  ExperimentConfig cfg;
  bool have_dataset = false;
  for (const auto& [section, body] : tree) {
    if (section == "dataset") {
      have_dataset = true;
      std::string format_name = "csv", columns;
      std::optional<std::string> delimiter;
      std::optional<bool> header;
      for (const auto& [key, node] : body) {
        const std::string v = trim(node.data());
        if (key == "path") cfg.dataset.path = v;
        else if (key == "label") cfg.dataset.label = v;
        else if (key == "format") format_name = v;
        else if (key == "columns") columns = v;
        else if (key == "delimiter") delimiter = (v == "whitespace") ? std::string() : (v == "tab" ? "\t" : v);
        else if (key == "header") header = to_bool(key, v);
        else if (key == "threshold") {
          if (!v.empty() && v != "none") cfg.dataset.threshold = to_real(key, v);
        } else if (key == "pcore") cfg.dataset.pcore = static_cast<int>(to_int(key, v));
        else throw ConfigError("unknown key '" + key + "' in [dataset]");
      }
      cfg.dataset.format = FileFormat::named(format_name);
      if (!columns.empty()) cfg.dataset.format.set_columns(columns);
      if (delimiter) cfg.dataset.format.delimiter = *delimiter;
      if (header) cfg.dataset.format.has_header = *header;
    } else if (section == "experiment") {
      for (const auto& [key, node] : body) {
        const std::string v = trim(node.data());
        if (key == "cutoffs") {
          cfg.cutoffs.clear();
          for (const auto& c : split_string(v, ",")) {
            const auto k = to_int(key, trim(c));
            if (k < 1) throw ConfigError("cutoffs must be positive");
            cfg.cutoffs.push_back(static_cast<std::size_t>(k));
          }
          std::sort(cfg.cutoffs.begin(), cfg.cutoffs.end());
          cfg.cutoffs.erase(std::unique(cfg.cutoffs.begin(), cfg.cutoffs.end()), cfg.cutoffs.end());
        } else if (key == "repeats") cfg.repeats = static_cast<int>(to_int(key, v));
        else if (key == "test_fraction") cfg.test_fraction = to_real(key, v);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(key, v));
        else if (key == "output") cfg.output_dir = v;
        else if (key == "threads") cfg.threads = static_cast<unsigned>(to_int(key, v));
        else throw ConfigError("unknown key '" + key + "' in [experiment]");
      }
    } else if (section == "algorithms") {
      for (const auto& [key, node] : body) cfg.algorithms.push_back(parse_algorithm_spec(key, node.data()));
    } else {
      throw ConfigError("unknown config section [" + section + "]");
    }
  }

  if (!have_dataset || cfg.dataset.path.empty()) throw ConfigError("config needs [dataset] path");
  if (fs::path(cfg.dataset.path).is_relative()) cfg.dataset.path = (fs::path(base_dir) / cfg.dataset.path).string();
  if (cfg.dataset.label.empty()) cfg.dataset.label = fs::path(cfg.dataset.path).stem().string();
  if (cfg.dataset.pcore < 1) throw ConfigError("pcore must be >= 1");
  if (cfg.cutoffs.empty()) throw ConfigError("at least one cutoff is required");
  if (cfg.repeats < 1) throw ConfigError("repeats must be >= 1");
  if (!(cfg.test_fraction > 0 && cfg.test_fraction < 1) || cfg.repeats * cfg.test_fraction > 1.0 + 1e-12)
    throw ConfigError("need 0 < test_fraction < 1 and repeats * test_fraction <= 1");
  for (const auto& a : cfg.algorithms) {
    make_recommender(a.algorithm, resolve_params(a), 0);  // validates names, presets and values
  }
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') cfg.output_dir = env;
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  auto cfg = parse_config(text.str(), fs::path(path).parent_path().string());
  cfg.source = path;
  return cfg;
}

// ---------------------------------------------------------------- search spaces

namespace {

HyperParameter int_range(std::string name, double lo, double hi) {
  return {std::move(name), Sampling::uniform, true, lo, hi, {}};
}
HyperParameter real_range(std::string name, double lo, double hi, Sampling s = Sampling::uniform) {
  return {std::move(name), s, false, lo, hi, {}};
}
HyperParameter choice(std::string name, std::vector<ParamValue> values) {
  return {std::move(name), Sampling::choice, false, 0, 0, std::move(values)};
}
std::vector<ParamValue> ints(std::initializer_list<std::int64_t> v) { return {v.begin(), v.end()}; }

const std::vector<ParamValue> kFactorChoices = ints({8, 16, 32, 64, 128, 256});

bool same_value(const ParamValue& a, const ParamValue& b) {
  auto num = [](const ParamValue& v) -> std::optional<double> {
    if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (auto d = std::get_if<double>(&v)) return *d;
    return std::nullopt;
  };
  if (auto x = num(a), y = num(b); x && y) return *x == *y;
  return a == b;
}

}  // namespace

SearchSpace search_space(const std::string& algorithm) {
  SearchSpace s{algorithm, {}};
  auto& p = s.parameters;
  if (algorithm == "Random" || algorithm == "MostPop") {
  } else if (algorithm == "UserKNN" || algorithm == "ItemKNN") {
    p = {int_range("topK", 5, 1000),
         choice("similarity", {std::string("cosine"), std::string("jaccard"), std::string("dice"),
                               std::string("pearson"), std::string("euclidean")})};
  } else if (algorithm == "RP3beta") {
    p = {int_range("topK", 5, 1000), real_range("alpha", 0, 2), real_range("beta", 0, 2),
         choice("normalization", {true, false})};
  } else if (algorithm == "SLIM") {
    p = {int_range("topK", 5, 1000), real_range("l1_ratio", 1e-5, 1, Sampling::log_uniform),
         real_range("alpha", 0.01, 1)};
  } else if (algorithm == "EASE") {
    p = {real_range("l2", 1, 1e7, Sampling::log_uniform)};
  } else if (algorithm == "MF2020") {
    p = {choice("factors", kFactorChoices), int_range("epochs", 30, 100),
         real_range("learning_rate", 1e-5, 1, Sampling::log_uniform), real_range("reg", 1e-5, 0.1, Sampling::log_uniform),
         choice("negatives", ints({4, 6, 8}))};
  } else if (algorithm == "iALS") {
    p = {int_range("factors", 1, 200), choice("scaling", {std::string("linear"), std::string("log")}),
         real_range("alpha", 0.001, 50), real_range("epsilon", 0.001, 10), real_range("reg", 0.001, 0.01)};
  } else if (algorithm == "BPRMF") {
    p = {choice("factors", kFactorChoices), real_range("learning_rate", 1e-5, 1, Sampling::log_uniform),
         choice("batch_size", ints({128, 256, 512})), real_range("reg_user", 1e-5, 0.1, Sampling::log_uniform),
         real_range("reg_positive", 1e-5, 0.1, Sampling::log_uniform),
         real_range("reg_negative", 1e-5, 0.1, Sampling::log_uniform)};
  } else if (algorithm == "NeuMF") {
    p = {choice("factors", kFactorChoices), int_range("epochs", 30, 100),
         real_range("learning_rate", 1e-5, 1, Sampling::log_uniform), choice("batch_size", ints({128, 256, 512})),
         choice("negatives", ints({4, 6, 8}))};
  } else if (algorithm == "MultiVAE") {
    p = {int_range("epochs", 100, 300), real_range("learning_rate", 1e-5, 1, Sampling::log_uniform),
         choice("batch_size", ints({64, 128, 256})), int_range("intermediate", 400, 800),
         int_range("latent", 100, 400), real_range("reg", 1e-5, 1, Sampling::log_uniform)};
  } else {
    throw ConfigError("no search space for algorithm '" + algorithm + "'");
  }
  return s;
}

ParamMap SearchSpace::sample(Rng& rng) const {
  ParamMap out;
  for (const auto& h : parameters) {
    switch (h.sampling) {
      case Sampling::choice: {
        std::uniform_int_distribution<std::size_t> pick(0, h.choices.size() - 1);
        out[h.name] = h.choices[pick(rng)];
        break;
      }
      case Sampling::uniform:
        if (h.integer) {
          std::uniform_int_distribution<std::int64_t> d(static_cast<std::int64_t>(h.low),
                                                        static_cast<std::int64_t>(h.high));
          out[h.name] = d(rng);
        } else {
          out[h.name] = std::uniform_real_distribution<double>(h.low, h.high)(rng);
        }
        break;
      case Sampling::log_uniform: {
        const double x = std::exp(std::uniform_real_distribution<double>(std::log(h.low), std::log(h.high))(rng));
        if (h.integer) out[h.name] = static_cast<std::int64_t>(std::llround(x));
        else out[h.name] = std::clamp(x, h.low, h.high);
        break;
      }
    }
  }
  return out;
}

std::optional<std::size_t> SearchSpace::cardinality() const {
  std::size_t n = 1;
  for (const auto& h : parameters) {
    if (h.sampling == Sampling::choice) n *= h.choices.size();
    else if (h.low == h.high) continue;
    else if (h.integer && h.sampling == Sampling::uniform) n *= static_cast<std::size_t>(h.high - h.low + 1);
    else return std::nullopt;
  }
  return n;
}

std::vector<std::string> SearchSpace::violations(const ParamMap& params) const {
  std::vector<std::string> out;
  for (const auto& h : parameters) {
    auto it = params.find(h.name);
    if (it == params.end()) continue;
    const ParamValue& v = it->second;
    if (h.sampling == Sampling::choice) {
      ParamValue probe = v;
      if (h.name == "similarity") {
        if (auto s = std::get_if<std::string>(&v)) {
          try {
            probe = to_string(parse_similarity_kind(*s));
          } catch (const ConfigError&) {
          }
        }
      }
      const bool ok = std::any_of(h.choices.begin(), h.choices.end(),
                                  [&](const ParamValue& c) { return same_value(c, probe); });
      if (!ok) out.push_back(algorithm + "." + h.name + " = " + to_string(v) + " is not an allowed choice");
      continue;
    }
    double x = 0;
    if (auto i = std::get_if<std::int64_t>(&v)) x = static_cast<double>(*i);
    else if (auto d = std::get_if<double>(&v)) x = *d;
    else {
      out.push_back(algorithm + "." + h.name + " = " + to_string(v) + " is not numeric");
      continue;
    }
    if (x < h.low || x > h.high) {
      std::ostringstream msg;
      msg << algorithm << '.' << h.name << " = " << to_string(v) << " outside [" << h.low << ", " << h.high << ']';
      out.push_back(msg.str());
    } else if (h.integer && x != std::floor(x)) {
      out.push_back(algorithm + "." + h.name + " = " + to_string(v) + " is not an integer");
    }
  }
  return out;
}

// ---------------------------------------------------------------- presets

namespace {

ParamValue s(const char* v) { return std::string(v); }

std::vector<Preset> build_presets() {
  using I = std::int64_t;
  std::vector<Preset> p;
  auto add = [&p](const char* algorithm, const char* dataset, ParamMap values) {
    p.push_back({algorithm, dataset, std::move(values)});
  };
  // similarity "correlation" is the pearson kind.
  add("UserKNN", "movielens", {{"topK", I{117}}, {"similarity", s("pearson")}});
  add("UserKNN", "amazon", {{"topK", I{226}}, {"similarity", s("cosine")}});
  add("UserKNN", "epinions", {{"topK", I{139}}, {"similarity", s("cosine")}});
  add("ItemKNN", "movielens", {{"topK", I{95}}, {"similarity", s("cosine")}});
  add("ItemKNN", "amazon", {{"topK", I{798}}, {"similarity", s("cosine")}});
  add("ItemKNN", "epinions", {{"topK", I{137}}, {"similarity", s("cosine")}});
  add("RP3beta", "movielens", {{"topK", I{158}}, {"alpha", 1.4350197}, {"beta", 0.3265517}, {"normalization", true}});
  add("RP3beta", "amazon", {{"topK", I{803}}, {"alpha", 0.4973207}, {"beta", 0.2836938}, {"normalization", false}});
  add("RP3beta", "epinions", {{"topK", I{144}}, {"alpha", 0.8719344}, {"beta", 0.2483698}, {"normalization", true}});
  add("SLIM", "movielens", {{"topK", I{518}}, {"l1_ratio", 0.0000420}, {"alpha", 0.2978543}});
  add("SLIM", "amazon", {{"topK", I{663}}, {"l1_ratio", 0.0000108}, {"alpha", 0.0486771}});
  add("SLIM", "epinions", {{"topK", I{663}}, {"l1_ratio", 0.0000108}, {"alpha", 0.0486771}});
  for (const char* d : {"movielens", "amazon", "epinions"}) add("EASE", d, {{"l2", 238.5621338}});
  add("MF2020", "movielens",
      {{"factors", I{128}}, {"epochs", I{72}}, {"learning_rate", 0.1295965}, {"reg", 0.0087583}, {"negatives", I{4}}});
  add("MF2020", "amazon",
      {{"factors", I{64}}, {"epochs", I{92}}, {"learning_rate", 0.1295965}, {"reg", 0.0125009}, {"negatives", I{8}}});
  add("MF2020", "epinions",
      {{"factors", I{16}}, {"epochs", I{97}}, {"learning_rate", 0.0154435}, {"reg", 0.0223642}, {"negatives", I{4}}});
  add("iALS", "movielens",
      {{"factors", I{51}}, {"epochs", I{27}}, {"scaling", s("log")}, {"alpha", 6.3818930}, {"epsilon", 5.6496278},
       {"reg", 0.0494734}});
  add("iALS", "amazon",
      {{"factors", I{200}}, {"epochs", I{70}}, {"scaling", s("log")}, {"alpha", 9.1219718}, {"epsilon", 0.4921936},
       {"reg", 0.4921936}});
  add("iALS", "epinions",
      {{"factors", I{178}}, {"epochs", I{145}}, {"scaling", s("log")}, {"alpha", 2.8537184}, {"epsilon", 2.3098481},
       {"reg", 0.0411491}});
  add("BPRMF", "movielens",
      {{"factors", I{256}}, {"epochs", I{73}}, {"learning_rate", 0.0378936}, {"batch_size", I{256}},
       {"reg_user", 0.0157839}, {"reg_positive", 0.0005651}, {"reg_negative", 0.0012779}});
  add("BPRMF", "amazon",
      {{"factors", I{64}}, {"epochs", I{86}}, {"learning_rate", 0.1265624}, {"batch_size", I{256}},
       {"reg_user", 0.0058673}, {"reg_positive", 0.0052985}, {"reg_negative", 0.0009577}});
  add("BPRMF", "epinions",
      {{"factors", I{256}}, {"epochs", I{63}}, {"learning_rate", 0.1004075}, {"batch_size", I{256}},
       {"reg_user", 0.0002613}, {"reg_positive", 0.0034511}, {"reg_negative", 0.0328127}});
  add("NeuMF", "movielens",
      {{"factors", I{16}}, {"epochs", I{93}}, {"learning_rate", 0.0000366}, {"batch_size", I{256}}, {"negatives", I{6}}});
  add("NeuMF", "amazon",
      {{"factors", I{128}}, {"epochs", I{100}}, {"learning_rate", 0.0001365}, {"batch_size", I{64}}, {"negatives", I{6}}});
  add("NeuMF", "epinions",
      {{"factors", I{32}}, {"epochs", I{39}}, {"learning_rate", 0.0000465}, {"batch_size", I{256}}, {"negatives", I{8}}});
  add("MultiVAE", "movielens",
      {{"epochs", I{100}}, {"learning_rate", 0.0001545}, {"batch_size", I{128}}, {"intermediate", I{674}},
       {"latent", I{175}}, {"reg", 0.0000105}});
  add("MultiVAE", "amazon",
      {{"epochs", I{205}}, {"learning_rate", 0.0000723}, {"batch_size", I{128}}, {"intermediate", I{721}},
       {"latent", I{279}}, {"reg", 0.1153400}});
  add("MultiVAE", "epinions",
      {{"epochs", I{200}}, {"learning_rate", 0.0001003}, {"batch_size", I{128}}, {"intermediate", I{674}},
       {"latent", I{175}}, {"reg", 0.0020018}});
  for (const char* d : {"movielens", "amazon", "epinions"}) {
    add("Random", d, {});
    add("MostPop", d, {});
  }
  return p;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build_presets();
  return all;
}

const std::vector<std::string>& preset_datasets() {
  static const std::vector<std::string> tags = {"movielens", "amazon", "epinions"};
  return tags;
}

const Preset& find_preset(const std::string& algorithm, const std::string& dataset) {
  for (const auto& p : presets())
    if (p.algorithm == algorithm && p.dataset == dataset) return p;
  throw ConfigError("no preset for " + algorithm + " on '" + dataset + "'");
}

ParamMap resolve_params(const AlgorithmSpec& spec) {
  ParamMap out;
  if (spec.preset) out = find_preset(spec.algorithm, *spec.preset).values;
  for (const auto& [k, v] : spec.overrides) out[k] = v;
  return out;
}

}  // namespace recbench
