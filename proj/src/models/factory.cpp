// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <set>

#include "recbench/factor_models.hpp"
#include "recbench/linear_models.hpp"
#include "recbench/memory_models.hpp"
#include "recbench/model.hpp"
#include "recbench/neural.hpp"

namespace recbench {

namespace {

void require_known(const std::string& algorithm, const ParamMap& params, std::set<std::string> known) {
  for (const auto& [key, value] : params)
    if (!known.contains(key)) throw ConfigError(algorithm + ": unknown hyperparameter '" + key + "'");
}

int positive_int(const ParamMap& p, const std::string& key, int fallback) {
  const auto v = param_int(p, key, fallback);
  if (v < 1 || v > std::numeric_limits<int>::max()) throw ConfigError("'" + key + "' must be a positive integer");
  return static_cast<int>(v);
}

int non_negative_int(const ParamMap& p, const std::string& key, int fallback) {
  const auto v = param_int(p, key, fallback);
  if (v < 0 || v > std::numeric_limits<int>::max()) throw ConfigError("'" + key + "' must be a non-negative integer");
  return static_cast<int>(v);
}

double non_negative_real(const ParamMap& p, const std::string& key, double fallback) {
  const double v = param_real(p, key, fallback);
  if (!(v >= 0) || !std::isfinite(v)) throw ConfigError("'" + key + "' must be a finite non-negative number");
  return v;
}

ConfidenceScaling parse_scaling(const std::string& s) {
  if (s == "linear") return ConfidenceScaling::linear;
  if (s == "log") return ConfidenceScaling::log;
  throw ConfigError("scaling must be 'linear' or 'log', got '" + s + "'");
}

}  // namespace

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names = {"Random", "MostPop", "UserKNN", "ItemKNN", "RP3beta", "SLIM",
                                                 "EASE",   "iALS",    "BPRMF",   "MF2020",  "NeuMF",   "MultiVAE"};
  return names;
}

std::unique_ptr<Recommender> make_recommender(const std::string& algorithm, const ParamMap& p, std::uint64_t seed) {
  if (algorithm == "Random") {
    require_known(algorithm, p, {});
    return std::make_unique<RandomRecommender>(seed);
  }
  if (algorithm == "MostPop") {
    require_known(algorithm, p, {});
    return std::make_unique<MostPop>();
  }
  if (algorithm == "UserKNN" || algorithm == "ItemKNN") {
    require_known(algorithm, p, {"topK", "similarity"});
    const auto k = static_cast<std::size_t>(positive_int(p, "topK", 100));
    const auto kind = parse_similarity_kind(param_string(p, "similarity", "cosine"));
    if (algorithm == "UserKNN") return std::make_unique<UserKnn>(kind, k);
    return std::make_unique<ItemKnn>(kind, k);
  }
  if (algorithm == "RP3beta") {
    require_known(algorithm, p, {"topK", "alpha", "beta", "normalization"});
    return std::make_unique<Rp3Beta>(non_negative_real(p, "alpha", 1.0), non_negative_real(p, "beta", 0.5),
                                     static_cast<std::size_t>(positive_int(p, "topK", 100)),
                                     param_bool(p, "normalization", false));
  }
  if (algorithm == "SLIM") {
    require_known(algorithm, p, {"topK", "l1_ratio", "alpha", "max_sweeps", "tolerance"});
    SlimParams s;
    s.top_k = static_cast<std::size_t>(positive_int(p, "topK", static_cast<int>(s.top_k)));
    s.l1_ratio = param_real(p, "l1_ratio", s.l1_ratio);
    s.alpha = param_real(p, "alpha", s.alpha);
    s.max_sweeps = positive_int(p, "max_sweeps", s.max_sweeps);
    s.tolerance = non_negative_real(p, "tolerance", s.tolerance);
    if (!(s.alpha > 0) || !(s.l1_ratio > 0 && s.l1_ratio <= 1))
      throw ConfigError("SLIM requires alpha > 0 and 0 < l1_ratio <= 1");
    return std::make_unique<Slim>(s);
  }
  if (algorithm == "EASE") {
    require_known(algorithm, p, {"l2"});
    const double l2 = param_real(p, "l2", 500.0);
    if (!(l2 > 0)) throw ConfigError("EASE requires l2 > 0");
    return std::make_unique<Ease>(l2);
  }
  if (algorithm == "iALS") {
    require_known(algorithm, p, {"factors", "epochs", "alpha", "scaling", "epsilon", "reg"});
    IalsParams s;
    s.factors = positive_int(p, "factors", s.factors);
    s.epochs = positive_int(p, "epochs", s.epochs);
    s.alpha = param_real(p, "alpha", s.alpha);
    s.scaling = parse_scaling(param_string(p, "scaling", "linear"));
    s.epsilon = param_real(p, "epsilon", s.epsilon);
    s.reg = param_real(p, "reg", s.reg);
    s.seed = seed;
    if (!(s.alpha > 0) || !(s.reg > 0) || (s.scaling == ConfidenceScaling::log && !(s.epsilon > 0)))
      throw ConfigError("iALS requires alpha > 0, reg > 0 and epsilon > 0 under log scaling");
    return std::make_unique<Ials>(s);
  }
  if (algorithm == "BPRMF") {
    require_known(algorithm, p,
                  {"factors", "epochs", "learning_rate", "batch_size", "reg_user", "reg_positive", "reg_negative"});
    BprParams s;
    s.factors = positive_int(p, "factors", s.factors);
    s.epochs = positive_int(p, "epochs", s.epochs);
    s.learning_rate = non_negative_real(p, "learning_rate", s.learning_rate);
    s.batch_size = positive_int(p, "batch_size", s.batch_size);
    s.reg_user = non_negative_real(p, "reg_user", s.reg_user);
    s.reg_positive = non_negative_real(p, "reg_positive", s.reg_positive);
    s.reg_negative = non_negative_real(p, "reg_negative", s.reg_negative);
    s.seed = seed;
    return std::make_unique<Bprmf>(s);
  }
  if (algorithm == "MF2020") {
    require_known(algorithm, p, {"factors", "epochs", "learning_rate", "reg", "negatives"});
    Mf2020Params s;
    s.factors = positive_int(p, "factors", s.factors);
    s.epochs = positive_int(p, "epochs", s.epochs);
    s.learning_rate = non_negative_real(p, "learning_rate", s.learning_rate);
    s.reg = non_negative_real(p, "reg", s.reg);
    s.negatives = non_negative_int(p, "negatives", s.negatives);
    s.seed = seed;
    return std::make_unique<Mf2020>(s);
  }
  if (algorithm == "NeuMF") {
    require_known(algorithm, p, {"factors", "epochs", "learning_rate", "batch_size", "negatives"});
    NeumfParams s;
    s.factors = positive_int(p, "factors", s.factors);
    s.epochs = positive_int(p, "epochs", s.epochs);
    s.learning_rate = non_negative_real(p, "learning_rate", s.learning_rate);
    s.batch_size = positive_int(p, "batch_size", s.batch_size);
    s.negatives = non_negative_int(p, "negatives", s.negatives);
    s.seed = seed;
    if (s.factors < 2) throw ConfigError("NeuMF requires at least 2 factors");
    return std::make_unique<NeuMF>(s);
  }
  if (algorithm == "MultiVAE") {
    require_known(algorithm, p, {"epochs", "learning_rate", "batch_size", "intermediate", "latent", "reg", "dropout"});
    MultiVaeParams s;
    s.epochs = positive_int(p, "epochs", s.epochs);
    s.learning_rate = non_negative_real(p, "learning_rate", s.learning_rate);
    s.batch_size = positive_int(p, "batch_size", s.batch_size);
    s.intermediate = positive_int(p, "intermediate", s.intermediate);
    s.latent = positive_int(p, "latent", s.latent);
    // "reg" is the KL anneal cap.
    s.anneal_cap = non_negative_real(p, "reg", s.anneal_cap);
    s.dropout = non_negative_real(p, "dropout", s.dropout);
    if (s.dropout >= 1) throw ConfigError("MultiVAE dropout must lie in [0, 1)");
    s.seed = seed;
    return std::make_unique<MultiVae>(s);
  }
  throw ConfigError("unknown algorithm '" + algorithm + "'");
}

}  // namespace recbench
