// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef RECBENCH_COMMON_HPP
#define RECBENCH_COMMON_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace recbench {

using Index = std::uint32_t;
using UserIndex = Index;
using ItemIndex = Index;

// Error taxonomy. The C API maps each subclass onto one status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class DatasetVanishedError : public Error {
 public:
  using Error::Error;
};

class MissingCellError : public Error {
 public:
  using Error::Error;
};

// Hyperparameter values: integers, reals, categorical strings and flags.
using ParamValue = std::variant<std::int64_t, double, std::string, bool>;
using ParamMap = std::map<std::string, ParamValue>;

std::string to_string(const ParamValue& v);

// Typed lookup with a default; integer values are accepted where a real is
// requested. Throws ConfigError on a type mismatch.
double param_real(const ParamMap& p, const std::string& key, double fallback);
std::int64_t param_int(const ParamMap& p, const std::string& key, std::int64_t fallback);
std::string param_string(const ParamMap& p, const std::string& key, const std::string& fallback);
bool param_bool(const ParamMap& p, const std::string& key, bool fallback);

// Parses "12", "0.5", "true", "cosine" into the narrowest fitting ParamValue.
ParamValue parse_param_value(std::string_view text);

using Rng = std::mt19937_64;

// Independent stream for a (seed, stream) pair, e.g. per-user sampling.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

// Runs body(i) for i in [begin, end) over up to `threads` workers
// (0 = hardware concurrency). Bodies must write disjoint outputs.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

unsigned default_thread_count();
void set_default_thread_count(unsigned n);

// 64-bit FNV-1a, used for stable fold checksums.
class Fnv1a {
 public:
  void update(const void* data, std::size_t n);
  template <typename T>
  void update_value(const T& v) {
    update(&v, sizeof(T));
  }
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::vector<std::string> split_string(std::string_view text, std::string_view delim);
std::string trim(std::string_view text);

}  // namespace recbench

#endif  // RECBENCH_COMMON_HPP
