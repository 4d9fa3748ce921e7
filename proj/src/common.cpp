// SPDX-FileCopyrightText: (c) 2026 The recbench Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "recbench/common.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cctype>
#include <sstream>
#include <thread>

namespace recbench {

std::string to_string(const ParamValue& v) {
  struct Visitor {
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(double x) const {
      std::ostringstream os;
      os.precision(17);
      os << x;
      return os.str();
    }
    std::string operator()(const std::string& x) const { return x; }
    std::string operator()(bool x) const { return x ? "true" : "false"; }
  };
  return std::visit(Visitor{}, v);
}

double param_real(const ParamMap& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  if (auto d = std::get_if<double>(&it->second)) return *d;
  if (auto i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
  throw ConfigError("parameter '" + key + "' must be a real number, got '" + to_string(it->second) + "'");
}

std::int64_t param_int(const ParamMap& p, const std::string& key, std::int64_t fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  if (auto i = std::get_if<std::int64_t>(&it->second)) return *i;
  if (auto d = std::get_if<double>(&it->second); d && *d == static_cast<double>(static_cast<std::int64_t>(*d)))
    return static_cast<std::int64_t>(*d);
  throw ConfigError("parameter '" + key + "' must be an integer, got '" + to_string(it->second) + "'");
}

std::string param_string(const ParamMap& p, const std::string& key, const std::string& fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  if (auto s = std::get_if<std::string>(&it->second)) return *s;
  if (auto b = std::get_if<bool>(&it->second)) return *b ? "true" : "false";
  throw ConfigError("parameter '" + key + "' must be a string, got '" + to_string(it->second) + "'");
}

bool param_bool(const ParamMap& p, const std::string& key, bool fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  if (auto b = std::get_if<bool>(&it->second)) return *b;
  if (auto i = std::get_if<std::int64_t>(&it->second); i && (*i == 0 || *i == 1)) return *i == 1;
  throw ConfigError("parameter '" + key + "' must be true/false, got '" + to_string(it->second) + "'");
}

ParamValue parse_param_value(std::string_view text) {
  const std::string t = trim(text);
  std::string lower = t;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "true") return true;
  if (lower == "false") return false;

  std::int64_t i = 0;
  auto [ip, iec] = std::from_chars(t.data(), t.data() + t.size(), i);
  if (iec == std::errc() && ip == t.data() + t.size() && !t.empty()) return i;

  double d = 0;
  auto [dp, dec] = std::from_chars(t.data(), t.data() + t.size(), d);
  if (dec == std::errc() && dp == t.data() + t.size() && !t.empty()) return d;
  return t;
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

namespace {
std::atomic<unsigned> g_threads{0};
}

unsigned default_thread_count() {
  unsigned n = g_threads.load();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

void set_default_thread_count(unsigned n) { g_threads.store(n); }

void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body,
                  unsigned threads) {
  if (end <= begin) return;
  unsigned n = threads == 0 ? default_thread_count() : threads;
  n = static_cast<unsigned>(std::min<std::size_t>(n, end - begin));
  if (n <= 1) {
    for (std::size_t i = begin; i < end; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{begin};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= end || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

void Fnv1a::update(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h_ ^= p[i];
    h_ *= 0x100000001b3ULL;
  }
}

std::vector<std::string> split_string(std::string_view text, std::string_view delim) {
  std::vector<std::string> out;
  if (delim.empty()) {
    // Whitespace mode: runs of blanks separate fields.
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j > i) out.emplace_back(text.substr(i, j - i));
      i = j;
    }
    return out;
  }
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = text.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      return out;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + delim.size();
  }
}

std::string trim(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

}  // namespace recbench
