#pragma once

// Table of resonant six-fold coefficients Lambda(n1..n6), n1+n2+n3 = n4+n5+n6,
// stored once per orbit of the symmetry group (permutations inside each
// triple, swap of the triples).

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "strichartz/integrals.hpp"
#include "strichartz/parallel.hpp"

namespace strichartz {

inline constexpr int kLambdaOrderCap = 16;
inline constexpr int kLambdaSchemaVersion = 1;
inline constexpr const char* kLambdaConvention = "hermite-resonant-v1";

using SixTuple = std::array<int, 6>;

/// Sort each triple, then order the two triples lexicographically.
inline SixTuple canonical_key(SixTuple t) {
  std::sort(t.begin(), t.begin() + 3);
  std::sort(t.begin() + 3, t.end());
  if (std::lexicographical_compare(t.begin() + 3, t.end(), t.begin(), t.begin() + 3))
    std::swap_ranges(t.begin(), t.begin() + 3, t.begin() + 3);
  return t;
}

inline bool is_resonant(const SixTuple& t) { return t[0] + t[1] + t[2] == t[3] + t[4] + t[5]; }

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// FNV-1a, 64 bit.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

class LambdaTable {
 public:
  LambdaTable() = default;

  /// All canonical resonant tuples with indices <= N.
  static LambdaTable build(int N, unsigned threads = 0, int cap = kLambdaOrderCap) {
    if (N < 0) throw std::invalid_argument("LambdaTable: order must be non-negative");
    if (N > cap)
      throw std::out_of_range("LambdaTable: order " + std::to_string(N) + " exceeds cap " + std::to_string(cap));
    std::vector<SixTuple> keys;
    for (int k = 0; k <= 3 * N; ++k) {
      std::vector<std::array<int, 3>> triples;
      for (int a = 0; a <= N; ++a)
        for (int b = a; b <= N; ++b) {
          const int c = k - a - b;
          if (c >= b && c <= N) triples.push_back({a, b, c});
        }
      for (std::size_t i = 0; i < triples.size(); ++i)
        for (std::size_t j = i; j < triples.size(); ++j)
          keys.push_back({triples[i][0], triples[i][1], triples[i][2], triples[j][0], triples[j][1], triples[j][2]});
    }
    const WeightedHermiteTable weights(3.0, N, detail::minimal_rule_size(6 * N));
    std::vector<double> values(keys.size());
    parallel_for(keys.size(), threads, [&](std::size_t i) { values[i] = weights.integrate(keys[i]); });
    LambdaTable t;
    t.order_ = N;
    for (std::size_t i = 0; i < keys.size(); ++i) t.entries_.emplace(keys[i], values[i]);
    return t;
  }

  int order() const { return order_; }
  double normalization() const { return normalization_; }
  std::size_t size() const { return entries_.size(); }
  const std::map<SixTuple, double>& entries() const { return entries_; }

  bool contains(const SixTuple& t) const {
    for (int n : t)
      if (n < 0 || n > order_) return false;
    return is_resonant(t);
  }

  /// Lambda at any resonant tuple with indices <= order().
  double at(const SixTuple& t) const {
    if (!contains(t)) throw std::out_of_range("LambdaTable: tuple outside table or not resonant");
    return entries_.at(canonical_key(t));
  }
  double at(int n1, int n2, int n3, int n4, int n5, int n6) const { return at(SixTuple{n1, n2, n3, n4, n5, n6}); }

  /// Hash over the canonical entries, independent of formatting.
  std::string content_hash() const {
    std::string bytes = std::to_string(order_) + ";" + format_double(normalization_) + ";";
    for (const auto& [key, v] : entries_) {
      for (int n : key) bytes += std::to_string(n) + ",";
      bytes += format_double(v) + ";";
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = kLambdaSchemaVersion;
    j["convention"] = kLambdaConvention;
    j["order"] = order_;
    j["normalization"] = normalization_;
    j["normalization_label"] = "pi/2";
    j["entry_count"] = entries_.size();
    j["content_hash"] = content_hash();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [key, v] : entries_) {
      auto row = nlohmann::ordered_json::array();
      for (int n : key) row.push_back(n);
      row.push_back(v);
      arr.push_back(std::move(row));
    }
    j["entries"] = std::move(arr);
    return j;
  }

  static LambdaTable from_json(const nlohmann::json& j) {
    if (j.at("schema_version").get<int>() != kLambdaSchemaVersion)
      throw std::runtime_error("LambdaTable: unsupported schema version");
    if (j.at("convention").get<std::string>() != kLambdaConvention)
      throw std::runtime_error("LambdaTable: convention mismatch");
    LambdaTable t;
    t.order_ = j.at("order").get<int>();
    t.normalization_ = j.at("normalization").get<double>();
    for (const auto& row : j.at("entries")) {
      SixTuple key;
      for (std::size_t i = 0; i < 6; ++i) key[i] = row.at(i).get<int>();
      if (canonical_key(key) != key || !is_resonant(key))
        throw std::runtime_error("LambdaTable: non-canonical key in file");
      t.entries_.emplace(key, row.at(6).get<double>());
    }
    if (j.contains("content_hash") && j["content_hash"].get<std::string>() != t.content_hash())
      throw std::runtime_error("LambdaTable: content hash mismatch");
    return t;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json().dump(1) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
  }

  static LambdaTable load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return from_json(nlohmann::json::parse(in));
  }

 private:
  int order_ = -1;
  double normalization_ = kNumeratorNormalization;
  std::map<SixTuple, double> entries_;
};

}  // namespace strichartz
