#pragma once

// Integer partitions lambda |- k: the index set of both moment expansions.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kpz/errors.hpp"

namespace kpz::kpz_side {

struct Partition {
  std::vector<int> parts;  // nonincreasing, positive

  int weight() const {
    int k = 0;
    for (int p : parts) k += p;
    return k;
  }
  std::size_t length() const { return parts.size(); }

  // part size -> count (m_1, m_2, ...)
  std::map<int, int> multiplicities() const {
    std::map<int, int> m;
    for (int p : parts) ++m[p];
    return m;
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(parts[i]);
    }
    return s + ")";
  }

  friend bool operator==(const Partition&, const Partition&) = default;
};

inline constexpr int kMaxPartitionWeight = 20;

namespace detail {
inline void extend(int remaining, int max_part, std::vector<int>& prefix,
                   std::vector<Partition>& out) {
  if (remaining == 0) {
    out.push_back({prefix});
    return;
  }
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    prefix.push_back(p);
    extend(remaining - p, p, prefix, out);
    prefix.pop_back();
  }
}
}  // namespace detail

// All partitions of k in descending lexicographic order.
inline std::vector<Partition> partitions(int k) {
  if (k < 1 || k > kMaxPartitionWeight) {
    throw ConfigurationError("partitions: k must be in [1, 20], got " + std::to_string(k));
  }
  std::vector<Partition> out;
  std::vector<int> prefix;
  detail::extend(k, k, prefix, out);
  return out;
}

// prod_i m_i!
inline std::int64_t symmetry_factor(const Partition& lambda) {
  std::int64_t f = 1;
  for (const auto& [part, count] : lambda.multiplicities()) {
    for (int j = 2; j <= count; ++j) f *= j;
  }
  return f;
}

}  // namespace kpz::kpz_side
