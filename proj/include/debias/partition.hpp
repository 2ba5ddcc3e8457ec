#pragma once

// Integer partitions, nonnegative compositions, and the symmetric-function
// coefficients c(pi) defined by expanding the elementary symmetric polynomial
// e_r in the power sums:  r! e_r = sum over partitions pi of r of
// c(pi) prod_j p_{pi_j}.  These carry the combinatorial weight of every
// moment-product term the estimators use.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace debias {

/// A partition of a nonnegative integer: parts weakly decreasing, all >= 1.
/// The empty partition is the unique partition of 0.
struct Partition {
  std::vector<int> parts;

  Partition() = default;
  Partition(std::initializer_list<int> p) : parts(p) {
    if (!std::is_sorted(parts.rbegin(), parts.rend()))
      std::sort(parts.rbegin(), parts.rend());
    for (int x : parts)
      if (x < 1) throw std::invalid_argument("Partition: parts must be >= 1");
  }
  explicit Partition(std::vector<int> p) : parts(std::move(p)) {
    std::sort(parts.rbegin(), parts.rend());
    for (int x : parts)
      if (x < 1) throw std::invalid_argument("Partition: parts must be >= 1");
  }

  int weight() const {
    int w = 0;
    for (int x : parts) w += x;
    return w;
  }
  int block_count() const { return static_cast<int>(parts.size()); }
  bool has_unit_part() const { return !parts.empty() && parts.back() == 1; }

  /// (part value, multiplicity) runs, largest part first.
  std::vector<std::pair<int, int>> run_lengths() const {
    std::vector<std::pair<int, int>> runs;
    for (int x : parts) {
      if (!runs.empty() && runs.back().first == x)
        ++runs.back().second;
      else
        runs.emplace_back(x, 1);
    }
    return runs;
  }

  Partition with_part(int extra) const {
    Partition out = *this;
    auto it = std::lower_bound(out.parts.begin(), out.parts.end(), extra,
                               [](int a, int b) { return a > b; });
    out.parts.insert(it, extra);
    return out;
  }

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition&, const Partition&) = default;
};

/// "4", "31", "2211" for small parts; parts >= 10 are bracketed: "[12]2".
inline std::string to_string(const Partition& pi) {
  if (pi.parts.empty()) return "()";
  std::string out;
  for (int x : pi.parts) {
    if (x < 10)
      out += static_cast<char>('0' + x);
    else
      out += "[" + std::to_string(x) + "]";
  }
  return out;
}

namespace detail {
inline void gen_partitions(int remaining, int max_part, int min_part,
                           std::vector<int>& current, std::vector<Partition>& out) {
  if (remaining == 0) {
    Partition pi;
    pi.parts = current;
    out.push_back(std::move(pi));
    return;
  }
  for (int part = std::min(max_part, remaining); part >= min_part; --part) {
    current.push_back(part);
    gen_partitions(remaining - part, part, min_part, current, out);
    current.pop_back();
  }
}
}  // namespace detail

/// All partitions of r in descending lexicographic order: (r) first, (1^r) last.
inline std::vector<Partition> partitions(int r) {
  if (r < 0) throw std::invalid_argument("partitions: negative weight");
  std::vector<Partition> out;
  std::vector<int> current;
  detail::gen_partitions(r, r, 1, current, out);
  return out;
}

/// Partitions of r with every part >= 2, descending lexicographic order.
/// Empty for r = 1; just the empty partition for r = 0.
inline std::vector<Partition> partitions_excluding_ones(int r) {
  if (r < 0) throw std::invalid_argument("partitions_excluding_ones: negative weight");
  std::vector<Partition> out;
  std::vector<int> current;
  detail::gen_partitions(r, r, 2, current, out);
  return out;
}

/// Ordered tuples of `parts` nonnegative integers summing to `total`,
/// descending lexicographic order. There are C(total+parts-1, parts-1).
inline std::vector<std::vector<int>> compositions(int total, int parts) {
  if (total < 0 || parts < 1) throw std::invalid_argument("compositions: bad arguments");
  std::vector<std::vector<int>> out;
  std::vector<int> current(static_cast<std::size_t>(parts));
  auto rec = [&](auto&& self, int index, int remaining) -> void {
    if (index == parts - 1) {
      current[static_cast<std::size_t>(index)] = remaining;
      out.push_back(current);
      return;
    }
    for (int value = remaining; value >= 0; --value) {
      current[static_cast<std::size_t>(index)] = value;
      self(self, index + 1, remaining - value);
    }
  };
  rec(rec, 0, total);
  return out;
}

/// Coefficients c(pi) with r! e_r = sum_{pi |- r} c(pi) prod_j p_{pi_j},
/// computed through Newton's identities
///   e_m = (1/m) sum_{i=1}^{m} (-1)^{i-1} e_{m-i} p_i
/// over sparse polynomials in the power sums. Every c(pi) is an integer;
/// a fractional result would mean the recurrence was assembled wrong, so it
/// is checked. Entries are stored in descending lexicographic order.
class SymCoeffTable {
 public:
  explicit SymCoeffTable(int r) : order_(r) {
    if (r < 0) throw std::invalid_argument("SymCoeffTable: negative order");
    using Poly = std::map<Partition, BigRational>;
    std::vector<Poly> e(static_cast<std::size_t>(r) + 1);
    e[0][Partition{}] = 1;
    for (int m = 1; m <= r; ++m) {
      Poly acc;
      for (int i = 1; i <= m; ++i) {
        const int sign = (i % 2 == 1) ? 1 : -1;
        for (const auto& [pi, coef] : e[static_cast<std::size_t>(m - i)])
          acc[pi.with_part(i)] += sign * coef;
      }
      for (auto& [pi, coef] : acc) coef /= m;
      e[static_cast<std::size_t>(m)] = std::move(acc);
    }
    BigRational r_factorial = 1;
    for (int i = 2; i <= r; ++i) r_factorial *= i;
    for (const auto& pi : partitions(r)) {
      auto it = e[static_cast<std::size_t>(r)].find(pi);
      BigRational value = (it == e[static_cast<std::size_t>(r)].end())
                              ? BigRational(0)
                              : it->second * r_factorial;
      if (!is_integer(value))
        throw std::logic_error("SymCoeffTable: non-integer coefficient for " + to_string(pi));
      entries_.emplace_back(pi, numerator(value));
    }
  }

  int order() const { return order_; }

  /// All (partition, coefficient) pairs, descending lexicographic order.
  const std::vector<std::pair<Partition, BigInt>>& entries() const { return entries_; }

  const BigInt& coeff(const Partition& pi) const {
    if (pi.weight() != order_)
      throw std::invalid_argument("SymCoeffTable::coeff: partition of wrong weight");
    for (const auto& [key, value] : entries_)
      if (key == pi) return value;
    throw std::logic_error("SymCoeffTable::coeff: partition missing from table");
  }

 private:
  int order_;
  std::vector<std::pair<Partition, BigInt>> entries_;
};

/// Cached access to SymCoeffTable(r).
inline const SymCoeffTable& sym_coeff_table(int r) {
  static std::map<int, SymCoeffTable> cache;
  auto it = cache.find(r);
  if (it == cache.end()) it = cache.emplace(r, SymCoeffTable(r)).first;
  return it->second;
}

}  // namespace debias
