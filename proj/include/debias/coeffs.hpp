#pragma once

// Exact coefficient tables behind the bias-reduction estimators: factorial
// helpers, the change of basis c_kjr from powers of n to rising factorials
// [n-r+1]_k, the composition sums g_beta_i / d_alpha_i that expand
// 1/(n-1)_i as a power series in 1/n, and the per-order correction weights
// s_coeff_terms(i) attached to each moment-product partition.

#include <cstddef>
#include <map>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "partition.hpp"
#include "rational.hpp"

namespace debias {

inline BigInt factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  BigInt out = 1;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

inline BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt out = 1;
  for (int i = 0; i < k; ++i) {
    out *= n - i;
    out /= i + 1;
  }
  return out;
}

/// Falling factorial (x)_k = x (x-1) ... (x-k+1).
template <class Scalar>
Scalar falling_factorial(Scalar x, int k) {
  if (k < 0) throw std::invalid_argument("falling_factorial: negative order");
  Scalar out(1);
  for (int i = 0; i < k; ++i) out *= x - Scalar(i);
  return out;
}

/// Rising factorial [x]_k = x (x+1) ... (x+k-1).
template <class Scalar>
Scalar rising_factorial(Scalar x, int k) {
  if (k < 0) throw std::invalid_argument("rising_factorial: negative order");
  Scalar out(1);
  for (int i = 0; i < k; ++i) out *= x + Scalar(i);
  return out;
}

namespace detail {

/// Columns c_{.jr} of the triangular change of basis
///   n^j = sum_{k=0}^{j} [n-r+1]_k c_{kjr}.
/// Solved by back substitution: each [n-r+1]_k is monic of degree k, so the
/// coefficient of n^k in the residual after removing the higher columns is
/// c_{kjr} itself. The solution is integral.
class PowerToRisingTable {
 public:
  PowerToRisingTable(int r, int jmax) : r_(r), jmax_(jmax) {
    // rising[k] holds the coefficients of [n-r+1]_k in powers of n.
    std::vector<std::vector<BigInt>> rising(static_cast<std::size_t>(jmax) + 1);
    rising[0] = {1};
    for (int k = 1; k <= jmax; ++k) {
      const auto& prev = rising[static_cast<std::size_t>(k - 1)];
      std::vector<BigInt> next(static_cast<std::size_t>(k) + 1, 0);
      const BigInt shift = 1 - r + (k - 1);  // [n-r+1]_k = [n-r+1]_{k-1} (n - r + k)
      for (std::size_t d = 0; d < prev.size(); ++d) {
        next[d] += prev[d] * shift;
        next[d + 1] += prev[d];
      }
      rising[static_cast<std::size_t>(k)] = std::move(next);
    }
    columns_.resize(static_cast<std::size_t>(jmax) + 1);
    for (int j = 0; j <= jmax; ++j) {
      std::vector<BigInt> target(static_cast<std::size_t>(j) + 1, 0);
      target[static_cast<std::size_t>(j)] = 1;  // n^j
      std::vector<BigInt> column(static_cast<std::size_t>(j) + 1, 0);
      for (int k = j; k >= 0; --k) {
        const BigInt c = target[static_cast<std::size_t>(k)];
        column[static_cast<std::size_t>(k)] = c;
        const auto& basis = rising[static_cast<std::size_t>(k)];
        for (std::size_t d = 0; d < basis.size(); ++d)
          target[d] -= c * basis[d];
      }
      for (const BigInt& rem : target)
        if (rem != 0) throw std::logic_error("PowerToRisingTable: basis change did not close");
      columns_[static_cast<std::size_t>(j)] = std::move(column);
    }
  }

  int r() const { return r_; }
  int jmax() const { return jmax_; }

  const BigInt& value(int k, int j) const {
    static const BigInt zero = 0;
    if (j < 0 || j > jmax_) throw std::invalid_argument("PowerToRisingTable: j out of range");
    if (k < 0 || k > j) return zero;
    return columns_[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
  }

 private:
  int r_;
  int jmax_;
  std::vector<std::vector<BigInt>> columns_;
};

}  // namespace detail

/// c_{kjr} with n^j = sum_{k=0}^{j} [n-r+1]_k c_{kjr}; zero for k > j.
inline BigInt c_kjr(int k, int j, int r) {
  if (j < 0) throw std::invalid_argument("c_kjr: negative j");
  static std::map<std::pair<int, int>, detail::PowerToRisingTable> cache;
  const int jmax = std::max(j, 8);
  auto key = std::make_pair(r, jmax);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, detail::PowerToRisingTable(r, jmax)).first;
  return it->second.value(k, j);
}

/// g_beta_i(beta, i) = sum over nonnegative (a_1..a_i) with sum beta of
/// prod_j j^{a_j}; computed by the recurrence G(beta, i) = sum_a G(beta-a, i-1) i^a.
inline BigInt g_beta_i(int beta, int i) {
  if (beta < 0 || i < 0) throw std::invalid_argument("g_beta_i: negative argument");
  static std::map<std::pair<int, int>, BigInt> cache;
  auto key = std::make_pair(beta, i);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  BigInt out;
  if (i == 0) {
    out = (beta == 0) ? 1 : 0;
  } else {
    out = 0;
    BigInt power = 1;
    for (int a = 0; a <= beta; ++a) {
      out += g_beta_i(beta - a, i - 1) * power;
      power *= i;
    }
  }
  cache.emplace(key, out);
  return out;
}

/// d_alpha_i with 1/(n-1)_i = sum_{alpha >= i} d_alpha_i n^{-alpha};
/// equals g_beta_i(alpha - i, i). Zero for alpha < i, delta_{alpha,0} at i = 0.
inline BigInt d_alpha_i(int alpha, int i) {
  if (alpha < 0 || i < 0) throw std::invalid_argument("d_alpha_i: negative argument");
  if (alpha < i) return 0;
  return g_beta_i(alpha - i, i);
}

/// Weights of the order-i bias correction as a combination of moment
/// products: the correction divided by (n-1)_i equals
///   sum over partitions pi (all parts >= 2, i+1 <= |pi| <= 2i) of
///   coeff(pi) T(pi),
/// with coeff(pi) = c(pi) c_{r-i-1, m-1, r} / r! for r = |pi|, m = m(pi).
/// Entries with a vanishing weight are dropped. i = 0 yields an empty list
/// (that term is the plug-in itself).
inline const std::vector<std::pair<Partition, BigRational>>& s_coeff_terms(int i) {
  if (i < 0) throw std::invalid_argument("s_coeff_terms: negative order");
  static std::map<int, std::vector<std::pair<Partition, BigRational>>> cache;
  auto it = cache.find(i);
  if (it != cache.end()) return it->second;
  std::vector<std::pair<Partition, BigRational>> terms;
  for (int r = i + 1; r <= 2 * i; ++r) {
    const auto& sym = sym_coeff_table(r);
    const BigRational r_fact(factorial(r));
    for (const auto& pi : partitions_excluding_ones(r)) {
      const BigInt basis = c_kjr(r - i - 1, pi.block_count() - 1, r);
      if (basis == 0) continue;
      BigRational weight = BigRational(sym.coeff(pi)) * basis / r_fact;
      if (weight == 0) continue;
      terms.emplace_back(pi, std::move(weight));
    }
  }
  return cache.emplace(i, std::move(terms)).first->second;
}

}  // namespace debias
