#pragma once

// Plug-in (divide-by-n) joint central moments of a sample, the raw material
// for every moment-product evaluation. Moments are keyed by a per-coordinate
// exponent vector; the divisor is n throughout, matching evaluation of a
// functional at the empirical distribution. Works in double or exact
// rational arithmetic.

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rational.hpp"

namespace debias {

/// One observed sample: n rows of fixed dimension.
template <class Scalar>
struct Sample {
  std::vector<std::vector<Scalar>> rows;

  long size() const { return static_cast<long>(rows.size()); }
  int dim() const { return rows.empty() ? 0 : static_cast<int>(rows.front().size()); }
};

/// Mean vector and joint central moments with divisor n, every exponent
/// vector of total order 2..max_order. moment() of an empty exponent vector
/// is 1 and of any single index is exactly 0.
template <class Scalar>
class MomentTable {
 public:
  MomentTable(long n, std::vector<Scalar> mean, int max_order,
              std::map<std::vector<int>, Scalar> central)
      : n_(n), max_order_(max_order), mean_(std::move(mean)), central_(std::move(central)) {}

  long n() const { return n_; }
  int dim() const { return static_cast<int>(mean_.size()); }
  int max_order() const { return max_order_; }
  const std::vector<Scalar>& mean() const { return mean_; }

  /// Central moment for the exponent vector `counts` (length dim).
  Scalar moment(const std::vector<int>& counts) const {
    if (static_cast<int>(counts.size()) != dim())
      throw std::invalid_argument("MomentTable::moment: exponent vector of wrong length");
    int total = 0;
    for (int c : counts) {
      if (c < 0) throw std::invalid_argument("MomentTable::moment: negative exponent");
      total += c;
    }
    if (total == 0) return Scalar(1);
    if (total == 1) return Scalar(0);
    if (total > max_order_)
      throw std::invalid_argument("MomentTable::moment: order " + std::to_string(total) +
                                  " beyond computed max " + std::to_string(max_order_));
    auto it = central_.find(counts);
    if (it == central_.end())
      throw std::logic_error("MomentTable::moment: missing entry");
    return it->second;
  }

  /// Pure-power central moment of one coordinate.
  Scalar pure(int coord, int order) const {
    std::vector<int> counts(static_cast<std::size_t>(dim()), 0);
    counts.at(static_cast<std::size_t>(coord)) = order;
    return moment(counts);
  }

 private:
  long n_;
  int max_order_;
  std::vector<Scalar> mean_;
  std::map<std::vector<int>, Scalar> central_;
};

namespace detail {
template <class Fn>
void for_each_exponent_vector(int dim, int total, Fn&& fn) {
  std::vector<int> counts(static_cast<std::size_t>(dim), 0);
  auto rec = [&](auto&& self, int index, int remaining) -> void {
    if (index == dim - 1) {
      counts[static_cast<std::size_t>(index)] = remaining;
      fn(counts);
      return;
    }
    for (int value = remaining; value >= 0; --value) {
      counts[static_cast<std::size_t>(index)] = value;
      self(self, index + 1, remaining - value);
    }
  };
  rec(rec, 0, total);
}
}  // namespace detail

/// Two-pass central moments: mean first, then centered power products,
/// all divided by n.
template <class Scalar>
MomentTable<Scalar> central_moments(const Sample<Scalar>& sample, int max_order) {
  const long n = sample.size();
  const int dim = sample.dim();
  if (n < 1) throw std::invalid_argument("central_moments: empty sample");
  if (dim < 1) throw std::invalid_argument("central_moments: zero-dimensional sample");
  if (max_order < 2) throw std::invalid_argument("central_moments: max_order must be >= 2");

  std::vector<Scalar> mean(static_cast<std::size_t>(dim), Scalar(0));
  for (const auto& row : sample.rows) {
    if (static_cast<int>(row.size()) != dim)
      throw std::invalid_argument("central_moments: ragged sample rows");
    for (int c = 0; c < dim; ++c) mean[static_cast<std::size_t>(c)] += row[static_cast<std::size_t>(c)];
  }
  for (auto& m : mean) m /= Scalar(n);

  std::vector<std::vector<int>> keys;
  for (int total = 2; total <= max_order; ++total)
    detail::for_each_exponent_vector(dim, total, [&](const std::vector<int>& counts) {
      keys.push_back(counts);
    });

  std::vector<Scalar> sums(keys.size(), Scalar(0));
  // powers[c][e] = (x_c - mean_c)^e for the current row
  std::vector<std::vector<Scalar>> powers(
      static_cast<std::size_t>(dim),
      std::vector<Scalar>(static_cast<std::size_t>(max_order) + 1, Scalar(1)));
  for (const auto& row : sample.rows) {
    for (int c = 0; c < dim; ++c) {
      const Scalar centered = row[static_cast<std::size_t>(c)] - mean[static_cast<std::size_t>(c)];
      auto& p = powers[static_cast<std::size_t>(c)];
      for (int e = 1; e <= max_order; ++e) p[static_cast<std::size_t>(e)] = p[static_cast<std::size_t>(e - 1)] * centered;
    }
    for (std::size_t k = 0; k < keys.size(); ++k) {
      Scalar prod(1);
      for (int c = 0; c < dim; ++c) {
        const int e = keys[k][static_cast<std::size_t>(c)];
        if (e > 0) prod *= powers[static_cast<std::size_t>(c)][static_cast<std::size_t>(e)];
      }
      sums[k] += prod;
    }
  }

  std::map<std::vector<int>, Scalar> central;
  for (std::size_t k = 0; k < keys.size(); ++k)
    central.emplace(keys[k], sums[k] / Scalar(n));
  return MomentTable<Scalar>(n, std::move(mean), max_order, std::move(central));
}

/// Standardized moment beta_r = mu_r / mu_2^{r/2} of a univariate table.
inline double standardized_moment(const MomentTable<double>& table, int r) {
  if (table.dim() != 1)
    throw std::invalid_argument("standardized_moment: univariate table required");
  const double mu2 = table.pure(0, 2);
  if (!(mu2 > 0.0))
    throw std::domain_error("standardized_moment: degenerate sample (zero variance)");
  return table.pure(0, r) / std::pow(mu2, 0.5 * r);
}

}  // namespace debias
