#pragma once

// A functional T(F) of one or more distributions, described by enough
// structure to support both plug-in evaluation and the moment-product terms
// T[pi_1...pi_k] that the series estimators consume. Two generic engines
// cover the catalog: a smooth function of a (possibly multivariate) mean for
// k = 1, and a smooth function of k univariate sample means.

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coeffs.hpp"
#include "moments.hpp"
#include "partition.hpp"
#include "rational.hpp"

namespace debias {

/// Supplies partial derivatives of a smooth g at a point u.
/// `alpha` is a per-coordinate derivative multi-index; all-zero alpha
/// requests g(u) itself. Derivatives are symmetric, so the multi-index
/// determines the value.
template <class Scalar>
class DerivativeOracle {
 public:
  virtual ~DerivativeOracle() = default;
  virtual int dim() const = 0;
  virtual Scalar derivative(const std::vector<int>& alpha, const std::vector<Scalar>& u) const = 0;
};

template <class Scalar>
class Functional {
 public:
  virtual ~Functional() = default;

  virtual const std::string& name() const = 0;
  /// Number of independent samples consumed.
  virtual int arity() const = 0;
  /// Required column count of raw input sample j.
  virtual int raw_dim(int j) const = 0;
  /// Dimension after the ingestion transform h.
  virtual int lifted_dim(int j) const = 0;
  /// Largest supported estimate order p.
  virtual int max_p() const = 0;

  /// Ingestion transform h for sample j, one row at a time.
  virtual void lift_row(int j, const std::vector<Scalar>& raw, std::vector<Scalar>& lifted) const = 0;

  virtual Scalar plug_in(const std::vector<MomentTable<Scalar>>& tables) const = 0;

  /// The moment-product term for one partition per sample. Exactly zero
  /// whenever any partition carries a part equal to 1.
  virtual Scalar t_pi(const std::vector<Partition>& pis,
                      const std::vector<MomentTable<Scalar>>& tables) const = 0;

  /// Plug-in value under observation weights (normalized to sum 1), used by
  /// the infinitesimal jackknife. Only meaningful for one-sample functionals.
  virtual Scalar weighted_plug_in(const Sample<Scalar>&, const std::vector<Scalar>&) const {
    throw std::logic_error("weighted_plug_in: unsupported for functional '" + name() + "'");
  }
};

template <class Scalar>
Sample<Scalar> lift_sample(const Functional<Scalar>& f, int j, const Sample<Scalar>& raw) {
  if (raw.dim() != f.raw_dim(j))
    throw std::invalid_argument("lift_sample: functional '" + f.name() + "' expects " +
                                std::to_string(f.raw_dim(j)) + " columns in sample " +
                                std::to_string(j + 1) + ", got " + std::to_string(raw.dim()));
  Sample<Scalar> lifted;
  lifted.rows.resize(raw.rows.size());
  std::vector<Scalar> out;
  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    out.clear();
    f.lift_row(j, raw.rows[i], out);
    lifted.rows[i] = out;
  }
  return lifted;
}

/// Central-moment tables of the lifted samples, to the given order.
template <class Scalar>
std::vector<MomentTable<Scalar>> build_tables(const Functional<Scalar>& f,
                                              const std::vector<Sample<Scalar>>& samples,
                                              int max_order) {
  if (static_cast<int>(samples.size()) != f.arity())
    throw std::invalid_argument("build_tables: functional '" + f.name() + "' takes " +
                                std::to_string(f.arity()) + " sample(s), got " +
                                std::to_string(samples.size()));
  std::vector<MomentTable<Scalar>> tables;
  tables.reserve(samples.size());
  for (int j = 0; j < f.arity(); ++j)
    tables.push_back(central_moments(lift_sample(f, j, samples[static_cast<std::size_t>(j)]),
                                     max_order));
  return tables;
}

/// k = 1: T(F) = g(mean of h(X)) for a smooth g with an analytic oracle.
/// t_pi contracts the derivative indices of g against joint central moments
/// grouped by the parts of pi: each part of size s becomes a block whose
/// coordinate exponent vector v (|v| = s) contributes a multinomial weight
/// s!/prod v_c!, the factor mu[v], and s derivative slots.
template <class Scalar>
class SmoothFunctionOfMeans final : public Functional<Scalar> {
 public:
  using Lift = std::function<void(const std::vector<Scalar>&, std::vector<Scalar>&)>;

  SmoothFunctionOfMeans(std::string name, int raw_dim, int lifted_dim, Lift lift,
                        std::shared_ptr<const DerivativeOracle<Scalar>> oracle, int max_p)
      : name_(std::move(name)), raw_dim_(raw_dim), lifted_dim_(lifted_dim),
        lift_(std::move(lift)), oracle_(std::move(oracle)), max_p_(max_p) {
    if (oracle_->dim() != lifted_dim_)
      throw std::invalid_argument("SmoothFunctionOfMeans: oracle dimension mismatch");
  }

  const std::string& name() const override { return name_; }
  int arity() const override { return 1; }
  int raw_dim(int) const override { return raw_dim_; }
  int lifted_dim(int) const override { return lifted_dim_; }
  int max_p() const override { return max_p_; }

  void lift_row(int, const std::vector<Scalar>& raw, std::vector<Scalar>& lifted) const override {
    if (lift_) {
      lift_(raw, lifted);
    } else {
      lifted = raw;
    }
  }

  Scalar plug_in(const std::vector<MomentTable<Scalar>>& tables) const override {
    const std::vector<int> zero(static_cast<std::size_t>(lifted_dim_), 0);
    return oracle_->derivative(zero, tables.front().mean());
  }

  Scalar t_pi(const std::vector<Partition>& pis,
              const std::vector<MomentTable<Scalar>>& tables) const override {
    if (pis.size() != 1) throw std::invalid_argument("t_pi: one partition expected");
    const Partition& pi = pis.front();
    if (pi.has_unit_part()) return Scalar(0);
    const MomentTable<Scalar>& table = tables.front();

    // Accumulate, per derivative multi-index alpha, the sum over block
    // exponent assignments of (multinomial weights) * (moment product).
    std::map<std::vector<int>, Scalar> weight_by_alpha;
    std::vector<int> alpha(static_cast<std::size_t>(lifted_dim_), 0);
    auto assign = [&](auto&& self, std::size_t block, const Scalar& acc) -> void {
      if (block == pi.parts.size()) {
        auto [it, inserted] = weight_by_alpha.try_emplace(alpha, acc);
        if (!inserted) it->second += acc;
        return;
      }
      const int s = pi.parts[block];
      detail::for_each_exponent_vector(lifted_dim_, s, [&](const std::vector<int>& v) {
        Scalar factor = acc * scalar_cast<Scalar>(BigRational(multinomial_weight(s, v)));
        factor *= table.moment(v);
        if (factor == Scalar(0)) return;
        for (int c = 0; c < lifted_dim_; ++c) alpha[static_cast<std::size_t>(c)] += v[static_cast<std::size_t>(c)];
        self(self, block + 1, factor);
        for (int c = 0; c < lifted_dim_; ++c) alpha[static_cast<std::size_t>(c)] -= v[static_cast<std::size_t>(c)];
      });
    };
    assign(assign, 0, Scalar(1));

    Scalar total(0);
    for (const auto& [key, weight] : weight_by_alpha)
      total += weight * oracle_->derivative(key, table.mean());
    return total;
  }

  Scalar weighted_plug_in(const Sample<Scalar>& raw, const std::vector<Scalar>& weights) const override {
    if (static_cast<long>(weights.size()) != raw.size())
      throw std::invalid_argument("weighted_plug_in: one weight per observation required");
    std::vector<Scalar> mean(static_cast<std::size_t>(lifted_dim_), Scalar(0));
    std::vector<Scalar> lifted;
    Scalar total_weight(0);
    for (std::size_t i = 0; i < raw.rows.size(); ++i) {
      lifted.clear();
      lift_row(0, raw.rows[i], lifted);
      for (int c = 0; c < lifted_dim_; ++c)
        mean[static_cast<std::size_t>(c)] += weights[i] * lifted[static_cast<std::size_t>(c)];
      total_weight += weights[i];
    }
    if (total_weight == Scalar(0))
      throw std::invalid_argument("weighted_plug_in: weights sum to zero");
    for (auto& m : mean) m /= total_weight;
    const std::vector<int> zero(static_cast<std::size_t>(lifted_dim_), 0);
    return oracle_->derivative(zero, mean);
  }

 private:
  static BigInt multinomial_weight(int s, const std::vector<int>& v) {
    BigInt w = factorial(s);
    for (int c : v) w /= factorial(c);
    return w;
  }

  std::string name_;
  int raw_dim_;
  int lifted_dim_;
  Lift lift_;
  std::shared_ptr<const DerivativeOracle<Scalar>> oracle_;
  int max_p_;
};

/// General k: T(F) = g(mean_1, ..., mean_k) of k univariate samples.
/// Each part a of pi_j contributes a factor mu_a[j] and a derivative slots
/// on coordinate j.
template <class Scalar>
class KSampleFunctionOfMeans final : public Functional<Scalar> {
 public:
  KSampleFunctionOfMeans(std::string name, int k,
                         std::shared_ptr<const DerivativeOracle<Scalar>> oracle, int max_p)
      : name_(std::move(name)), k_(k), oracle_(std::move(oracle)), max_p_(max_p) {
    if (oracle_->dim() != k_)
      throw std::invalid_argument("KSampleFunctionOfMeans: oracle dimension mismatch");
  }

  const std::string& name() const override { return name_; }
  int arity() const override { return k_; }
  int raw_dim(int) const override { return 1; }
  int lifted_dim(int) const override { return 1; }
  int max_p() const override { return max_p_; }

  void lift_row(int, const std::vector<Scalar>& raw, std::vector<Scalar>& lifted) const override {
    lifted = raw;
  }

  Scalar plug_in(const std::vector<MomentTable<Scalar>>& tables) const override {
    const std::vector<int> zero(static_cast<std::size_t>(k_), 0);
    return oracle_->derivative(zero, means(tables));
  }

  Scalar t_pi(const std::vector<Partition>& pis,
              const std::vector<MomentTable<Scalar>>& tables) const override {
    if (static_cast<int>(pis.size()) != k_)
      throw std::invalid_argument("t_pi: one partition per sample expected");
    std::vector<int> alpha(static_cast<std::size_t>(k_), 0);
    Scalar moment_product(1);
    for (int j = 0; j < k_; ++j) {
      const Partition& pi = pis[static_cast<std::size_t>(j)];
      if (pi.has_unit_part()) return Scalar(0);
      alpha[static_cast<std::size_t>(j)] = pi.weight();
      for (int a : pi.parts)
        moment_product *= tables[static_cast<std::size_t>(j)].pure(0, a);
    }
    if (moment_product == Scalar(0)) return Scalar(0);
    return oracle_->derivative(alpha, means(tables)) * moment_product;
  }

 private:
  std::vector<Scalar> means(const std::vector<MomentTable<Scalar>>& tables) const {
    std::vector<Scalar> u;
    u.reserve(static_cast<std::size_t>(k_));
    for (const auto& table : tables) u.push_back(table.mean().front());
    return u;
  }

  std::string name_;
  int k_;
  std::shared_ptr<const DerivativeOracle<Scalar>> oracle_;
  int max_p_;
};

}  // namespace debias
