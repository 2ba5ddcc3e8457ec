#pragma once

// Catalog of concrete functionals: powers of (combinations of) means, ratio
// of means, central moments, standard deviation, mean over standard
// deviation, skewness, and the two-sample harmonic product. Each supplies an
// analytic derivative oracle; everything algebraic also runs in exact
// rational arithmetic.

#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "functional.hpp"

namespace debias {

namespace detail {

template <class Scalar>
Scalar int_pow(const Scalar& base, int e) {
  Scalar out(1);
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

/// base^e for integer e of either sign; negative e requires base != 0.
template <class Scalar>
Scalar signed_int_pow(const Scalar& base, int e) {
  if (e >= 0) return int_pow(base, e);
  if (base == Scalar(0)) throw std::domain_error("zero raised to a negative power");
  return Scalar(1) / int_pow(base, -e);
}

}  // namespace detail

/// g(u) = (a'u)^q. For integer q everything is rational; for fractional q
/// (double arithmetic only) the combination a'u must be positive.
template <class Scalar>
class LinearCombPowerOracle final : public DerivativeOracle<Scalar> {
 public:
  LinearCombPowerOracle(std::vector<Scalar> coefficients, BigRational q)
      : coefficients_(std::move(coefficients)), q_(std::move(q)), integer_q_(is_integer(q_)) {
    if constexpr (!std::is_same_v<Scalar, double>) {
      if (!integer_q_)
        throw std::invalid_argument("power functional: fractional exponent requires double arithmetic");
    }
  }

  int dim() const override { return static_cast<int>(coefficients_.size()); }

  Scalar derivative(const std::vector<int>& alpha, const std::vector<Scalar>& u) const override {
    int m = 0;
    for (int a : alpha) m += a;
    Scalar combo(0);
    for (std::size_t c = 0; c < coefficients_.size(); ++c) combo += coefficients_[c] * u[c];

    Scalar out(1);
    for (std::size_t c = 0; c < coefficients_.size(); ++c)
      out *= detail::int_pow(coefficients_[c], alpha[c]);

    if (integer_q_) {
      const int qi = static_cast<int>(numerator(q_).convert_to<long>());
      out *= scalar_cast<Scalar>(falling_factorial(q_, m));
      if (out == Scalar(0)) return out;
      return out * detail::signed_int_pow(combo, qi - m);
    }
    if constexpr (std::is_same_v<Scalar, double>) {
      const double qd = q_.convert_to<double>();
      double ff = 1.0;
      for (int i = 0; i < m; ++i) ff *= qd - i;
      if (ff == 0.0) return 0.0;
      if (!(combo > 0.0))
        throw std::domain_error("power functional: nonpositive mean combination with fractional exponent");
      return out * ff * std::pow(combo, qd - m);
    } else {
      throw std::logic_error("power functional: unreachable fractional branch");
    }
  }

 private:
  std::vector<Scalar> coefficients_;
  BigRational q_;
  bool integer_q_;
};

/// g(u1, u2) = u1/u2.
template <class Scalar>
class RatioOracle final : public DerivativeOracle<Scalar> {
 public:
  int dim() const override { return 2; }

  Scalar derivative(const std::vector<int>& alpha, const std::vector<Scalar>& u) const override {
    const int a = alpha[0];
    const int b = alpha[1];
    if (u[1] == Scalar(0)) throw std::domain_error("ratio of means: zero denominator mean");
    if (a >= 2) return Scalar(0);
    const Scalar sign = (b % 2 == 0) ? Scalar(1) : Scalar(-1);
    const Scalar b_fact = scalar_cast<Scalar>(BigRational(factorial(b)));
    if (a == 1) return sign * b_fact * detail::signed_int_pow(u[1], -(b + 1));
    if (b == 0) return u[0] / u[1];
    return u[0] * sign * b_fact * detail::signed_int_pow(u[1], -(b + 1));
  }
};

/// g(u1, u2) = u1 u2 / (u1 + u2).
template <class Scalar>
class HarmonicProductOracle final : public DerivativeOracle<Scalar> {
 public:
  int dim() const override { return 2; }

  Scalar derivative(const std::vector<int>& alpha, const std::vector<Scalar>& u) const override {
    const int a = alpha[0];
    const int b = alpha[1];
    const Scalar D = u[0] + u[1];
    if (D == Scalar(0)) throw std::domain_error("harmonic product: means sum to zero");
    if (a == 0 && b == 0) return u[0] * u[1] / D;
    auto pure = [&](int order, const Scalar& other) {
      // d^order/du^order of the one-variable slice: order! (-1)^{order+1} D^{-order-1} other^2
      Scalar value = scalar_cast<Scalar>(BigRational(factorial(order)));
      if (order % 2 == 0) value = -value;
      return value * detail::signed_int_pow(D, -(order + 1)) * other * other;
    };
    if (b == 0) return pure(a, u[1]);
    if (a == 0) return pure(b, u[0]);
    Scalar value = scalar_cast<Scalar>(BigRational(factorial(a + b - 2)));
    if ((a + b) % 2 == 0) value = -value;
    const Scalar bracket = Scalar(b * (b - 1)) * u[0] * u[0] -
                           Scalar(2 * a * b) * u[0] * u[1] +
                           Scalar(a * (a - 1)) * u[1] * u[1];
    return value * detail::signed_int_pow(D, -(a + b + 1)) * bracket;
  }
};

/// Sparse multivariate polynomial with rational coefficients, keyed by
/// exponent vector.
template <class Scalar>
class PolynomialOracle final : public DerivativeOracle<Scalar> {
 public:
  PolynomialOracle(int dim, std::map<std::vector<int>, BigRational> terms)
      : dim_(dim), terms_(std::move(terms)) {}

  int dim() const override { return dim_; }

  Scalar derivative(const std::vector<int>& alpha, const std::vector<Scalar>& u) const override {
    Scalar out(0);
    for (const auto& [exps, coeff] : terms_) {
      BigRational factor = coeff;
      bool vanishes = false;
      for (int c = 0; c < dim_; ++c) {
        if (exps[static_cast<std::size_t>(c)] < alpha[static_cast<std::size_t>(c)]) {
          vanishes = true;
          break;
        }
        factor *= falling_factorial(BigRational(exps[static_cast<std::size_t>(c)]),
                                    alpha[static_cast<std::size_t>(c)]);
      }
      if (vanishes || factor == 0) continue;
      Scalar term = scalar_cast<Scalar>(factor);
      for (int c = 0; c < dim_; ++c)
        term *= detail::int_pow(u[static_cast<std::size_t>(c)],
                                exps[static_cast<std::size_t>(c)] - alpha[static_cast<std::size_t>(c)]);
      out += term;
    }
    return out;
  }

 private:
  int dim_;
  std::map<std::vector<int>, BigRational> terms_;
};

/// g(u) = P(u) (u2 - u1^2)^{s} with half-integer s; double arithmetic only.
/// Derivatives come from the product rule and, for the inner quadratic
/// v = u2 - u1^2,
///   d^a/du1^a f(v) = sum_j a!/(j!(a-2j)!) f^(a-j)(v) (-2 u1)^{a-2j} (-1)^j.
class PolyTimesVarPowOracle final : public DerivativeOracle<double> {
 public:
  PolyTimesVarPowOracle(int dim, std::map<std::vector<int>, BigRational> poly, int twice_s)
      : dim_(dim), poly_(dim, std::move(poly)), twice_s_(twice_s) {
    if (dim < 2) throw std::invalid_argument("PolyTimesVarPowOracle: needs at least 2 coordinates");
  }

  int dim() const override { return dim_; }

  double derivative(const std::vector<int>& alpha, const std::vector<double>& u) const override {
    const double v = u[1] - u[0] * u[0];
    if (!(v > 0.0))
      throw std::domain_error("degenerate sample: nonpositive variance");
    double out = 0.0;
    std::vector<int> beta(alpha.size(), 0);
    // Iterate beta <= alpha componentwise.
    auto rec = [&](auto&& self, std::size_t c, double binom_prod) -> void {
      if (c == alpha.size()) {
        const double p_part = poly_.derivative(beta, u);
        if (p_part == 0.0) return;
        std::vector<int> gamma(alpha.size());
        for (std::size_t i = 0; i < alpha.size(); ++i) gamma[i] = alpha[i] - beta[i];
        out += binom_prod * p_part * var_pow_derivative(gamma, u, v);
        return;
      }
      for (int b = 0; b <= alpha[c]; ++b) {
        beta[c] = b;
        self(self, c + 1,
             binom_prod * binomial(alpha[c], b).convert_to<double>());
      }
      beta[c] = 0;
    };
    rec(rec, 0, 1.0);
    return out;
  }

 private:
  double var_pow_derivative(const std::vector<int>& gamma, const std::vector<double>& u,
                            double v) const {
    for (std::size_t c = 2; c < gamma.size(); ++c)
      if (gamma[c] > 0) return 0.0;
    const int g1 = gamma[0];
    const int g2 = gamma[1];
    const double s = 0.5 * twice_s_;
    auto ff = [](double x, int m) {
      double out = 1.0;
      for (int i = 0; i < m; ++i) out *= x - i;
      return out;
    };
    const double s2 = s - g2;
    double total = 0.0;
    for (int j = 0; 2 * j <= g1; ++j) {
      double term = factorial(g1).convert_to<double>() /
                    (factorial(j) * factorial(g1 - 2 * j)).convert_to<double>();
      term *= ff(s2, g1 - j) * std::pow(v, s2 - (g1 - j));
      term *= detail::int_pow(-2.0 * u[0], g1 - 2 * j);
      if (j % 2 == 1) term = -term;
      total += term;
    }
    return ff(s, g2) * total;
  }

  int dim_;
  PolynomialOracle<double> poly_;
  int twice_s_;
};

struct FunctionalOptions {
  BigRational q{2};
  std::vector<BigRational> alpha;  // linear-combination coefficients; default {1}
  int moment_order = 2;
};

namespace detail {

/// mu_r as a polynomial in the raw moments u_1..u_r:
/// mu_r = sum_j C(r,j) u_j (-u_1)^{r-j}, u_0 = 1.
inline std::map<std::vector<int>, BigRational> central_moment_polynomial(int r) {
  std::map<std::vector<int>, BigRational> terms;
  for (int j = 0; j <= r; ++j) {
    std::vector<int> exps(static_cast<std::size_t>(r), 0);
    exps[0] += r - j;
    if (j >= 1) exps[static_cast<std::size_t>(j - 1)] += 1;
    BigRational coeff(binomial(r, j));
    if ((r - j) % 2 == 1) coeff = -coeff;
    terms[exps] += coeff;
  }
  return terms;
}

template <class Scalar>
typename SmoothFunctionOfMeans<Scalar>::Lift power_lift(int r) {
  return [r](const std::vector<Scalar>& raw, std::vector<Scalar>& out) {
    out.resize(static_cast<std::size_t>(r));
    Scalar p = raw[0];
    out[0] = p;
    for (int e = 2; e <= r; ++e) {
      p *= raw[0];
      out[static_cast<std::size_t>(e - 1)] = p;
    }
  };
}

template <class Scalar>
std::vector<Scalar> to_scalars(const std::vector<BigRational>& values) {
  std::vector<Scalar> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(scalar_cast<Scalar>(v));
  return out;
}

}  // namespace detail

inline const std::vector<std::string>& functional_names() {
  static const std::vector<std::string> names = {
      "power-of-mean", "linear-comb-power", "ratio-of-means", "harmonic-product",
      "central-moment", "stddev", "mean-over-std", "skewness"};
  return names;
}

/// Build a catalog functional by name. Functionals involving square roots
/// (stddev, mean-over-std, skewness) are double-only; the rest also
/// instantiate with BigRational for exact arithmetic.
template <class Scalar>
std::unique_ptr<Functional<Scalar>> make_functional(const std::string& name,
                                                    const FunctionalOptions& opt = {}) {
  using Smooth = SmoothFunctionOfMeans<Scalar>;
  const std::vector<BigRational> alpha = opt.alpha.empty()
                                             ? std::vector<BigRational>{BigRational(1)}
                                             : opt.alpha;

  if (name == "power-of-mean") {
    auto oracle = std::make_shared<LinearCombPowerOracle<Scalar>>(detail::to_scalars<Scalar>(alpha),
                                                                  opt.q);
    const int d = static_cast<int>(alpha.size());
    return std::make_unique<Smooth>(name, d, d, typename Smooth::Lift{}, std::move(oracle), 7);
  }
  if (name == "linear-comb-power") {
    auto oracle = std::make_shared<LinearCombPowerOracle<Scalar>>(detail::to_scalars<Scalar>(alpha),
                                                                  opt.q);
    return std::make_unique<KSampleFunctionOfMeans<Scalar>>(name, static_cast<int>(alpha.size()),
                                                            std::move(oracle), 7);
  }
  if (name == "ratio-of-means") {
    return std::make_unique<Smooth>(name, 2, 2, typename Smooth::Lift{},
                                    std::make_shared<RatioOracle<Scalar>>(), 7);
  }
  if (name == "harmonic-product") {
    return std::make_unique<KSampleFunctionOfMeans<Scalar>>(
        name, 2, std::make_shared<HarmonicProductOracle<Scalar>>(), 7);
  }
  if (name == "central-moment") {
    const int r = opt.moment_order;
    if (r < 2) throw std::invalid_argument("central-moment: order must be >= 2");
    auto oracle = std::make_shared<PolynomialOracle<Scalar>>(r, detail::central_moment_polynomial(r));
    return std::make_unique<Smooth>(name, 1, r, detail::power_lift<Scalar>(r), std::move(oracle), 7);
  }
  if (name == "stddev" || name == "mean-over-std" || name == "skewness") {
    if constexpr (std::is_same_v<Scalar, double>) {
      if (name == "stddev") {
        auto oracle = std::make_shared<PolyTimesVarPowOracle>(
            2, std::map<std::vector<int>, BigRational>{{{0, 0}, BigRational(1)}}, 1);
        return std::make_unique<Smooth>(name, 1, 2, detail::power_lift<Scalar>(2), std::move(oracle), 3);
      }
      if (name == "mean-over-std") {
        auto oracle = std::make_shared<PolyTimesVarPowOracle>(
            2, std::map<std::vector<int>, BigRational>{{{1, 0}, BigRational(1)}}, -1);
        return std::make_unique<Smooth>(name, 1, 2, detail::power_lift<Scalar>(2), std::move(oracle), 2);
      }
      // skewness: (u3 - 3 u1 u2 + 2 u1^3) (u2 - u1^2)^{-3/2}
      std::map<std::vector<int>, BigRational> poly{
          {{0, 0, 1}, BigRational(1)},
          {{1, 1, 0}, BigRational(-3)},
          {{3, 0, 0}, BigRational(2)}};
      auto oracle = std::make_shared<PolyTimesVarPowOracle>(3, std::move(poly), -3);
      return std::make_unique<Smooth>(name, 1, 3, detail::power_lift<Scalar>(3), std::move(oracle), 3);
    } else {
      throw std::invalid_argument("functional '" + name + "' requires double arithmetic (square root)");
    }
  }
  throw std::invalid_argument("unknown functional '" + name + "'");
}

}  // namespace debias
