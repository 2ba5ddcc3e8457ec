#pragma once

// Hand-expanded second-order closed forms for a few common functionals.
// Each function returns the p=2 corrected estimate directly from sample
// moments in one pass, and must agree with the generic machinery to
// floating-point accuracy; the generic path stays the source of truth.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "estimators.hpp"
#include "moments.hpp"

namespace debias {

namespace detail {

/// Correction divisor at second order: n-1 for the s flavor, n for t.
inline double fast_divisor(EstimatorKind kind, long n, const char* context) {
  if (kind == EstimatorKind::s) return static_cast<double>(n - 1);
  if (kind == EstimatorKind::t) return static_cast<double>(n);
  throw std::invalid_argument(std::string(context) + ": kind must be s or t");
}

inline void require_univariate(const Sample<double>& sample, long min_n, const char* context) {
  if (sample.size() < min_n)
    throw std::invalid_argument(std::string(context) + ": need at least " + std::to_string(min_n) +
                                " observations");
  if (sample.dim() != 1)
    throw std::invalid_argument(std::string(context) + ": expected a univariate sample");
}

struct CentralMoments1 {
  double mean = 0;
  double m2 = 0;
  double m3 = 0;
  double m4 = 0;
};

inline CentralMoments1 central_moments_1d(const Sample<double>& sample) {
  const double n = static_cast<double>(sample.size());
  CentralMoments1 out;
  for (const auto& row : sample.rows) out.mean += row[0];
  out.mean /= n;
  for (const auto& row : sample.rows) {
    const double d = row[0] - out.mean;
    const double d2 = d * d;
    out.m2 += d2;
    out.m3 += d2 * d;
    out.m4 += d2 * d2;
  }
  out.m2 /= n;
  out.m3 /= n;
  out.m4 /= n;
  return out;
}

inline double real_power(double base, double q, const char* context) {
  if (base > 0.0) return std::pow(base, q);
  if (q == std::rint(q)) {
    if (base == 0.0 && q < 0.0)
      throw std::domain_error(std::string(context) + ": zero mean combination with negative exponent");
    return std::pow(base, q);
  }
  throw std::domain_error(std::string(context) +
                          ": nonpositive mean combination with fractional exponent");
}

}  // namespace detail

/// Second-order standard deviation estimate
///   sigma_hat * (1 + (b4 + 3) / (8 D)),
/// with b4 the sample kurtosis and D the flavor divisor.
inline double fast_stddev_p2(const Sample<double>& sample, EstimatorKind kind) {
  const char* context = "stddev fast path";
  const double D = detail::fast_divisor(kind, sample.size(), context);
  detail::require_univariate(sample, 2, context);
  const auto m = detail::central_moments_1d(sample);
  if (!(m.m2 > 0.0)) throw std::domain_error(std::string(context) + ": nonpositive variance");
  const double b4 = m.m4 / (m.m2 * m.m2);
  return std::sqrt(m.m2) * (1.0 + (b4 + 3.0) / (8.0 * D));
}

/// Second-order mean-over-standard-deviation estimate
///   t_hat + (b3 / 2 - t_hat (3 b4 + 1) / 8) / D,
/// with b3, b4 the sample skewness and kurtosis.
inline double fast_mean_over_std_p2(const Sample<double>& sample, EstimatorKind kind) {
  const char* context = "mean-over-std fast path";
  const double D = detail::fast_divisor(kind, sample.size(), context);
  detail::require_univariate(sample, 2, context);
  const auto m = detail::central_moments_1d(sample);
  if (!(m.m2 > 0.0)) throw std::domain_error(std::string(context) + ": nonpositive variance");
  const double sigma = std::sqrt(m.m2);
  const double t_hat = m.mean / sigma;
  const double b3 = m.m3 / (m.m2 * sigma);
  const double b4 = m.m4 / (m.m2 * m.m2);
  return t_hat + (b3 / 2.0 - t_hat * (3.0 * b4 + 1.0) / 8.0) / D;
}

/// Second-order ratio-of-means estimate for a bivariate sample,
///   r_hat + (c11 - r_hat v2) / (mean2^2 D),
/// with c11 the sample covariance and v2 the denominator-coordinate variance.
inline double fast_ratio_of_means_p2(const Sample<double>& sample, EstimatorKind kind) {
  const char* context = "ratio fast path";
  const double D = detail::fast_divisor(kind, sample.size(), context);
  if (sample.size() < 2)
    throw std::invalid_argument(std::string(context) + ": need at least 2 observations");
  if (sample.dim() != 2)
    throw std::invalid_argument(std::string(context) + ": expected a bivariate sample");
  const double n = static_cast<double>(sample.size());
  double mean1 = 0, mean2 = 0;
  for (const auto& row : sample.rows) {
    mean1 += row[0];
    mean2 += row[1];
  }
  mean1 /= n;
  mean2 /= n;
  if (mean2 == 0.0) throw std::domain_error(std::string(context) + ": zero denominator mean");
  double c11 = 0, v2 = 0;
  for (const auto& row : sample.rows) {
    const double d1 = row[0] - mean1;
    const double d2 = row[1] - mean2;
    c11 += d1 * d2;
    v2 += d2 * d2;
  }
  c11 /= n;
  v2 /= n;
  const double r_hat = mean1 / mean2;
  return r_hat + (c11 - r_hat * v2) / (mean2 * mean2 * D);
}

/// Second-order estimate of (alpha' mu)^q from one multivariate sample,
///   m^q (1 - C(q,2) alpha' V alpha / (m^2 D)),
/// with m = alpha' mean, V the sample covariance, C(q,2) = q(q-1)/2.
inline double fast_power_of_mean_p2(const Sample<double>& sample, const std::vector<double>& alpha,
                                    double q, EstimatorKind kind) {
  const char* context = "power-of-mean fast path";
  const double D = detail::fast_divisor(kind, sample.size(), context);
  if (sample.size() < 2)
    throw std::invalid_argument(std::string(context) + ": need at least 2 observations");
  if (static_cast<int>(alpha.size()) != sample.dim())
    throw std::invalid_argument(std::string(context) + ": alpha length must match sample dimension");
  const double n = static_cast<double>(sample.size());
  double m = 0;
  std::vector<double> combo(sample.rows.size());
  for (std::size_t i = 0; i < sample.rows.size(); ++i) {
    double z = 0;
    for (std::size_t c = 0; c < alpha.size(); ++c) z += alpha[c] * sample.rows[i][c];
    combo[i] = z;
    m += z;
  }
  m /= n;
  double v = 0;
  for (double z : combo) v += (z - m) * (z - m);
  v /= n;
  const double C = q * (q - 1.0) / 2.0;
  const double head = detail::real_power(m, q, context);
  if (C == 0.0) return head;
  if (m == 0.0) throw std::domain_error(std::string(context) + ": zero mean combination");
  return head * (1.0 - C * v / (m * m * D));
}

/// Second-order estimate of (sum_j alpha_j mu_j)^q from k univariate samples,
///   m^q (1 - C(q,2) m^{-2} sum_j alpha_j^2 v_j / D_j),
/// with per-sample divisors D_j.
inline double fast_linear_comb_power_p2(const std::vector<Sample<double>>& samples,
                                        const std::vector<double>& alpha, double q,
                                        EstimatorKind kind) {
  const char* context = "linear-comb-power fast path";
  if (samples.size() != alpha.size())
    throw std::invalid_argument(std::string(context) + ": one coefficient per sample required");
  if (samples.empty()) throw std::invalid_argument(std::string(context) + ": no samples");
  double m = 0;
  double spread = 0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const double Dj = detail::fast_divisor(kind, samples[j].size(), context);
    detail::require_univariate(samples[j], 2, context);
    const double nj = static_cast<double>(samples[j].size());
    double mean = 0;
    for (const auto& row : samples[j].rows) mean += row[0];
    mean /= nj;
    double vj = 0;
    for (const auto& row : samples[j].rows) vj += (row[0] - mean) * (row[0] - mean);
    vj /= nj;
    m += alpha[j] * mean;
    spread += alpha[j] * alpha[j] * vj / Dj;
  }
  const double C = q * (q - 1.0) / 2.0;
  const double head = detail::real_power(m, q, context);
  if (C == 0.0) return head;
  if (m == 0.0) throw std::domain_error(std::string(context) + ": zero mean combination");
  return head * (1.0 - C * spread / (m * m));
}

}  // namespace debias
