#pragma once

// Comparator estimators for the benchmark: jackknife and bootstrap bias
// corrections, the infinitesimal jackknife in both weight forms, and the
// closed-form target and normal-approximation comparators specific to the
// benchmark experiments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "estimators.hpp"
#include "functional.hpp"
#include "moments.hpp"
#include "rng.hpp"

namespace debias {

struct ResamplingConfig {
  long bootstrap_replicates = 1000;
  std::uint64_t seed = 0;
  /// Step for weight finite differences; 0 selects the default 1/(3n).
  double fd_step = 0;
};

namespace detail {

inline double plug_in_value(const Functional<double>& f, const std::vector<Sample<double>>& samples) {
  return f.plug_in(build_tables(f, samples, 2));
}

}  // namespace detail

/// Jackknife bias correction: n T(F-hat) minus (n-1) times the mean
/// leave-one-out plug-in value, applied per sample additively when k > 1.
/// Exactly removes the first-order bias of smooth plug-in estimates.
inline double jackknife_correct(const Functional<double>& f,
                                const std::vector<Sample<double>>& samples) {
  for (const auto& s : samples)
    if (s.size() < 2)
      throw std::invalid_argument("jackknife_correct: need at least 2 observations per sample");
  const double base = detail::plug_in_value(f, samples);
  double value = base;
  std::vector<Sample<double>> workspace = samples;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const long nj = samples[j].size();
    double loo_sum = 0;
    for (long i = 0; i < nj; ++i) {
      auto& rows = workspace[j].rows;
      rows = samples[j].rows;
      rows.erase(rows.begin() + i);
      loo_sum += detail::plug_in_value(f, workspace);
    }
    workspace[j].rows = samples[j].rows;
    value += static_cast<double>(nj - 1) * (base - loo_sum / static_cast<double>(nj));
  }
  return value;
}

struct BootstrapResult {
  double value = std::numeric_limits<double>::quiet_NaN();
  /// Replicates that evaluated successfully.
  long used = 0;
  /// Replicates skipped because the resample was degenerate for the functional.
  long skipped = 0;
};

/// Once-iterated bootstrap bias correction 2 T(F-hat) - mean of T(F-hat*)
/// over B resamples, deterministic given the seed. Degenerate resamples
/// (plug-in evaluation raises a domain error) are skipped and counted.
inline BootstrapResult bootstrap_correct(const Functional<double>& f,
                                         const std::vector<Sample<double>>& samples,
                                         const ResamplingConfig& config) {
  if (config.bootstrap_replicates < 1)
    throw std::invalid_argument("bootstrap_correct: need at least one replicate");
  const double base = detail::plug_in_value(f, samples);
  std::vector<Sample<double>> resampled = samples;
  BootstrapResult out;
  double acc = 0;
  for (long b = 0; b < config.bootstrap_replicates; ++b) {
    for (std::size_t j = 0; j < samples.size(); ++j) {
      RngStream stream(config.seed, "bootstrap", static_cast<std::uint64_t>(j),
                       static_cast<std::uint64_t>(b));
      const auto& rows = samples[j].rows;
      for (auto& row : resampled[j].rows) row = rows[stream.uniform_index(rows.size())];
    }
    try {
      acc += detail::plug_in_value(f, resampled);
      ++out.used;
    } catch (const std::domain_error&) {
      ++out.skipped;
    }
  }
  if (out.used == 0) throw std::runtime_error("bootstrap_correct: every resample was degenerate");
  out.value = 2.0 * base - acc / static_cast<double>(out.used);
  return out;
}

/// The two weight conventions for the infinitesimal jackknife. The raw form
/// perturbs a single observation weight and reproduces the second order t
/// estimate; the normalized form moves along the mixture path that keeps the
/// total weight at one and reproduces the second order s estimate.
enum class WeightForm { raw, normalized };

struct IjResult {
  double value = std::numeric_limits<double>::quiet_NaN();
  double plug_in = std::numeric_limits<double>::quiet_NaN();
  /// Richardson-extrapolated sum over observations of the second weight
  /// derivative of the plug-in value.
  double q_star = std::numeric_limits<double>::quiet_NaN();
  /// Step-halving error ratio; close to 4 when the step is in the good
  /// regime, NaN when the differences were too small to measure it.
  double richardson_ratio = std::numeric_limits<double>::quiet_NaN();
};

/// Infinitesimal jackknife: plug-in value minus Q*/(2 n^2) in the raw form
/// or Q*/(2 n (n-1)) in the normalized form, where Q* estimates
/// sum_i d^2/dw_i^2 of the weighted plug-in at uniform weights by central
/// finite differences with one step halving for Richardson extrapolation.
/// Fails if the step-halving ratio is not within 20 percent of 4.
inline IjResult infinitesimal_jackknife(const Functional<double>& f, const Sample<double>& sample,
                                        WeightForm form, const ResamplingConfig& config = {}) {
  const long n = sample.size();
  if (n < 2) throw std::invalid_argument("infinitesimal_jackknife: need at least 2 observations");
  if (config.fd_step < 0)
    throw std::invalid_argument("infinitesimal_jackknife: step must be positive");
  const double h = config.fd_step == 0 ? 1.0 / (3.0 * static_cast<double>(n)) : config.fd_step;
  if (!(h > 0) || h >= 1.0 / static_cast<double>(n))
    throw std::invalid_argument("infinitesimal_jackknife: step must lie in (0, 1/n)");

  const double uniform = 1.0 / static_cast<double>(n);
  std::vector<double> weights(static_cast<std::size_t>(n), uniform);
  IjResult out;
  out.plug_in = f.weighted_plug_in(sample, weights);

  const auto perturbed = [&](long i, double t) {
    if (form == WeightForm::raw) {
      weights[static_cast<std::size_t>(i)] = uniform + t;
      const double value = f.weighted_plug_in(sample, weights);
      weights[static_cast<std::size_t>(i)] = uniform;
      return value;
    }
    std::fill(weights.begin(), weights.end(), (1.0 - t) * uniform);
    weights[static_cast<std::size_t>(i)] += t;
    const double value = f.weighted_plug_in(sample, weights);
    std::fill(weights.begin(), weights.end(), uniform);
    return value;
  };
  const auto second_difference_sum = [&](double step) {
    double acc = 0;
    for (long i = 0; i < n; ++i) acc += perturbed(i, step) + perturbed(i, -step);
    return (acc - 2.0 * static_cast<double>(n) * out.plug_in) / (step * step);
  };

  const double q1 = second_difference_sum(h);
  const double q2 = second_difference_sum(h / 2);
  const double q4 = second_difference_sum(h / 4);
  const double coarse = q1 - q2;
  const double fine = q2 - q4;
  if (std::abs(coarse) + std::abs(fine) <= 1e-8 * (1.0 + std::abs(q4))) {
    out.q_star = q4;
  } else {
    out.richardson_ratio = coarse / fine;
    if (!(std::abs(out.richardson_ratio - 4.0) <= 0.8))
      throw std::runtime_error(
          "infinitesimal_jackknife: finite-difference convergence check failed (step-halving "
          "ratio " +
          std::to_string(out.richardson_ratio) + ", expected about 4)");
    out.q_star = (4.0 * q4 - q2) / 3.0;
  }
  const double divisor = form == WeightForm::raw
                             ? 2.0 * static_cast<double>(n) * static_cast<double>(n)
                             : 2.0 * static_cast<double>(n) * static_cast<double>(n - 1);
  out.value = out.plug_in - out.q_star / divisor;
  return out;
}

namespace detail {

inline void require_univariate_comparator(const Sample<double>& sample, const char* context) {
  if (sample.dim() != 1 || sample.size() < 2)
    throw std::invalid_argument(std::string(context) +
                                ": expected a univariate sample with at least 2 observations");
}

inline double sample_mean_1d(const Sample<double>& sample) {
  double mean = 0;
  for (const auto& row : sample.rows) mean += row[0];
  return mean / static_cast<double>(sample.size());
}

inline double sample_m2_1d(const Sample<double>& sample, double mean) {
  double m2 = 0;
  for (const auto& row : sample.rows) m2 += (row[0] - mean) * (row[0] - mean);
  return m2 / static_cast<double>(sample.size());
}

}  // namespace detail

/// Target comparator for the squared weighted mean combination of two
/// samples with unit variances: the plug-in square minus its exact
/// first-order variance term alpha1^2/n1 + (1-alpha1)^2/n2.
inline double target_alpha_mu_sq(const std::vector<Sample<double>>& samples, double alpha1) {
  if (samples.size() != 2)
    throw std::invalid_argument("target_alpha_mu_sq: expected two samples");
  for (const auto& s : samples) detail::require_univariate_comparator(s, "target_alpha_mu_sq");
  const double a2 = 1.0 - alpha1;
  const double m = alpha1 * detail::sample_mean_1d(samples[0]) + a2 * detail::sample_mean_1d(samples[1]);
  return m * m - alpha1 * alpha1 / static_cast<double>(samples[0].size()) -
         a2 * a2 / static_cast<double>(samples[1].size());
}

/// Target comparator for the ratio of means of a bivariate sample:
/// ((n-1)/n) times the plug-in ratio.
inline double target_ratio_of_means(const Sample<double>& sample) {
  if (sample.dim() != 2 || sample.size() < 2)
    throw std::invalid_argument(
        "target_ratio_of_means: expected a bivariate sample with at least 2 observations");
  const double n = static_cast<double>(sample.size());
  double mean1 = 0, mean2 = 0;
  for (const auto& row : sample.rows) {
    mean1 += row[0];
    mean2 += row[1];
  }
  if (mean2 == 0.0) throw std::domain_error("target_ratio_of_means: zero denominator mean");
  return (n - 1.0) / n * (mean1 / mean2);
}

/// Target comparator for the standard deviation of exponential data: the
/// sample mean, which is exactly unbiased for the exponential scale.
inline double target_sigma_exp(const Sample<double>& sample) {
  detail::require_univariate_comparator(sample, "target_sigma_exp");
  return detail::sample_mean_1d(sample);
}

/// Target comparator for mean over standard deviation under normality:
/// sqrt(2) Gamma((n-1)/2) Ybar / (sqrt(n-1) Gamma((n-2)/2) S_Y) with S_Y the
/// (n-1)-divisor standard deviation; exactly unbiased for normal data.
inline double target_mu_over_sigma_normal(const Sample<double>& sample) {
  detail::require_univariate_comparator(sample, "target_mu_over_sigma_normal");
  const long n = sample.size();
  if (n < 3) throw std::invalid_argument("target_mu_over_sigma_normal: need at least 3 observations");
  const double mean = detail::sample_mean_1d(sample);
  const double ss = detail::sample_m2_1d(sample, mean) * static_cast<double>(n);
  if (!(ss > 0.0)) throw std::domain_error("target_mu_over_sigma_normal: zero variance");
  const double s_y = std::sqrt(ss / static_cast<double>(n - 1));
  const double nm1 = static_cast<double>(n - 1);
  const double factor = std::sqrt(2.0 / nm1) *
                        std::exp(std::lgamma(nm1 / 2.0) - std::lgamma((nm1 - 1.0) / 2.0));
  return factor * mean / s_y;
}

/// Normal-approximation comparator for the squared weighted mean
/// combination: the maximizer of the N(omega, P + Q omega) likelihood at the
/// observed square, with P = 3 c^2 / n, Q = 4 c / n, c = alpha1^2 + (1-alpha1)^2.
inline double sen_alpha_mu_sq(const std::vector<Sample<double>>& samples, double alpha1) {
  if (samples.size() != 2) throw std::invalid_argument("sen_alpha_mu_sq: expected two samples");
  for (const auto& s : samples) detail::require_univariate_comparator(s, "sen_alpha_mu_sq");
  if (samples[0].size() != samples[1].size())
    throw std::invalid_argument("sen_alpha_mu_sq: samples must have equal size");
  const double n = static_cast<double>(samples[0].size());
  const double a2 = 1.0 - alpha1;
  const double m = alpha1 * detail::sample_mean_1d(samples[0]) + a2 * detail::sample_mean_1d(samples[1]);
  const double y = m * m;
  const double c = alpha1 * alpha1 + a2 * a2;
  const double P = 3.0 * c * c / n;
  const double Q = 4.0 * c / n;
  const double B = Q * Q + 2.0 * P;
  const double disc = B * B + 4.0 * Q * (2.0 * P * y - Q * P + Q * y * y);
  return (-B + std::sqrt(disc)) / (2.0 * Q);
}

/// Normal-approximation comparator for the exponential scale: the maximizer
/// of the N(omega, omega^2/n) likelihood at the observed plug-in standard
/// deviation, sigma-hat (sqrt(n^2 + 4n) - n) / 2.
inline double sen_sigma_exp(const Sample<double>& sample) {
  detail::require_univariate_comparator(sample, "sen_sigma_exp");
  const double n = static_cast<double>(sample.size());
  const double mean = detail::sample_mean_1d(sample);
  const double m2 = detail::sample_m2_1d(sample, mean);
  if (!(m2 > 0.0)) throw std::domain_error("sen_sigma_exp: zero variance");
  return std::sqrt(m2) * (std::sqrt(n * n + 4.0 * n) - n) / 2.0;
}

}  // namespace debias
