#pragma once

// Seeded Monte Carlo benchmark: four experiments sweeping a true parameter
// over a grid, evaluating a roster of estimators on common random datasets
// and aggregating bias and mean squared error into CSV rows. Identical
// configuration always produces identical bytes.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "catalog.hpp"
#include "estimators.hpp"
#include "moments.hpp"
#include "rng.hpp"

namespace debias {

struct Experiment {
  /// One of alpha-mu-sq, ratio-exp, sigma-exp, mu-over-sigma-normal.
  std::string id;
  long n = 100;
  long reps = 100;
  std::uint64_t seed = 0;
  long bootstrap_replicates = 1000;
  /// Estimator names to evaluate; empty selects the full roster.
  std::vector<std::string> roster;
  /// True-parameter sweep; empty selects the experiment's default grid.
  std::vector<double> grid;
};

struct BenchRow {
  std::string experiment;
  double grid_param = 0;
  std::string estimator;
  long n = 0;
  long reps = 0;
  std::uint64_t seed = 0;
  double mean_estimate = 0;
  double avg_abs_bias = 0;
  double mse = 0;
  bool not_applicable = false;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"alpha-mu-sq", "ratio-exp", "sigma-exp",
                                                 "mu-over-sigma-normal"};
  return names;
}

inline const std::vector<std::string>& default_roster() {
  static const std::vector<std::string> names = {
      "plug_in",   "s_p2",      "t_p2",
      "v_p2",      "jackknife", "bootstrap",
      "infinitesimal_jackknife", "target", "sen"};
  return names;
}

inline std::vector<double> default_grid(const std::string& id) {
  std::vector<double> grid;
  if (id == "alpha-mu-sq") {
    for (int j = 0; j <= 10; ++j) grid.push_back(static_cast<double>(j) / 10.0);
  } else if (id == "ratio-exp") {
    for (int j = 0; j <= 8; ++j) grid.push_back(std::pow(10.0, -1.0 + 0.25 * j));
  } else if (id == "sigma-exp" || id == "mu-over-sigma-normal") {
    for (int j = 0; j <= 8; ++j) grid.push_back(std::pow(2.0, -2.0 + 0.5 * j));
  } else {
    throw std::invalid_argument("bench: unknown experiment '" + id + "'");
  }
  return grid;
}

/// The estimand the experiment sweeps; the data are drawn so that this is
/// the exact value of the functional.
inline double experiment_truth(const std::string& id, double grid_value) {
  if (id == "alpha-mu-sq") return 1.0;
  return grid_value;
}

inline Sample<double> draw_normal(long n, double mean, double sd, RngStream& stream) {
  if (!(sd > 0.0)) throw std::invalid_argument("draw_normal: sd must be positive");
  if (n < 1) throw std::invalid_argument("draw_normal: n must be positive");
  Sample<double> out;
  out.rows.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) out.rows.push_back({mean + sd * stream.normal()});
  return out;
}

inline Sample<double> draw_exponential(long n, double mean, RngStream& stream) {
  if (!(mean > 0.0)) throw std::invalid_argument("draw_exponential: mean must be positive");
  if (n < 1) throw std::invalid_argument("draw_exponential: n must be positive");
  Sample<double> out;
  out.rows.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) out.rows.push_back({stream.exponential(mean)});
  return out;
}

/// Fill in default grid and roster and validate the configuration.
inline Experiment resolved(Experiment exp) {
  bool known_id = false;
  for (const auto& name : experiment_names()) known_id = known_id || name == exp.id;
  if (!known_id) throw std::invalid_argument("bench: unknown experiment '" + exp.id + "'");
  if (exp.grid.empty()) exp.grid = default_grid(exp.id);
  if (exp.roster.empty())
    exp.roster = default_roster();
  else {
    for (const auto& name : exp.roster) {
      bool known = false;
      for (const auto& candidate : default_roster()) known = known || candidate == name;
      if (!known) throw std::invalid_argument("bench: unknown estimator '" + name + "'");
    }
  }
  if (exp.reps < 1) throw std::invalid_argument("bench: reps must be positive");
  if (exp.n < 3) throw std::invalid_argument("bench: need n >= 3");
  if (exp.bootstrap_replicates < 1)
    throw std::invalid_argument("bench: bootstrap replicate count must be positive");
  return exp;
}

/// Datasets for one (grid point, replication) cell, drawn from a stream
/// addressed by exactly that cell so the design is paired across estimators.
inline std::vector<Sample<double>> experiment_data(const Experiment& exp, std::size_t grid_index,
                                                   long rep) {
  const double g = exp.grid.at(grid_index);
  RngStream stream(exp.seed, "data:" + exp.id, static_cast<std::uint64_t>(grid_index),
                   static_cast<std::uint64_t>(rep));
  std::vector<Sample<double>> samples;
  if (exp.id == "alpha-mu-sq") {
    samples.push_back(draw_normal(exp.n, 1.0, 1.0, stream));
    samples.push_back(draw_normal(exp.n, 1.0, 1.0, stream));
  } else if (exp.id == "ratio-exp") {
    Sample<double> s;
    s.rows.reserve(static_cast<std::size_t>(exp.n));
    for (long i = 0; i < exp.n; ++i)
      s.rows.push_back({stream.exponential(g), stream.exponential(1.0)});
    samples.push_back(std::move(s));
  } else if (exp.id == "sigma-exp") {
    samples.push_back(draw_exponential(exp.n, g, stream));
  } else if (exp.id == "mu-over-sigma-normal") {
    samples.push_back(draw_normal(exp.n, g, 1.0, stream));
  } else {
    throw std::invalid_argument("bench: unknown experiment '" + exp.id + "'");
  }
  return samples;
}

/// The functional under study at one grid point.
inline std::unique_ptr<Functional<double>> experiment_functional(const std::string& id,
                                                                 double grid_value) {
  FunctionalOptions opt;
  if (id == "alpha-mu-sq") {
    opt.q = BigRational(2);
    opt.alpha = {BigRational(grid_value), BigRational(1.0 - grid_value)};
    return make_functional<double>("linear-comb-power", opt);
  }
  if (id == "ratio-exp") return make_functional<double>("ratio-of-means", opt);
  if (id == "sigma-exp") return make_functional<double>("stddev", opt);
  if (id == "mu-over-sigma-normal") return make_functional<double>("mean-over-std", opt);
  throw std::invalid_argument("bench: unknown experiment '" + id + "'");
}

/// Whether an estimator is defined for an experiment: the infinitesimal
/// jackknife needs a single sample, and the normal-approximation comparator
/// exists only where the estimator it approximates is asymptotically normal.
inline bool estimator_applicable(const std::string& id, const std::string& estimator) {
  if (estimator == "infinitesimal_jackknife") return id != "alpha-mu-sq";
  if (estimator == "sen") return id == "alpha-mu-sq" || id == "sigma-exp";
  return true;
}

namespace detail {

inline double bench_evaluate(const Experiment& exp, const std::string& estimator,
                             const Functional<double>& f,
                             const std::vector<Sample<double>>& samples,
                             const std::vector<MomentTable<double>>& tables, double grid_value,
                             std::size_t grid_index, long rep) {
  if (estimator == "plug_in") return f.plug_in(tables);
  if (estimator == "s_p2") return s_estimate_with_tables(f, tables, 2).value;
  if (estimator == "t_p2") return t_estimate_with_tables(f, tables, 2).value;
  if (estimator == "v_p2") return v_estimate_with_tables(f, tables, 2).value;
  if (estimator == "jackknife") return jackknife_correct(f, samples);
  if (estimator == "bootstrap") {
    ResamplingConfig config;
    config.bootstrap_replicates = exp.bootstrap_replicates;
    config.seed = RngStream(exp.seed, "bootstrap-seed:" + exp.id,
                            static_cast<std::uint64_t>(grid_index),
                            static_cast<std::uint64_t>(rep))
                      .next_u64();
    return bootstrap_correct(f, samples, config).value;
  }
  if (estimator == "infinitesimal_jackknife")
    return infinitesimal_jackknife(f, samples.at(0), WeightForm::normalized).value;
  if (estimator == "target") {
    if (exp.id == "alpha-mu-sq") return target_alpha_mu_sq(samples, grid_value);
    if (exp.id == "ratio-exp") return target_ratio_of_means(samples.at(0));
    if (exp.id == "sigma-exp") return target_sigma_exp(samples.at(0));
    return target_mu_over_sigma_normal(samples.at(0));
  }
  if (estimator == "sen") {
    if (exp.id == "alpha-mu-sq") return sen_alpha_mu_sq(samples, grid_value);
    return sen_sigma_exp(samples.at(0));
  }
  throw std::invalid_argument("bench: unknown estimator '" + estimator + "'");
}

}  // namespace detail

/// Run the experiment: R paired replications per grid point, every roster
/// estimator on the same datasets, one output row per (grid point, estimator)
/// in roster order. Fully determined by the configuration including the seed.
inline std::vector<BenchRow> run_experiment(const Experiment& exp_in) {
  const Experiment exp = resolved(exp_in);
  std::vector<BenchRow> rows;
  for (std::size_t gi = 0; gi < exp.grid.size(); ++gi) {
    const double g = exp.grid[gi];
    const double truth = experiment_truth(exp.id, g);
    const auto f = experiment_functional(exp.id, g);
    std::vector<double> sum(exp.roster.size(), 0.0);
    std::vector<double> sq_err(exp.roster.size(), 0.0);
    for (long rep = 0; rep < exp.reps; ++rep) {
      const auto samples = experiment_data(exp, gi, rep);
      const auto tables = build_tables(*f, samples, 2);
      for (std::size_t e = 0; e < exp.roster.size(); ++e) {
        if (!estimator_applicable(exp.id, exp.roster[e])) continue;
        const double est =
            detail::bench_evaluate(exp, exp.roster[e], *f, samples, tables, g, gi, rep);
        sum[e] += est;
        sq_err[e] += (est - truth) * (est - truth);
      }
    }
    for (std::size_t e = 0; e < exp.roster.size(); ++e) {
      BenchRow row;
      row.experiment = exp.id;
      row.grid_param = g;
      row.estimator = exp.roster[e];
      row.n = exp.n;
      row.reps = exp.reps;
      row.seed = exp.seed;
      row.not_applicable = !estimator_applicable(exp.id, exp.roster[e]);
      if (!row.not_applicable) {
        const double reps = static_cast<double>(exp.reps);
        row.mean_estimate = sum[e] / reps;
        row.avg_abs_bias = std::abs(sum[e] / reps - truth);
        row.mse = sq_err[e] / reps;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

/// Shortest round-trip decimal rendering, the stable on-disk number format.
inline std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

/// Write rows as CSV. Not-applicable rows leave the numeric aggregates empty
/// and set the final flag column to 1.
inline void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "experiment,grid_param,estimator,n,reps,seed,mean_estimate,avg_abs_bias,mse,"
        "not_applicable\n";
  for (const auto& row : rows) {
    os << row.experiment << ',' << format_double(row.grid_param) << ',' << row.estimator << ','
       << row.n << ',' << row.reps << ',' << row.seed << ',';
    if (row.not_applicable) {
      os << ",,,1\n";
    } else {
      os << format_double(row.mean_estimate) << ',' << format_double(row.avg_abs_bias) << ','
         << format_double(row.mse) << ",0\n";
    }
  }
}

/// One line per grid point naming the estimator with the smallest average
/// absolute bias.
inline std::string bench_summary(const std::vector<BenchRow>& rows) {
  std::string out;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    const BenchRow* best = nullptr;
    while (j < rows.size() && rows[j].experiment == rows[i].experiment &&
           rows[j].grid_param == rows[i].grid_param) {
      if (!rows[j].not_applicable && (best == nullptr || rows[j].avg_abs_bias < best->avg_abs_bias))
        best = &rows[j];
      ++j;
    }
    out += rows[i].experiment + " grid_param=" + format_double(rows[i].grid_param);
    if (best == nullptr)
      out += ": no applicable estimator\n";
    else
      out += ": lowest |bias| " + best->estimator + " (" + format_double(best->avg_abs_bias) + ")\n";
    i = j;
  }
  return out;
}

}  // namespace debias
