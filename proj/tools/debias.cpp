// Command-line front end: coefficient tables, single-dataset estimation,
// and the Monte Carlo benchmark. Every failure path prints a single
// "error: ..." line to stderr and exits nonzero.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "debias/bench.hpp"
#include "debias/catalog.hpp"
#include "debias/coeffs.hpp"
#include "debias/csv.hpp"
#include "debias/estimators.hpp"
#include "debias/refdata.hpp"

namespace {

using nlohmann::json;

std::string parenthesized(const debias::Partition& pi) {
  std::string out = "(";
  for (std::size_t i = 0; i < pi.parts.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(pi.parts[i]);
  }
  return out + ")";
}

json partition_json(const debias::Partition& pi) {
  json parts = json::array();
  for (const int part : pi.parts) parts.push_back(part);
  return parts;
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out_path);
  if (!file) throw std::runtime_error("cannot write '" + out_path + "'");
  file << text;
}

bool has_unit_part(const debias::Partition& pi) {
  for (const int part : pi.parts)
    if (part == 1) return true;
  return false;
}

int order_of_context(const std::string& context) {
  const auto pos = context.find_last_of(' ');
  return std::stoi(context.substr(pos + 1));
}

struct CoeffsConfig {
  int p = 2;
  int k = 1;
  std::string format = "text";
  std::string out;
};

void run_coeffs(const CoeffsConfig& cfg) {
  if (cfg.p < 1) throw std::invalid_argument("coeffs: p must be at least 1");
  if (cfg.k < 1) throw std::invalid_argument("coeffs: k must be at least 1");

  std::vector<debias::DiscrepancyEntry> discrepancies;
  for (const auto& entry : debias::discrepancy_report())
    if (order_of_context(entry.context) <= cfg.p - 1) discrepancies.push_back(entry);
  std::vector<std::string> notes;
  if (cfg.p - 1 > 6)
    notes.push_back("orders beyond 6 have no printed reference tables; values come from the "
                    "derivation alone");
  if (!discrepancies.empty())
    notes.push_back("derived values are used where the printed listings disagree; see the "
                    "discrepancy entries");

  const auto counts = [&](debias::EstimatorKind kind) {
    return debias::term_count(kind, cfg.p, cfg.k);
  };
  const auto count_str = [](const std::optional<long>& c) {
    return c ? std::to_string(*c) : std::string("unavailable");
  };

  if (cfg.format == "text") {
    std::ostringstream os;
    os << "coefficient tables for order p = " << cfg.p << " (k = " << cfg.k << ")\n\n";
    os << "per-block weights applied to moment brackets, correction orders below p:\n";
    for (int i = 1; i <= cfg.p - 1; ++i) {
      os << "  order " << i << ":\n";
      for (const auto& [pi, value] : debias::s_coeff_terms(i))
        os << "    " << parenthesized(pi) << "  " << debias::to_string(value) << "\n";
    }
    if (cfg.p == 1) os << "  (none at p = 1; the estimate is the plug-in)\n";
    os << "\nsymmetric polynomial coefficients c(pi) without unit parts, weights up to 2p-2:\n";
    for (int r = 2; r <= 2 * cfg.p - 2; ++r) {
      os << "  weight " << r << ":\n";
      for (const auto& [pi, value] : debias::sym_coeff_table(r).entries())
        if (!has_unit_part(pi)) os << "    " << parenthesized(pi) << "  " << value.str() << "\n";
    }
    os << "\nterm counts: v = " << count_str(counts(debias::EstimatorKind::v))
       << ", s = " << count_str(counts(debias::EstimatorKind::s))
       << ", t = " << count_str(counts(debias::EstimatorKind::t)) << "\n";
    if (!discrepancies.empty()) {
      os << "\ndisagreements with the printed listings (derived values are emitted):\n";
      for (const auto& entry : discrepancies) {
        os << "  " << entry.context << ", key " << entry.key << ": printed " << entry.published
           << ", derived " << entry.derived;
        if (!entry.note.empty()) os << " (" << entry.note << ")";
        os << "\n";
      }
    }
    for (const auto& note : notes) os << "note: " << note << "\n";
    write_output(cfg.out, os.str());
    return;
  }

  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "table,order,partition,value,published,note\n";
    for (int i = 1; i <= cfg.p - 1; ++i)
      for (const auto& [pi, value] : debias::s_coeff_terms(i))
        os << "block_weight," << i << "," << debias::to_string(pi) << ","
           << debias::to_string(value) << ",,\n";
    for (int r = 2; r <= 2 * cfg.p - 2; ++r)
      for (const auto& [pi, value] : debias::sym_coeff_table(r).entries())
        if (!has_unit_part(pi))
          os << "sym_coeff," << r << "," << debias::to_string(pi) << "," << value.str() << ",,\n";
    for (const auto& [kind, token] :
         {std::pair{debias::EstimatorKind::v, "v"}, {debias::EstimatorKind::s, "s"},
          {debias::EstimatorKind::t, "t"}}) {
      const auto c = counts(kind);
      os << "term_count," << cfg.p << "," << token << "," << (c ? std::to_string(*c) : "") << ",,"
         << (c ? "" : "unavailable") << "\n";
    }
    for (const auto& entry : discrepancies)
      os << "discrepancy," << order_of_context(entry.context) << "," << entry.key << ","
         << entry.derived << "," << entry.published << ",\"" << entry.note << "\"\n";
    write_output(cfg.out, os.str());
    return;
  }

  if (cfg.format == "json") {
    json doc;
    doc["p"] = cfg.p;
    doc["k"] = cfg.k;
    doc["block_weights"] = json::array();
    for (int i = 1; i <= cfg.p - 1; ++i)
      for (const auto& [pi, value] : debias::s_coeff_terms(i))
        doc["block_weights"].push_back({{"order", i},
                                        {"partition", partition_json(pi)},
                                        {"value", debias::to_string(value)}});
    doc["sym_coeffs"] = json::array();
    for (int r = 2; r <= 2 * cfg.p - 2; ++r)
      for (const auto& [pi, value] : debias::sym_coeff_table(r).entries())
        if (!has_unit_part(pi))
          doc["sym_coeffs"].push_back(
              {{"weight", r}, {"partition", partition_json(pi)}, {"value", value.str()}});
    for (const auto& [kind, token] :
         {std::pair{debias::EstimatorKind::v, "v"}, {debias::EstimatorKind::s, "s"},
          {debias::EstimatorKind::t, "t"}}) {
      const auto c = counts(kind);
      if (c)
        doc["term_counts"][token] = *c;
      else
        doc["term_counts"][token] = nullptr;
    }
    doc["discrepancies"] = json::array();
    for (const auto& entry : discrepancies)
      doc["discrepancies"].push_back({{"order", order_of_context(entry.context)},
                                      {"key", entry.key},
                                      {"published", entry.published},
                                      {"derived", entry.derived},
                                      {"note", entry.note}});
    doc["notes"] = notes;
    write_output(cfg.out, doc.dump(2) + "\n");
    return;
  }
  throw std::invalid_argument("coeffs: unknown format '" + cfg.format + "'");
}

struct EstimateConfig {
  std::vector<std::string> inputs;
  std::string functional;
  int p = 2;
  std::string kind = "s";
  bool exact = false;
  std::string format = "text";
  std::string out;
  std::string q = "2";
  std::vector<std::string> alpha;
  int moment_order = 2;
};

template <class Scalar>
std::string render_scalar(const Scalar& value);

template <>
std::string render_scalar<double>(const double& value) {
  return debias::format_double(value);
}

template <>
std::string render_scalar<debias::BigRational>(const debias::BigRational& value) {
  return debias::to_string(value);
}

template <class Scalar>
void run_estimate_typed(const EstimateConfig& cfg) {
  debias::FunctionalOptions opt;
  opt.q = debias::detail::parse_field<debias::BigRational>(cfg.q);
  for (const auto& text : cfg.alpha)
    opt.alpha.push_back(debias::detail::parse_field<debias::BigRational>(text));
  opt.moment_order = cfg.moment_order;
  const auto f = debias::make_functional<Scalar>(cfg.functional, opt);

  std::vector<debias::Sample<Scalar>> samples;
  for (const auto& path : cfg.inputs) samples.push_back(debias::read_sample_csv_file<Scalar>(path));

  const auto kind = cfg.kind == "v"
                        ? debias::EstimatorKind::v
                        : cfg.kind == "t" ? debias::EstimatorKind::t : debias::EstimatorKind::s;
  const auto report = debias::estimate(*f, samples, kind, cfg.p);

  if (cfg.format == "text") {
    std::ostringstream os;
    os << "functional: " << cfg.functional << "\n";
    os << "sample sizes:";
    for (const long n : report.sample_sizes) os << " " << n;
    os << "\nestimator: " << debias::to_string(report.kind) << ", order p = " << report.p << "\n";
    os << "plug-in: " << render_scalar<Scalar>(report.plug_in) << "\n";
    for (const auto& [order, value] : report.corrections)
      os << "correction order " << order << ": " << render_scalar<Scalar>(value) << "\n";
    os << "estimate: " << render_scalar<Scalar>(report.value) << "\n";
    os << "term count: "
       << (report.term_count ? std::to_string(*report.term_count) : std::string("unavailable"))
       << "\n";
    write_output(cfg.out, os.str());
    return;
  }
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "field,value\n";
    os << "functional," << cfg.functional << "\n";
    os << "kind," << debias::to_string(report.kind) << "\n";
    os << "p," << report.p << "\n";
    std::string sizes;
    for (const long n : report.sample_sizes) {
      if (!sizes.empty()) sizes += " ";
      sizes += std::to_string(n);
    }
    os << "sample_sizes," << sizes << "\n";
    os << "plug_in," << render_scalar<Scalar>(report.plug_in) << "\n";
    for (const auto& [order, value] : report.corrections)
      os << "correction_" << order << "," << render_scalar<Scalar>(value) << "\n";
    os << "estimate," << render_scalar<Scalar>(report.value) << "\n";
    os << "term_count," << (report.term_count ? std::to_string(*report.term_count) : "") << "\n";
    write_output(cfg.out, os.str());
    return;
  }
  if (cfg.format == "json") {
    json doc;
    doc["functional"] = cfg.functional;
    doc["kind"] = debias::to_string(report.kind);
    doc["p"] = report.p;
    doc["sample_sizes"] = report.sample_sizes;
    doc["plug_in"] = render_scalar<Scalar>(report.plug_in);
    doc["corrections"] = json::array();
    for (const auto& [order, value] : report.corrections)
      doc["corrections"].push_back({{"order", order}, {"value", render_scalar<Scalar>(value)}});
    doc["estimate"] = render_scalar<Scalar>(report.value);
    if (report.term_count)
      doc["term_count"] = *report.term_count;
    else
      doc["term_count"] = nullptr;
    doc["exact"] = debias::scalar_traits<Scalar>::exact;
    write_output(cfg.out, doc.dump(2) + "\n");
    return;
  }
  throw std::invalid_argument("estimate: unknown format '" + cfg.format + "'");
}

void run_estimate(const EstimateConfig& cfg) {
  if (cfg.inputs.empty()) throw std::invalid_argument("estimate: at least one --input is required");
  if (cfg.functional.empty()) throw std::invalid_argument("estimate: --functional is required");
  if (cfg.p < 1) throw std::invalid_argument("estimate: p must be at least 1");
  if (cfg.exact)
    run_estimate_typed<debias::BigRational>(cfg);
  else
    run_estimate_typed<double>(cfg);
}

struct BenchConfig {
  std::string experiment;
  long n = 100;
  long reps = 100;
  std::uint64_t seed = 0;
  long bootstrap_reps = 1000;
  std::vector<double> grid;
  std::string out = "bench.csv";
};

void run_bench(const BenchConfig& cfg) {
  debias::Experiment exp;
  exp.id = cfg.experiment;
  exp.n = cfg.n;
  exp.reps = cfg.reps;
  exp.seed = cfg.seed;
  exp.bootstrap_replicates = cfg.bootstrap_reps;
  exp.grid = cfg.grid;
  const auto rows = debias::run_experiment(exp);
  std::ofstream file(cfg.out);
  if (!file) throw std::runtime_error("cannot write '" + cfg.out + "'");
  debias::write_bench_csv(file, rows);
  if (!file) throw std::runtime_error("write to '" + cfg.out + "' failed");
  std::cout << debias::bench_summary(rows);
  std::cout << "wrote " << rows.size() << " rows to " << cfg.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bias-reduced estimation of smooth moment functionals"};
  app.require_subcommand(1);

  CoeffsConfig coeffs_cfg;
  auto* coeffs = app.add_subcommand("coeffs", "print the correction coefficient tables");
  coeffs->add_option("--p", coeffs_cfg.p, "target bias order");
  coeffs->add_option("--k", coeffs_cfg.k, "number of samples for the term counts");
  coeffs->add_option("--format", coeffs_cfg.format, "text, csv, or json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  coeffs->add_option("--out", coeffs_cfg.out, "write to this file instead of stdout");

  EstimateConfig est_cfg;
  auto* est = app.add_subcommand("estimate", "estimate a functional from CSV samples");
  est->add_option("--input", est_cfg.inputs, "sample CSV, one flag per sample in order");
  est->add_option("--functional", est_cfg.functional, "catalog functional name");
  est->add_option("--p", est_cfg.p, "target bias order");
  est->add_option("--kind", est_cfg.kind, "estimator family")
      ->check(CLI::IsMember({"v", "s", "t"}));
  est->add_flag("--exact", est_cfg.exact, "exact rational arithmetic");
  est->add_option("--format", est_cfg.format, "text, csv, or json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  est->add_option("--out", est_cfg.out, "write to this file instead of stdout");
  est->add_option("--q", est_cfg.q, "exponent for power functionals");
  est->add_option("--alpha", est_cfg.alpha, "combination coefficients, one flag per entry");
  est->add_option("--moment-order", est_cfg.moment_order, "order for the central-moment functional");

  BenchConfig bench_cfg;
  auto* bench = app.add_subcommand("bench", "run a Monte Carlo benchmark experiment");
  bench->add_option("--experiment", bench_cfg.experiment, "experiment id")
      ->required()
      ->check(CLI::IsMember(debias::experiment_names()));
  bench->add_option("--n", bench_cfg.n, "sample size");
  bench->add_option("--reps", bench_cfg.reps, "replications per grid point");
  bench->add_option("--seed", bench_cfg.seed, "master seed");
  bench->add_option("--bootstrap-reps", bench_cfg.bootstrap_reps, "bootstrap resamples");
  bench->add_option("--grid", bench_cfg.grid, "grid values overriding the default sweep");
  bench->add_option("--out", bench_cfg.out, "output CSV path");

  try {
    app.parse(argc, argv);
    if (coeffs->parsed()) run_coeffs(coeffs_cfg);
    if (est->parsed()) run_estimate(est_cfg);
    if (bench->parsed()) run_bench(bench_cfg);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
