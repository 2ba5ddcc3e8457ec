#pragma once

// The three series estimators with bias O(n0^-p): the V form (falling
// factorial normalizers, partition sums weighted by c(pi)), the S form
// (per-order corrections S_i divided by (n-1)_i), and the T form (the same
// numerators re-expanded as a power series in 1/n and truncated at total
// order p-1). All coefficient algebra is exact; data enters only through
// the t_pi moment products.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coeffs.hpp"
#include "functional.hpp"
#include "moments.hpp"
#include "partition.hpp"
#include "rational.hpp"

namespace debias {

enum class EstimatorKind { plug_in, v, s, t };

inline const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::plug_in: return "plug-in";
    case EstimatorKind::v: return "v";
    case EstimatorKind::s: return "s";
    case EstimatorKind::t: return "t";
  }
  return "?";
}

inline EstimatorKind estimator_kind_from_string(const std::string& text) {
  if (text == "plug-in" || text == "plugin") return EstimatorKind::plug_in;
  if (text == "v") return EstimatorKind::v;
  if (text == "s") return EstimatorKind::s;
  if (text == "t") return EstimatorKind::t;
  throw std::invalid_argument("unknown estimator kind '" + text + "'");
}

template <class Scalar>
struct EstimateReport {
  EstimatorKind kind = EstimatorKind::plug_in;
  int p = 1;
  std::vector<long> sample_sizes;
  Scalar plug_in{};
  Scalar value{};
  /// Additive contribution per correction order (V: order r0 of 1/n^(r0/..);
  /// S: order i; T: total order r). Empty for the plug-in.
  std::vector<std::pair<int, Scalar>> corrections;
  /// Published series length, when tabulated for this (kind, p, k).
  std::optional<long> term_count;
};

/// Published term counts for the three estimators: exact closed forms in
/// s_m = C(k, m) for p <= 5, plus the tabulated k = 1 values at p = 6, 7
/// (V and S only). Empty when not tabulated.
inline std::optional<long> term_count(EstimatorKind kind, int p, int k) {
  if (p < 1 || k < 1) throw std::invalid_argument("term_count: p and k must be >= 1");
  if (kind == EstimatorKind::plug_in) return 1;
  const long s2 = binomial(k, 2).convert_to<long>();
  const long s3 = binomial(k, 3).convert_to<long>();
  const long s4 = binomial(k, 4).convert_to<long>();
  switch (p) {
    case 1: return 1;
    case 2: return k + 1;
    case 3:
      return (kind == EstimatorKind::s) ? s2 + 3 * k + 1 : s2 + 4 * k + 1;
    case 4:
      switch (kind) {
        case EstimatorKind::v: return s3 + 8 * s2 + 10 * k + 1;
        case EstimatorKind::s: return s3 + 3 * s2 + 7 * k + 1;
        default: return s3 + 7 * s2 + 10 * k + 1;
      }
    case 5:
      switch (kind) {
        case EstimatorKind::v: return s4 + 14 * s3 + 31 * s2 + 21 * k + 1;
        case EstimatorKind::s: return s4 + 9 * s3 + 15 * s2 + 14 * k + 1;
        default: return s4 + 13 * s3 + 25 * s2 + 20 * k + 1;
      }
    default:
      break;
  }
  if (k == 1 && (p == 6 || p == 7)) {
    if (kind == EstimatorKind::v) return p == 6 ? 42 : 77;
    if (kind == EstimatorKind::s) return p == 6 ? 25 : 44;
  }
  return std::nullopt;
}

namespace detail {

inline void check_order(const char* what, int p, int max_p) {
  if (p < 1) throw std::invalid_argument(std::string(what) + ": order p must be >= 1");
  if (p > max_p)
    throw std::invalid_argument(std::string(what) + ": order p=" + std::to_string(p) +
                                " beyond supported maximum " + std::to_string(max_p));
}

inline void check_sizes(const char* what, const std::vector<long>& sizes, long minimum) {
  for (long n : sizes)
    if (n < minimum)
      throw std::invalid_argument(std::string(what) + ": sample size " + std::to_string(n) +
                                  " too small for requested order (need >= " +
                                  std::to_string(minimum) + ")");
}

template <class Scalar>
std::vector<long> table_sizes(const std::vector<MomentTable<Scalar>>& tables) {
  std::vector<long> out;
  out.reserve(tables.size());
  for (const auto& t : tables) out.push_back(t.n());
  return out;
}

/// Enumerate the per-sample block structures of one S/T correction order i0:
/// a partition (i_1 >= ... >= i_m) of i0 with m <= k blocks, assigned to
/// distinct samples j_1..j_m, requiring j_l < j_{l+1} whenever
/// i_l = i_{l+1} so that equal blocks are not double counted.
template <class Fn>
void for_each_block_assignment(int i0, int k, Fn&& fn) {
  for (const Partition& blocks : partitions(i0)) {
    const int m = blocks.block_count();
    if (m > k) continue;
    std::vector<int> samples(static_cast<std::size_t>(m));
    std::vector<bool> used(static_cast<std::size_t>(k), false);
    auto rec = [&](auto&& self, int l) -> void {
      if (l == m) {
        fn(blocks, samples);
        return;
      }
      const int tied_floor =
          (l > 0 && blocks.parts[static_cast<std::size_t>(l)] == blocks.parts[static_cast<std::size_t>(l - 1)])
              ? samples[static_cast<std::size_t>(l - 1)] + 1
              : 0;
      for (int j = tied_floor; j < k; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        used[static_cast<std::size_t>(j)] = true;
        samples[static_cast<std::size_t>(l)] = j;
        self(self, l + 1);
        used[static_cast<std::size_t>(j)] = false;
      }
    };
    rec(rec, 0);
  }
}

/// Sum over choices of one s_coeff_terms entry per block of
/// (product of weights) * t_pi(per-sample partitions), shared by the S and T
/// assemblies. `scale` multiplies every weight product.
template <class Scalar>
Scalar blocks_term_sum(const Functional<Scalar>& f, const std::vector<MomentTable<Scalar>>& tables,
                       const Partition& blocks, const std::vector<int>& samples,
                       const BigRational& scale) {
  const int k = static_cast<int>(tables.size());
  const int m = blocks.block_count();
  std::vector<Partition> pis(static_cast<std::size_t>(k));
  Scalar total(0);
  auto rec = [&](auto&& self, int l, const BigRational& weight) -> void {
    if (l == m) {
      const Scalar value = f.t_pi(pis, tables);
      if (value != Scalar(0)) total += scalar_cast<Scalar>(weight) * value;
      return;
    }
    const int i_l = blocks.parts[static_cast<std::size_t>(l)];
    const int j_l = samples[static_cast<std::size_t>(l)];
    for (const auto& [pi, d] : s_coeff_terms(i_l)) {
      pis[static_cast<std::size_t>(j_l)] = pi;
      self(self, l + 1, weight * d);
    }
    pis[static_cast<std::size_t>(j_l)] = Partition{};
  };
  rec(rec, 0, scale);
  return total;
}

}  // namespace detail

/// The V-form normalized partition sum for one order vector r (one entry per
/// sample): a product over samples of falling-factorial normalizers and
/// c(pi) n^{m(pi)} weights, contracted against t_pi. Zero whenever any
/// r_j = 1.
template <class Scalar>
Scalar v_hat_r(const Functional<Scalar>& f, const std::vector<MomentTable<Scalar>>& tables,
               const std::vector<int>& r) {
  const int k = static_cast<int>(tables.size());
  if (static_cast<int>(r.size()) != k)
    throw std::invalid_argument("v_hat_r: one order per sample required");
  for (int rj : r)
    if (rj == 1) return Scalar(0);

  std::vector<Partition> pis(static_cast<std::size_t>(k));
  Scalar total(0);
  auto rec = [&](auto&& self, int j, const BigRational& weight) -> void {
    if (j == k) {
      const Scalar value = f.t_pi(pis, tables);
      if (value != Scalar(0)) total += scalar_cast<Scalar>(weight) * value;
      return;
    }
    const long nj = tables[static_cast<std::size_t>(j)].n();
    const int rj = r[static_cast<std::size_t>(j)];
    const BigRational norm = BigRational(1) / falling_factorial(BigRational(nj), rj);
    const auto& sym = sym_coeff_table(rj);
    for (const Partition& pi : partitions_excluding_ones(rj)) {
      BigInt n_power = 1;
      for (int b = 0; b < pi.block_count(); ++b) n_power *= nj;
      pis[static_cast<std::size_t>(j)] = pi;
      self(self, j + 1, weight * norm * BigRational(sym.coeff(pi) * n_power));
    }
    pis[static_cast<std::size_t>(j)] = Partition{};
  };
  rec(rec, 0, BigRational(1));
  return total;
}

template <class Scalar>
EstimateReport<Scalar> v_estimate_with_tables(const Functional<Scalar>& f,
                                              const std::vector<MomentTable<Scalar>>& tables,
                                              int p) {
  detail::check_order("v_estimate", p, f.max_p());
  EstimateReport<Scalar> report;
  report.kind = EstimatorKind::v;
  report.p = p;
  report.sample_sizes = detail::table_sizes(tables);
  detail::check_sizes("v_estimate", report.sample_sizes, 2 * p - 1);
  report.plug_in = f.plug_in(tables);
  report.value = report.plug_in;
  report.term_count = term_count(EstimatorKind::v, p, static_cast<int>(tables.size()));
  const int k = static_cast<int>(tables.size());
  for (int r0 = 2; r0 <= 2 * p - 2; ++r0) {
    Scalar contribution(0);
    for (const auto& r : compositions(r0, k)) {
      const Scalar part = v_hat_r(f, tables, r);
      if (part == Scalar(0)) continue;
      BigRational weight(1);
      for (int rj : r) weight /= BigRational(factorial(rj));
      contribution += scalar_cast<Scalar>(weight) * part;
    }
    report.corrections.emplace_back(r0, contribution);
    report.value += contribution;
  }
  return report;
}

template <class Scalar>
EstimateReport<Scalar> s_estimate_with_tables(const Functional<Scalar>& f,
                                              const std::vector<MomentTable<Scalar>>& tables,
                                              int p) {
  detail::check_order("s_estimate", p, f.max_p());
  EstimateReport<Scalar> report;
  report.kind = EstimatorKind::s;
  report.p = p;
  report.sample_sizes = detail::table_sizes(tables);
  detail::check_sizes("s_estimate", report.sample_sizes, p);
  report.plug_in = f.plug_in(tables);
  report.value = report.plug_in;
  report.term_count = term_count(EstimatorKind::s, p, static_cast<int>(tables.size()));
  const int k = static_cast<int>(tables.size());
  for (int i0 = 1; i0 <= p - 1; ++i0) {
    Scalar contribution(0);
    detail::for_each_block_assignment(i0, k, [&](const Partition& blocks,
                                                 const std::vector<int>& samples) {
      BigRational scale(1);
      for (int l = 0; l < blocks.block_count(); ++l) {
        const long nj = tables[static_cast<std::size_t>(samples[static_cast<std::size_t>(l)])].n();
        scale /= falling_factorial(BigRational(nj - 1), blocks.parts[static_cast<std::size_t>(l)]);
      }
      contribution += detail::blocks_term_sum(f, tables, blocks, samples, scale);
    });
    report.corrections.emplace_back(i0, contribution);
    report.value += contribution;
  }
  return report;
}

template <class Scalar>
EstimateReport<Scalar> t_estimate_with_tables(const Functional<Scalar>& f,
                                              const std::vector<MomentTable<Scalar>>& tables,
                                              int p) {
  detail::check_order("t_estimate", p, f.max_p());
  EstimateReport<Scalar> report;
  report.kind = EstimatorKind::t;
  report.p = p;
  report.sample_sizes = detail::table_sizes(tables);
  detail::check_sizes("t_estimate", report.sample_sizes, p);
  report.plug_in = f.plug_in(tables);
  report.value = report.plug_in;
  report.term_count = term_count(EstimatorKind::t, p, static_cast<int>(tables.size()));
  const int k = static_cast<int>(tables.size());
  // Total order r combines the correction order i0 with b extra powers of
  // 1/n from expanding each 1/(n_j - 1)_{i_l} as sum_beta g_beta_i n^{-i-beta}.
  for (int r = 1; r <= p - 1; ++r) {
    Scalar contribution(0);
    for (int i0 = 1; i0 <= r; ++i0) {
      const int b = r - i0;
      detail::for_each_block_assignment(i0, k, [&](const Partition& blocks,
                                                   const std::vector<int>& samples) {
        const int m = blocks.block_count();
        BigRational series(0);
        for (const auto& beta : compositions(b, m)) {
          BigRational piece(1);
          for (int l = 0; l < m; ++l) {
            const int i_l = blocks.parts[static_cast<std::size_t>(l)];
            const int beta_l = beta[static_cast<std::size_t>(l)];
            const long nj = tables[static_cast<std::size_t>(samples[static_cast<std::size_t>(l)])].n();
            BigInt n_power = 1;
            for (int e = 0; e < i_l + beta_l; ++e) n_power *= nj;
            piece *= BigRational(g_beta_i(beta_l, i_l)) / BigRational(n_power);
          }
          series += piece;
        }
        if (series != 0)
          contribution += detail::blocks_term_sum(f, tables, blocks, samples, series);
      });
    }
    report.corrections.emplace_back(r, contribution);
    report.value += contribution;
  }
  return report;
}

/// Moment order the tables must carry for a given estimator order.
inline int required_moment_order(EstimatorKind kind, int p) {
  if (kind == EstimatorKind::plug_in || p == 1) return 2;
  return 2 * p - 2;
}

template <class Scalar>
EstimateReport<Scalar> estimate_with_tables(const Functional<Scalar>& f,
                                            const std::vector<MomentTable<Scalar>>& tables,
                                            EstimatorKind kind, int p) {
  switch (kind) {
    case EstimatorKind::plug_in: {
      EstimateReport<Scalar> report;
      report.kind = EstimatorKind::plug_in;
      report.p = 1;
      report.sample_sizes = detail::table_sizes(tables);
      report.plug_in = f.plug_in(tables);
      report.value = report.plug_in;
      report.term_count = 1;
      return report;
    }
    case EstimatorKind::v: return v_estimate_with_tables(f, tables, p);
    case EstimatorKind::s: return s_estimate_with_tables(f, tables, p);
    case EstimatorKind::t: return t_estimate_with_tables(f, tables, p);
  }
  throw std::logic_error("estimate_with_tables: bad kind");
}

template <class Scalar>
EstimateReport<Scalar> estimate(const Functional<Scalar>& f, const std::vector<Sample<Scalar>>& samples,
                                EstimatorKind kind, int p) {
  detail::check_order("estimate", p, f.max_p());
  const auto tables = build_tables(f, samples, required_moment_order(kind, p));
  return estimate_with_tables(f, tables, kind, p);
}

template <class Scalar>
EstimateReport<Scalar> v_estimate(const Functional<Scalar>& f, const std::vector<Sample<Scalar>>& samples, int p) {
  return estimate(f, samples, EstimatorKind::v, p);
}
template <class Scalar>
EstimateReport<Scalar> s_estimate(const Functional<Scalar>& f, const std::vector<Sample<Scalar>>& samples, int p) {
  return estimate(f, samples, EstimatorKind::s, p);
}
template <class Scalar>
EstimateReport<Scalar> t_estimate(const Functional<Scalar>& f, const std::vector<Sample<Scalar>>& samples, int p) {
  return estimate(f, samples, EstimatorKind::t, p);
}

}  // namespace debias
