// Derivative oracles and the moment-contraction terms they feed.
// Analytic derivatives are validated against nested central finite
// differences; exact-arithmetic paths against hand-computed rationals.

#include <cmath>
#include <memory>

#include <catch2/catch_amalgamated.hpp>

#include <debias/catalog.hpp>
#include <debias/functional.hpp>
#include <debias/moments.hpp>

using debias::BigRational;
using debias::Partition;
using debias::Sample;

namespace {

// Nested central differences for mixed partials; 2^|alpha| evaluations.
double fd_derivative(const debias::DerivativeOracle<double>& oracle, std::vector<int> alpha,
                     std::vector<double> u, double h) {
  for (std::size_t c = 0; c < alpha.size(); ++c) {
    if (alpha[c] == 0) continue;
    --alpha[c];
    auto up = u;
    auto down = u;
    up[c] += h;
    down[c] -= h;
    return (fd_derivative(oracle, alpha, up, h) - fd_derivative(oracle, alpha, down, h)) /
           (2.0 * h);
  }
  return oracle.derivative(std::vector<int>(alpha.size(), 0), u);
}

void check_against_fd(const debias::DerivativeOracle<double>& oracle,
                      const std::vector<double>& u, int max_order, double h,
                      double tol) {
  const int d = oracle.dim();
  for (int total = 1; total <= max_order; ++total) {
    debias::detail::for_each_exponent_vector(d, total, [&](const std::vector<int>& alpha) {
      const double analytic = oracle.derivative(alpha, u);
      const double numeric = fd_derivative(oracle, alpha, u, h);
      CAPTURE(alpha, analytic, numeric);
      CHECK(std::abs(analytic - numeric) <= tol * (1.0 + std::abs(analytic)));
    });
  }
}

Sample<BigRational> univariate(std::initializer_list<BigRational> values) {
  Sample<BigRational> s;
  for (const auto& v : values) s.rows.push_back({v});
  return s;
}

}  // namespace

TEST_CASE("linear combination power derivatives") {
  SECTION("integer exponent, exact") {
    debias::LinearCombPowerOracle<BigRational> g({BigRational(1)}, BigRational(4));
    const std::vector<BigRational> u = {BigRational(3, 2)};
    CHECK(g.derivative({0}, u) == BigRational(81, 16));
    CHECK(g.derivative({1}, u) == BigRational(27, 2));   // 4 u^3
    CHECK(g.derivative({2}, u) == 27);                   // 12 u^2
    CHECK(g.derivative({3}, u) == 36);                   // 24 u
    CHECK(g.derivative({4}, u) == 24);
    CHECK(g.derivative({5}, u) == 0);
  }

  SECTION("negative exponent, exact") {
    debias::LinearCombPowerOracle<BigRational> g({BigRational(1)}, BigRational(-2));
    const std::vector<BigRational> u = {BigRational(1, 3)};
    CHECK(g.derivative({0}, u) == 9);
    CHECK(g.derivative({1}, u) == -54);      // -2 u^-3
    CHECK(g.derivative({2}, u) == 486);      // 6 u^-4
  }

  SECTION("weighted combination") {
    debias::LinearCombPowerOracle<BigRational> g({BigRational(2), BigRational(-1, 2)},
                                                 BigRational(3));
    const std::vector<BigRational> u = {BigRational(1), BigRational(2)};
    // combo = 2 - 1 = 1
    CHECK(g.derivative({0, 0}, u) == 1);
    CHECK(g.derivative({1, 0}, u) == 6);                   // 3 combo^2 * 2
    CHECK(g.derivative({0, 1}, u) == BigRational(-3, 2));
    CHECK(g.derivative({1, 1}, u) == -6);                  // 6 combo * 2 * (-1/2)
    CHECK(g.derivative({2, 1}, u) == -12);                 // 6 * 4 * (-1/2)
  }

  SECTION("fractional exponent needs double arithmetic") {
    CHECK_THROWS_AS(debias::LinearCombPowerOracle<BigRational>({BigRational(1)}, BigRational(1, 2)),
                    std::invalid_argument);
    debias::LinearCombPowerOracle<double> g({1.0}, BigRational(1, 2));
    const std::vector<double> u = {4.0};
    CHECK(g.derivative({0}, u) == Catch::Approx(2.0));
    CHECK(g.derivative({1}, u) == Catch::Approx(0.25));
    CHECK(g.derivative({2}, u) == Catch::Approx(-1.0 / 32.0));
    CHECK_THROWS_AS(g.derivative({0}, std::vector<double>{-1.0}), std::domain_error);
    check_against_fd(g, {4.0}, 3, 1e-3, 5e-4);
  }

  SECTION("finite difference agreement, two coordinates") {
    debias::LinearCombPowerOracle<double> g({0.7, 0.3}, BigRational(4));
    check_against_fd(g, {1.2, 0.8}, 3, 1e-3, 5e-4);
  }
}

TEST_CASE("ratio of means derivatives") {
  debias::RatioOracle<BigRational> g;
  const std::vector<BigRational> u = {BigRational(2, 3), BigRational(5, 7)};
  CHECK(g.derivative({0, 0}, u) == BigRational(14, 15));
  CHECK(g.derivative({1, 0}, u) == BigRational(7, 5));             // 1/u2
  CHECK(g.derivative({0, 1}, u) == BigRational(2, 3) * BigRational(-49, 25));
  CHECK(g.derivative({1, 1}, u) == BigRational(-49, 25));          // -1/u2^2
  CHECK(g.derivative({2, 0}, u) == 0);
  CHECK(g.derivative({2, 3}, u) == 0);
  CHECK(g.derivative({0, 2}, u) == BigRational(2, 3) * 2 * BigRational(343, 125));
  CHECK(g.derivative({1, 2}, u) == 2 * BigRational(343, 125));

  debias::RatioOracle<double> gd;
  check_against_fd(gd, {1.3, 0.8}, 3, 1e-3, 5e-4);
}

TEST_CASE("harmonic mean product derivatives") {
  debias::HarmonicProductOracle<BigRational> g;
  const std::vector<BigRational> u = {BigRational(1), BigRational(1)};
  CHECK(g.derivative({0, 0}, u) == BigRational(1, 2));
  // With D = u1 + u2: d/du1 = u2^2 / D^2.
  CHECK(g.derivative({1, 0}, u) == BigRational(1, 4));
  CHECK(g.derivative({0, 1}, u) == BigRational(1, 4));
  // Pure second derivative: -2 u2^2 / D^3.
  CHECK(g.derivative({2, 0}, u) == BigRational(-1, 4));
  CHECK(g.derivative({0, 2}, u) == BigRational(-1, 4));
  // Mixed: 2 u1 u2 / D^3.
  CHECK(g.derivative({1, 1}, u) == BigRational(1, 4));

  // Symmetry under swapping the samples.
  const std::vector<BigRational> v = {BigRational(2, 5), BigRational(7, 4)};
  const std::vector<BigRational> vswap = {BigRational(7, 4), BigRational(2, 5)};
  for (int a = 0; a <= 3; ++a) {
    for (int b = 0; a + b <= 4; ++b) {
      CHECK(g.derivative({a, b}, v) == g.derivative({b, a}, vswap));
    }
  }

  debias::HarmonicProductOracle<double> gd;
  check_against_fd(gd, {0.9, 1.7}, 3, 1e-3, 5e-4);
}

TEST_CASE("polynomial oracle differentiates exactly") {
  // P = u3 - 3 u1 u2 + 2 u1^3 (third central moment in raw coordinates).
  debias::PolynomialOracle<BigRational> g(3, debias::detail::central_moment_polynomial(3));
  const std::vector<BigRational> u = {BigRational(2), BigRational(5), BigRational(11)};
  CHECK(g.derivative({0, 0, 0}, u) == 11 - 3 * 10 + 2 * 8);
  CHECK(g.derivative({1, 0, 0}, u) == -3 * 5 + 6 * 4);
  CHECK(g.derivative({0, 1, 0}, u) == -6);
  CHECK(g.derivative({0, 0, 1}, u) == 1);
  CHECK(g.derivative({1, 1, 0}, u) == -3);
  CHECK(g.derivative({2, 0, 0}, u) == 24);
  CHECK(g.derivative({3, 0, 0}, u) == 12);
  CHECK(g.derivative({4, 0, 0}, u) == 0);
  CHECK(g.derivative({0, 2, 0}, u) == 0);
}

TEST_CASE("poly times variance power derivatives") {
  SECTION("stddev oracle values") {
    debias::PolyTimesVarPowOracle g(2, {{{0, 0}, BigRational(1)}}, 1);
    const std::vector<double> u = {0.4, 1.1};
    const double var = 1.1 - 0.16;
    CHECK(g.derivative({0, 0}, u) == Catch::Approx(std::sqrt(var)));
    CHECK(g.derivative({0, 2}, u) == Catch::Approx(-0.25 * std::pow(var, -1.5)));
    CHECK(g.derivative({2, 0}, u) ==
          Catch::Approx(-0.16 * std::pow(var, -1.5) - std::pow(var, -0.5)));
    CHECK(g.derivative({1, 1}, u) == Catch::Approx(0.5 * 0.4 * std::pow(var, -1.5)));
    check_against_fd(g, u, 3, 1e-4, 5e-4);
    CHECK_THROWS_AS(g.derivative({0, 0}, std::vector<double>{1.0, 1.0}), std::domain_error);
  }

  SECTION("mean-over-std oracle") {
    debias::PolyTimesVarPowOracle g(2, {{{1, 0}, BigRational(1)}}, -1);
    const std::vector<double> u = {0.6, 1.3};
    const double var = 1.3 - 0.36;
    CHECK(g.derivative({0, 0}, u) == Catch::Approx(0.6 / std::sqrt(var)));
    check_against_fd(g, u, 3, 1e-4, 5e-4);
  }

  SECTION("skewness oracle") {
    std::map<std::vector<int>, BigRational> poly{
        {{0, 0, 1}, BigRational(1)}, {{1, 1, 0}, BigRational(-3)}, {{3, 0, 0}, BigRational(2)}};
    debias::PolyTimesVarPowOracle g(3, std::move(poly), -3);
    check_against_fd(g, {0.3, 1.2, 0.9}, 3, 1e-4, 5e-4);
  }
}

TEST_CASE("moment contraction terms for one sample") {
  debias::FunctionalOptions quartic;
  quartic.q = BigRational(4);

  SECTION("any unit part vanishes") {
    auto f = debias::make_functional<BigRational>("power-of-mean", quartic);
    const auto sample = univariate({BigRational(1), BigRational(4), BigRational(7)});
    const auto tables = debias::build_tables(*f, {sample}, 4);
    CHECK(f->t_pi({Partition{1}}, tables) == 0);
    CHECK(f->t_pi({Partition{2, 1}}, tables) == 0);
  }

  SECTION("power of mean, quadratic term") {
    auto f = debias::make_functional<BigRational>("power-of-mean", quartic);
    const auto sample = univariate({BigRational(1), BigRational(2), BigRational(6)});
    const auto tables = debias::build_tables(*f, {sample}, 4);
    const BigRational mean = 3;
    const BigRational mu2 = (4 + 1 + 9) / BigRational(3);
    // T[2] = g'' mu2 = 12 u^2 mu2.
    CHECK(f->t_pi({Partition{2}}, tables) == 12 * mean * mean * mu2);
    // T[2^2] = g'''' mu2^2 = 24 mu2^2.
    CHECK(f->t_pi({Partition{2, 2}}, tables) == 24 * mu2 * mu2);
  }

  SECTION("variance functional contraction values") {
    debias::FunctionalOptions variance;
    variance.moment_order = 2;
    auto f = debias::make_functional<BigRational>("central-moment", variance);
    const auto sample = univariate({BigRational(0), BigRational(1), BigRational(5)});
    const auto tables = debias::build_tables(*f, {sample}, 2 * 2);
    const BigRational mu2 = tables[0].pure(0, 2);
    // g = u2 - u1^2 on the lifted pair; only d^2/du1^2 = -2 survives at
    // second order, contracted with mu[20] = mu2.
    CHECK(f->t_pi({Partition{2}}, tables) == -2 * mu2);
    CHECK(f->plug_in(tables) == mu2);
  }

  SECTION("stddev quadratic term matches the closed form") {
    auto f = debias::make_functional<double>("stddev");
    Sample<double> s;
    for (double v : {0.2, 1.1, -0.4, 2.5, 0.9, -1.3, 0.7}) s.rows.push_back({v});
    const auto tables = debias::build_tables(*f, {s}, 4);
    const auto dt = debias::central_moments(s, 4);
    const double mu2 = dt.moment({2});
    const double mu4 = dt.moment({4});
    const double sigma = std::sqrt(mu2);
    const double beta4 = mu4 / (mu2 * mu2);
    CHECK(f->t_pi({Partition{2}}, tables) ==
          Catch::Approx(-sigma * (beta4 + 3.0) / 4.0).epsilon(1e-12));
  }
}

TEST_CASE("moment contraction terms for two samples") {
  auto f = debias::make_functional<BigRational>("harmonic-product");
  const auto s1 = univariate({BigRational(1), BigRational(2), BigRational(3)});
  const auto s2 = univariate({BigRational(2), BigRational(2), BigRational(5)});
  const auto tables = debias::build_tables(*f, {s1, s2}, 4);
  const BigRational u1 = 2, u2 = 3;
  const BigRational mu2_1 = BigRational(2, 3);
  const BigRational mu2_2 = 2;
  const BigRational D = u1 + u2;

  debias::HarmonicProductOracle<BigRational> g;
  CHECK(f->plug_in(tables) == u1 * u2 / D);
  CHECK(f->t_pi({Partition{2}, Partition{}}, tables) ==
        g.derivative({2, 0}, {u1, u2}) * mu2_1);
  CHECK(f->t_pi({Partition{}, Partition{2}}, tables) ==
        g.derivative({0, 2}, {u1, u2}) * mu2_2);
  CHECK(f->t_pi({Partition{2}, Partition{2}}, tables) ==
        g.derivative({2, 2}, {u1, u2}) * mu2_1 * mu2_2);
  CHECK(f->t_pi({Partition{1}, Partition{2}}, tables) == 0);
  CHECK_THROWS_AS(f->t_pi({Partition{2}}, tables), std::invalid_argument);
}

TEST_CASE("weighted plug-in evaluation") {
  auto f = debias::make_functional<double>("ratio-of-means");
  Sample<double> s;
  s.rows = {{1.0, 2.0}, {3.0, 4.0}, {5.0, 9.0}};
  const std::vector<double> equal = {1.0, 1.0, 1.0};
  CHECK(f->weighted_plug_in(s, equal) == Catch::Approx(3.0 / 5.0));
  const std::vector<double> tilted = {1.0, 0.0, 1.0};
  CHECK(f->weighted_plug_in(s, tilted) == Catch::Approx(3.0 / 5.5));
  CHECK_THROWS_AS(f->weighted_plug_in(s, std::vector<double>{0.0, 0.0, 0.0}),
                  std::invalid_argument);

  auto ks = debias::make_functional<double>("harmonic-product");
  CHECK_THROWS_AS(ks->weighted_plug_in(s, equal), std::logic_error);
}

TEST_CASE("catalog construction rules") {
  CHECK_THROWS_AS(debias::make_functional<double>("no-such-functional"), std::invalid_argument);
  CHECK_THROWS_AS(debias::make_functional<BigRational>("stddev"), std::invalid_argument);
  debias::FunctionalOptions first_moment;
  first_moment.moment_order = 1;
  CHECK_THROWS_AS(debias::make_functional<BigRational>("central-moment", first_moment),
                  std::invalid_argument);
  CHECK(debias::make_functional<double>("mean-over-std")->max_p() == 2);
  CHECK(debias::make_functional<double>("skewness")->max_p() == 3);
  CHECK(debias::make_functional<double>("ratio-of-means")->max_p() == 7);
  CHECK(debias::make_functional<double>("harmonic-product")->arity() == 2);
  debias::FunctionalOptions two_sample;
  two_sample.alpha = {BigRational(1, 2), BigRational(1, 2)};
  two_sample.q = BigRational(2);
  CHECK(debias::make_functional<BigRational>("linear-comb-power", two_sample)->arity() == 2);
  CHECK(debias::functional_names().size() == 8);
}

TEST_CASE("sample arity and dimension checks") {
  auto f = debias::make_functional<BigRational>("ratio-of-means");
  const auto s = univariate({BigRational(1)});
  CHECK_THROWS_AS(debias::build_tables(*f, {s}, 2), std::invalid_argument);
  CHECK_THROWS_AS(debias::build_tables(*f, {s, s}, 2), std::invalid_argument);
}
