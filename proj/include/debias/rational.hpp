#pragma once

// Exact rational scalar built on boost::multiprecision, plus the scalar
// traits that let the estimation routines run in either double or exact
// rational arithmetic from a single code path.

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace debias {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Parse a decimal literal ("2", "-0.125", "1e-3", "2.5e4") or a fraction
/// ("3/7") into an exact rational. Throws std::invalid_argument on anything
/// else; the input must be fully consumed.
inline BigRational parse_rational(std::string_view text) {
  auto fail = [&]() -> BigRational {
    throw std::invalid_argument("parse_rational: cannot parse '" + std::string(text) + "'");
  };
  std::size_t pos = 0;
  auto more = [&] { return pos < text.size(); };
  auto digits = [&](BigInt& out) {
    std::size_t start = pos;
    while (more() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      out = out * 10 + (text[pos] - '0');
      ++pos;
    }
    return pos - start;
  };

  bool negative = false;
  if (more() && (text[pos] == '+' || text[pos] == '-')) negative = text[pos++] == '-';

  BigInt int_part = 0;
  std::size_t int_digits = digits(int_part);

  if (more() && text[pos] == '/') {
    ++pos;
    BigInt den = 0;
    if (int_digits == 0 || digits(den) == 0 || more() || den == 0) return fail();
    BigRational value(int_part, den);
    return negative ? -value : value;
  }

  BigInt scale = 1;
  if (more() && text[pos] == '.') {
    ++pos;
    std::size_t frac_digits = digits(int_part);
    if (int_digits == 0 && frac_digits == 0) return fail();
    for (std::size_t i = 0; i < frac_digits; ++i) scale *= 10;
  } else if (int_digits == 0) {
    return fail();
  }

  long exponent = 0;
  if (more() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool exp_negative = false;
    if (more() && (text[pos] == '+' || text[pos] == '-')) exp_negative = text[pos++] == '-';
    BigInt exp_value = 0;
    if (digits(exp_value) == 0 || exp_value > 9999) return fail();
    exponent = exp_value.convert_to<long>();
    if (exp_negative) exponent = -exponent;
  }
  if (more()) return fail();

  BigRational value(int_part, scale);
  for (long i = 0; i < exponent; ++i) value *= 10;
  for (long i = 0; i > exponent; --i) value /= 10;
  return negative ? -value : value;
}

/// Render as "p/q", or just "p" when the denominator is one.
inline std::string to_string(const BigRational& value) {
  std::string out = numerator(value).str();
  if (denominator(value) != 1) out += "/" + denominator(value).str();
  return out;
}

/// True when the rational is an integer; `value` must then fit the target.
inline bool is_integer(const BigRational& value) { return denominator(value) == 1; }

template <class Scalar>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double from_rational(const BigRational& q) { return q.convert_to<double>(); }
};

template <>
struct scalar_traits<BigRational> {
  static constexpr bool exact = true;
  static const BigRational& from_rational(const BigRational& q) { return q; }
};

/// Convert an exact rational into the scalar type used by a computation.
template <class Scalar>
Scalar scalar_cast(const BigRational& q) {
  return scalar_traits<Scalar>::from_rational(q);
}

}  // namespace debias
