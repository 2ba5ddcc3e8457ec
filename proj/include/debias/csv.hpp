#pragma once

// CSV ingestion for samples: a header row naming columns, then numeric rows.
// Values parse as double by default; the rational instantiation parses
// decimal literals exactly.

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "moments.hpp"
#include "rational.hpp"

namespace debias {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.erase(field.begin());
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.pop_back();
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <class Scalar>
Scalar parse_field(const std::string& text);

template <>
inline double parse_field<double>(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw std::invalid_argument("cannot parse numeric field '" + text + "'");
  return value;
}

template <>
inline BigRational parse_field<BigRational>(const std::string& text) {
  return parse_rational(text);
}

}  // namespace detail

/// Read one sample from a CSV stream: first line is the header (column names
/// are not interpreted, only counted), remaining nonempty lines are rows.
template <class Scalar>
Sample<Scalar> read_sample_csv(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(source + ": empty input (missing header row)");
  const std::size_t columns = detail::split_csv_line(line).size();
  if (columns == 0) throw std::runtime_error(source + ": header row has no columns");

  Sample<Scalar> sample;
  long line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != columns)
      throw std::runtime_error(source + ":" + std::to_string(line_number) + ": expected " +
                               std::to_string(columns) + " fields, got " + std::to_string(fields.size()));
    std::vector<Scalar> row;
    row.reserve(columns);
    for (const auto& field : fields) {
      try {
        row.push_back(detail::parse_field<Scalar>(field));
      } catch (const std::exception& e) {
        throw std::runtime_error(source + ":" + std::to_string(line_number) + ": " + e.what());
      }
    }
    sample.rows.push_back(std::move(row));
  }
  if (sample.rows.empty())
    throw std::runtime_error(source + ": no data rows");
  return sample;
}

template <class Scalar>
Sample<Scalar> read_sample_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_sample_csv<Scalar>(in, path);
}

}  // namespace debias
