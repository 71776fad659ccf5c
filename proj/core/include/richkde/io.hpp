#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "richkde/reference.hpp"
#include "richkde/sample.hpp"

namespace richkde::io {

// Malformed input text (CSV shape, number syntax, mini-language).
class InputFormatError : public std::runtime_error {
public:
  explicit InputFormatError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem-level failure (unreadable input, unwritable output).
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Rectangular numeric CSV. Errors carry 1-based line numbers; CRLF and
// blank lines are tolerated; non-finite values are rejected.
Eigen::MatrixXd read_csv_matrix(std::istream& in, bool skip_header);

// Header row of column names, then rows in shortest round-trip form.
void write_csv_matrix(std::ostream& out, const Eigen::MatrixXd& matrix,
                      const std::vector<std::string>& column_names);

// Shortest decimal string that parses back to exactly this double.
std::string format_double(double value);

// "start:step:stop" per dimension, comma-joined for d > 1; step 0 means
// the single point {start}. Points are start + k*step up to stop
// (inclusive within rounding slack); dimensions combine as a cartesian
// product with the first dimension slowest.
EvaluationGrid parse_grid_spec(const std::string& spec);

// "a,b,c" literal values, or "lin:lo:hi:count" for count evenly spaced
// values from lo to hi inclusive.
std::vector<double> parse_double_list(const std::string& spec);
std::vector<long long> parse_long_list(const std::string& spec);

// "normal" for the standard normal in d dimensions, or
// "mixture:w,m1,...,md,s;w,m1,...,md,s" for a spherical Gaussian
// mixture (weight, d mean coordinates, standard deviation per
// component).
ReferenceDistribution parse_distribution_spec(const std::string& spec, int d);

}  // namespace richkde::io
