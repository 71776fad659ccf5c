#include "richkde/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>

namespace richkde::io {

namespace {

std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
    text.remove_prefix(1);
  while (!text.empty() &&
         (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  return text;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  while (true) {
    const std::size_t pos = text.find(sep, begin);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(begin));
      return parts;
    }
    parts.push_back(text.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

double parse_field_double(std::string_view field, const std::string& where) {
  const std::string_view trimmed = trim(field);
  double value = 0.0;
  const auto* end = trimmed.data() + trimmed.size();
  const auto [ptr, ec] = std::from_chars(trimmed.data(), end, value);
  if (ec != std::errc{} || ptr != end || trimmed.empty())
    throw InputFormatError(where + ": cannot parse number from \"" +
                           std::string(field) + "\"");
  if (!std::isfinite(value))
    throw InputFormatError(where + ": non-finite value \"" + std::string(field) + "\"");
  return value;
}

long long parse_field_long(std::string_view field, const std::string& where) {
  const std::string_view trimmed = trim(field);
  long long value = 0;
  const auto* end = trimmed.data() + trimmed.size();
  const auto [ptr, ec] = std::from_chars(trimmed.data(), end, value);
  if (ec != std::errc{} || ptr != end || trimmed.empty())
    throw InputFormatError(where + ": cannot parse integer from \"" +
                           std::string(field) + "\"");
  return value;
}

}  // namespace

Eigen::MatrixXd read_csv_matrix(std::istream& in, bool skip_header) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_number = 0;
  std::size_t columns = 0;
  bool header_pending = skip_header;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split(line, ',');
    std::vector<double> row;
    row.reserve(fields.size());
    const std::string where = "line " + std::to_string(line_number);
    for (const auto& field : fields) row.push_back(parse_field_double(field, where));
    if (columns == 0)
      columns = row.size();
    else if (row.size() != columns)
      throw InputFormatError(where + ": expected " + std::to_string(columns) +
                             " fields, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw IoError("read failure while scanning CSV");
  if (rows.empty()) throw InputFormatError("no data rows in CSV input");
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(columns));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < columns; ++j)
      matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return matrix;
}

void write_csv_matrix(std::ostream& out, const Eigen::MatrixXd& matrix,
                      const std::vector<std::string>& column_names) {
  if (static_cast<Eigen::Index>(column_names.size()) != matrix.cols())
    throw std::invalid_argument("write_csv_matrix: column name count mismatch");
  for (std::size_t j = 0; j < column_names.size(); ++j) {
    if (j > 0) out << ',';
    out << column_names[j];
  }
  out << '\n';
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(matrix(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failure while emitting CSV");
}

std::string format_double(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) throw std::runtime_error("format_double: buffer too small");
  return std::string(buffer, ptr);
}

EvaluationGrid parse_grid_spec(const std::string& spec) {
  const auto dims = split(spec, ',');
  std::vector<std::vector<double>> axes;
  axes.reserve(dims.size());
  for (const auto& dim : dims) {
    const auto parts = split(dim, ':');
    if (parts.size() != 3)
      throw InputFormatError("grid spec \"" + std::string(dim) +
                             "\": expected start:step:stop");
    const double start = parse_field_double(parts[0], "grid spec");
    const double step = parse_field_double(parts[1], "grid spec");
    const double stop = parse_field_double(parts[2], "grid spec");
    std::vector<double> axis;
    if (step == 0.0) {
      axis.push_back(start);
    } else {
      if (step < 0.0)
        throw InputFormatError("grid spec: step must be nonnegative");
      if (stop < start)
        throw InputFormatError("grid spec: stop must be >= start");
      const double raw_count = (stop - start) / step + 1e-9;
      if (raw_count > 1e6)
        throw InputFormatError("grid spec: more than 1e6 points in one dimension");
      const auto count = static_cast<std::size_t>(raw_count) + 1;
      axis.reserve(count);
      for (std::size_t k = 0; k < count; ++k)
        axis.push_back(start + static_cast<double>(k) * step);
    }
    axes.push_back(std::move(axis));
  }

  std::size_t total = 1;
  for (const auto& axis : axes) {
    total *= axis.size();
    if (total > 1000000)
      throw InputFormatError("grid spec: more than 1e6 points total");
  }
  Eigen::MatrixXd points(static_cast<Eigen::Index>(total),
                         static_cast<Eigen::Index>(axes.size()));
  for (std::size_t row = 0; row < total; ++row) {
    std::size_t remainder = row;
    // first dimension slowest
    for (std::size_t dim = axes.size(); dim-- > 0;) {
      points(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(dim)) =
          axes[dim][remainder % axes[dim].size()];
      remainder /= axes[dim].size();
    }
  }
  return EvaluationGrid(std::move(points));
}

std::vector<double> parse_double_list(const std::string& spec) {
  if (spec.rfind("lin:", 0) == 0) {
    const auto parts = split(std::string_view(spec).substr(4), ':');
    if (parts.size() != 3)
      throw InputFormatError("list spec \"" + spec + "\": expected lin:lo:hi:count");
    const double lo = parse_field_double(parts[0], "list spec");
    const double hi = parse_field_double(parts[1], "list spec");
    const long long count = parse_field_long(parts[2], "list spec");
    if (count < 1 || count > 1000000)
      throw InputFormatError("list spec: count must be in [1, 1e6]");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
      values.push_back(lo);
    } else {
      for (long long k = 0; k + 1 < count; ++k)
        values.push_back(lo + static_cast<double>(k) * (hi - lo) /
                                  static_cast<double>(count - 1));
      values.push_back(hi);  // endpoints exact regardless of rounding
    }
    return values;
  }
  std::vector<double> values;
  for (const auto& field : split(spec, ','))
    values.push_back(parse_field_double(field, "list spec"));
  return values;
}

std::vector<long long> parse_long_list(const std::string& spec) {
  std::vector<long long> values;
  for (const auto& field : split(spec, ','))
    values.push_back(parse_field_long(field, "list spec"));
  return values;
}

ReferenceDistribution parse_distribution_spec(const std::string& spec, int d) {
  if (spec == "normal") return ReferenceDistribution::standard_normal(d);
  const std::string prefix = "mixture:";
  if (spec.rfind(prefix, 0) != 0)
    throw InputFormatError("distribution spec \"" + spec +
                           "\": expected \"normal\" or \"mixture:...\"");
  std::vector<ReferenceDistribution::Component> components;
  for (const auto& chunk : split(std::string_view(spec).substr(prefix.size()), ';')) {
    const auto fields = split(chunk, ',');
    if (fields.size() != static_cast<std::size_t>(d) + 2)
      throw InputFormatError("distribution spec component \"" + std::string(chunk) +
                             "\": expected weight, " + std::to_string(d) +
                             " mean coordinates, stdev");
    ReferenceDistribution::Component component;
    component.weight = parse_field_double(fields[0], "distribution spec");
    component.mean = Eigen::VectorXd(d);
    for (int j = 0; j < d; ++j)
      component.mean[j] =
          parse_field_double(fields[static_cast<std::size_t>(j) + 1], "distribution spec");
    component.stdev = parse_field_double(fields.back(), "distribution spec");
    components.push_back(std::move(component));
  }
  return ReferenceDistribution::gaussian_mixture(std::move(components));
}

}  // namespace richkde::io
