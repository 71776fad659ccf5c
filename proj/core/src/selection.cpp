#include "richkde/selection.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace richkde {

double lambert_w(double x) {
  const double min_arg = -std::exp(-1.0) + 1e-12;
  if (!std::isfinite(x) || x < min_arg)
    throw std::domain_error("lambert_w: argument below -1/e + 1e-12");

  double w;
  if (x >= 0.0) {
    w = std::log1p(x);
  } else if (x > -0.25) {
    w = x * (1.0 - x + 1.5 * x * x);
  } else {
    // Series around the branch point in p = sqrt(2(1 + e x)).
    const double p = std::sqrt(2.0 * (1.0 + std::numbers::e * x));
    w = -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0;
  }

  const double tolerance = 1e-12 * std::max(1.0, std::abs(x));
  for (int iter = 0; iter < 50; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (std::abs(f) <= tolerance) return w;
    const double wp1 = w + 1.0;
    const double denominator = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denominator == 0.0 || !std::isfinite(denominator)) break;
    w -= f / denominator;
  }
  if (std::abs(w * std::exp(w) - x) <= tolerance) return w;
  throw NumericalFailure("lambert_w: no convergence in 50 iterations");
}

double optimal_bandwidth(long long n, int d, int r) {
  if (n < 2) throw std::invalid_argument("optimal_bandwidth: n must be >= 2");
  if (d < 1) throw std::invalid_argument("optimal_bandwidth: d must be >= 1");
  if (r < 1) throw std::invalid_argument("optimal_bandwidth: r must be >= 1");
  const double exponent_n = -1.0 / (4.0 * r + d);
  const double exponent_c = 2.0 * r / (4.0 * r + d);
  return std::pow(static_cast<double>(n), exponent_n) *
         std::pow(std::numbers::e / (2.0 * r), exponent_c);
}

OrderSelection optimal_order(long long n, int d) {
  if (n < 2) throw std::invalid_argument("optimal_order: n must be >= 2");
  if (d < 1) throw std::invalid_argument("optimal_order: d must be >= 1");
  OrderSelection sel;
  sel.n = n;
  sel.d = d;
  sel.alpha = 2.0 * std::pow(static_cast<double>(n), 2.0 / d) / d;
  sel.r_real = 0.25 * d * lambert_w(sel.alpha);
  sel.r = std::max(1, static_cast<int>(std::lround(sel.r_real)));
  sel.h_star = optimal_bandwidth(n, d, sel.r);
  return sel;
}

boost::multiprecision::cpp_int double_factorial(int m) {
  if (m < 1 || m % 2 == 0)
    throw std::invalid_argument("double_factorial: m must be odd and positive");
  if (m > 299)
    throw std::invalid_argument("double_factorial: m must be <= 299");
  boost::multiprecision::cpp_int product = 1;
  for (int k = m; k >= 3; k -= 2) product *= k;
  return product;
}

double gaussian_bias_constant(int r, int d) {
  if (r < 1 || r > 150)
    throw std::invalid_argument("gaussian_bias_constant: r must be in [1, 150]");
  if (d < 1) throw std::invalid_argument("gaussian_bias_constant: d must be >= 1");
  const auto df = double_factorial(2 * r - 1);
  const double numerator = df.convert_to<double>();
  const double norm = std::pow(2.0 * std::numbers::pi, 0.5 * d);
  if (std::isfinite(numerator)) {
    const double value = numerator / norm;
    if (std::isfinite(value)) return value;
    throw std::overflow_error("gaussian_bias_constant: value exceeds double range");
  }
  // (2r-1)!! alone can exceed double range while the quotient still
  // fits; retry with extended precision before giving up.
  const long double wide = df.convert_to<long double>() /
                           std::pow(2.0L * std::numbers::pi_v<long double>, 0.5L * d);
  if (wide > static_cast<long double>(std::numeric_limits<double>::max()))
    throw std::overflow_error("gaussian_bias_constant: value exceeds double range");
  return static_cast<double>(wide);
}

BandwidthSet spread_bandwidths(double h_star, int r, double ratio) {
  if (!(h_star > 0.0) || !std::isfinite(h_star))
    throw std::invalid_argument("spread_bandwidths: h_star must be positive and finite");
  if (r < 1) throw std::invalid_argument("spread_bandwidths: r must be >= 1");
  if (!(ratio >= 1.0 + 1e-3))
    throw std::invalid_argument("spread_bandwidths: ratio must be >= 1.001");
  std::vector<double> values(static_cast<std::size_t>(r));
  for (int i = 1; i <= r; ++i)
    values[static_cast<std::size_t>(i - 1)] =
        h_star * std::pow(ratio, i - 0.5 * (r + 1));
  return BandwidthSet(std::move(values));
}

}  // namespace richkde
