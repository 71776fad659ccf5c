#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "richkde/extrapolation.hpp"

namespace richkde {

// Result of the order/bandwidth selection rule for a given sample size
// and dimension: alpha = 2 n^{2/d} / d, r_real = (d/4) W(alpha),
// r = max(1, round(r_real)), h_star = optimal_bandwidth(n, d, r).
struct OrderSelection {
  long long n = 0;
  int d = 0;
  double alpha = 0.0;
  double r_real = 0.0;
  int r = 0;
  double h_star = 0.0;
};

// Principal branch W0 of the Lambert W function, Halley iteration.
// Domain x >= -1/e + 1e-12. Residual |w e^w - x| <= 1e-12 * max(1, |x|)
// within 50 iterations, else NumericalFailure.
double lambert_w(double x);

// h*(n, d, r) = n^{-1/(4r+d)} * (e / (2r))^{2r/(4r+d)}; n >= 2.
double optimal_bandwidth(long long n, int d, int r);

// Continuous stationarity solution for r via lambert_w, rounded to the
// nearest integer and clamped to >= 1.
OrderSelection optimal_order(long long n, int d);

// m (m-2) ... 3 * 1 for odd m, exact; m <= 299.
boost::multiprecision::cpp_int double_factorial(int m);

// l_r = (2r-1)!! / (2 pi)^{d/2} for the standard normal reference
// density; r <= 150. Throws std::overflow_error when the real value
// exceeds double range.
double gaussian_bias_constant(int r, int d);

// r bandwidths geometrically spaced around h_star: h_i = h_star *
// ratio^{i - (r+1)/2}, i = 1..r, so the geometric mean is h_star.
// ratio >= 1 + 1e-3.
BandwidthSet spread_bandwidths(double h_star, int r, double ratio);

}  // namespace richkde
