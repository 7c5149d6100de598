#include "freelight/special_functions.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <stdexcept>

namespace freelight {

std::vector<double> besselJRange(int nmax, double x) {
  if (nmax < 0) throw std::invalid_argument("besselJRange: nmax < 0");
  std::vector<double> out(nmax + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const double ax = std::fabs(x);
  // Start well past both the requested order and the turning point.
  const double top = std::max<double>(nmax, ax);
  int start = static_cast<int>(top + 30.0 + 8.0 * std::cbrt(top) + std::sqrt(40.0 * top));
  start += start & 1;

  std::vector<double> j(start + 2, 0.0);
  j[start + 1] = 0.0;
  j[start] = 1e-300;
  double even_sum = 0.0;
  for (int n = start; n >= 1; --n) {
    j[n - 1] = 2.0 * n / ax * j[n] - j[n + 1];
    if (std::fabs(j[n - 1]) > 1e250) {
      for (int k = n - 1; k <= start + 1; ++k) j[k] *= 1e-250;
      even_sum *= 1e-250;
    }
    if (n % 2 == 0) even_sum += j[n];
  }
  // Normalization: J_0 + 2 sum_k J_2k = 1.
  const double scale = 1.0 / (j[0] + 2.0 * even_sum);
  for (int n = 0; n <= nmax; ++n) {
    double v = j[n] * scale;
    if (x < 0.0 && (n & 1)) v = -v;
    out[n] = v;
  }
  return out;
}

double besselJ(int n, double x) {
  const int an = std::abs(n);
  double v = besselJRange(an, x)[an];
  if (n < 0 && (an & 1)) v = -v;
  return v;
}

double upperIncompleteGamma(int a, double x) {
  if (a < 1) throw std::invalid_argument("upperIncompleteGamma: a must be >= 1");
  if (x >= 0.0) return boost::math::tgamma(static_cast<double>(a), x);
  // Gamma(a, -y) = (a-1)! - gamma(a, -y), gamma(a, -y) = (-1)^a sum_k y^(a+k) / (k! (a+k)).
  const double y = -x;
  double term = std::pow(y, a) / a;
  double sum = term;
  for (int k = 0; k < 100000; ++k) {
    term *= y * (a + k) / ((k + 1.0) * (a + k + 1.0));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  const double lower = (a & 1) ? -sum : sum;
  return std::tgamma(static_cast<double>(a)) - lower;
}

double logFactorial(int n) {
  if (n < 0) throw std::invalid_argument("logFactorial: n < 0");
  return std::lgamma(n + 1.0);
}

}  // namespace freelight
