#pragma once

#include <vector>

namespace freelight {

// Bessel J_n(x) for n = 0..nmax, by backward recurrence. Accurate to a few
// ulps of max|J| for any real x. Negative orders follow J_{-n} = (-1)^n J_n.
std::vector<double> besselJRange(int nmax, double x);

double besselJ(int n, double x);

// Upper incomplete gamma Gamma(a, x) for integer a >= 1 and any real x,
// including x < 0 where the integral from x to infinity is still finite.
double upperIncompleteGamma(int a, double x);

double logFactorial(int n);

}  // namespace freelight
