#include "freelight/special_functions.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include <cmath>

using namespace freelight;

TEST(Bessel, MatchesStdLibraryTable) {
  for (double x : {1e-3, 0.1, 1.0, 2.0, 5.0, 11.4, 40.0, 80.0, 160.0}) {
    const auto J = besselJRange(150, x);
    for (int n = 0; n <= 150; ++n) {
      const double ref = std::cyl_bessel_j(static_cast<double>(n), x);
      EXPECT_NEAR(J[n], ref, 1e-13) << "n=" << n << " x=" << x;
    }
  }
}

TEST(Bessel, SumRule) {
  for (double beta : {1.0, 5.0, 20.0, 60.0}) {
    const auto J = besselJRange(400, 2.0 * beta);
    double s = J[0] * J[0];
    for (int n = 1; n <= 400; ++n) s += 2.0 * J[n] * J[n];
    EXPECT_NEAR(s, 1.0, 1e-13) << beta;
  }
}

TEST(Bessel, ThreeTermRecurrence) {
  for (double x : {0.7, 3.3, 25.0}) {
    const auto J = besselJRange(80, x);
    for (int n = 1; n < 80; ++n) EXPECT_NEAR(J[n - 1] + J[n + 1], 2.0 * n / x * J[n], 1e-13);
  }
}

TEST(Bessel, NegativeOrderAndArgument) {
  EXPECT_DOUBLE_EQ(besselJ(-3, 2.5), -besselJ(3, 2.5));
  EXPECT_DOUBLE_EQ(besselJ(-4, 2.5), besselJ(4, 2.5));
  EXPECT_NEAR(besselJ(3, -2.5), -besselJ(3, 2.5), 1e-16);
  EXPECT_EQ(besselJ(0, 0.0), 1.0);
  EXPECT_EQ(besselJ(5, 0.0), 0.0);
}

TEST(IncompleteGamma, PositiveArgumentsMatchBoost) {
  for (int a = 1; a < 30; ++a)
    for (double x : {0.0, 0.5, 4.0, 30.0})
      EXPECT_NEAR(upperIncompleteGamma(a, x) / boost::math::tgamma(double(a), x), 1.0, 1e-14);
}

TEST(IncompleteGamma, TruncatedExponentialIdentity) {
  // e^lambda Gamma(n+1, lambda) / n! = sum_{k<=n} lambda^k / k!, including lambda < 0.
  for (double lam : {-4.0, -1.5, 0.3, 2.0}) {
    double partial = 0.0, term = 1.0;
    for (int n = 0; n <= 25; ++n) {
      if (n > 0) term *= lam / n;
      partial += term;
      const double via = std::exp(lam) * upperIncompleteGamma(n + 1, lam) / std::tgamma(n + 1.0);
      EXPECT_NEAR(via, partial, 1e-12 * std::max(1.0, std::fabs(partial))) << "lam=" << lam << " n=" << n;
    }
  }
}

TEST(LogFactorial, SmallValues) {
  EXPECT_EQ(logFactorial(0), 0.0);
  EXPECT_NEAR(logFactorial(10), std::log(3628800.0), 1e-13);
  EXPECT_THROW(logFactorial(-1), std::invalid_argument);
}
