#include "freelight/fock.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace freelight;
namespace {
constexpr double kPi = std::numbers::pi;

Eigen::VectorXcd unit(int n, int dim) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(n) = 1.0;
  return v;
}

// W by brute force: (2/pi) Tr[rho D(a) Pi D(a)^dag] with D from a matrix exponential on a larger space.
double wignerBrute(const Eigen::MatrixXcd& rho, double x, double p, int big) {
  const int D = big + 1;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(D, D);
  for (int n = 1; n < D; ++n) a(n - 1, n) = std::sqrt(double(n));
  const cplx alpha = cplx(x, p) / std::sqrt(2.0);
  Eigen::MatrixXcd gen = alpha * a.adjoint() - std::conj(alpha) * a;
  Eigen::MatrixXcd Dm = gen.exp();
  Eigen::MatrixXcd Pi = Eigen::MatrixXcd::Zero(D, D);
  for (int n = 0; n < D; ++n) Pi(n, n) = (n & 1) ? -1.0 : 1.0;
  Eigen::MatrixXcd big_rho = Eigen::MatrixXcd::Zero(D, D);
  big_rho.topLeftCorner(rho.rows(), rho.cols()) = rho;
  return (2.0 / kPi) * (big_rho * Dm * Pi * Dm.adjoint()).trace().real();
}
}  // namespace

TEST(CoherentAmplitude, Values) {
  EXPECT_EQ(coherentAmplitude(0, 0.0), 1.0);
  EXPECT_EQ(coherentAmplitude(3, 0.0), 0.0);
  EXPECT_NEAR(coherentAmplitude(1, 1.0), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(coherentAmplitude(1, 1.0), 0.60653, 1e-5);
}

TEST(CoherentAmplitude, PoissonNormalization) {
  for (double b : {0.3, 1.0, 2.0, 4.0}) {
    double s = 0.0;
    for (int n = 0; n <= 60; ++n) s += std::pow(coherentAmplitude(n, b), 2);
    EXPECT_NEAR(s, 1.0, 1e-12) << b;
  }
}

TEST(CoherentAmplitude, StableForLargeArguments) {
  for (int n = 0; n <= 300; ++n)
    for (double b : {0.5, 5.0, 10.0}) {
      const double v = coherentAmplitude(n, b);
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_GE(v, 0.0);
    }
}

TEST(PhotonicState, Validation) {
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(3, 3);
  bad(0, 0) = 1.0;
  bad(0, 1) = 0.1;
  EXPECT_THROW(PhotonicState::mixed(bad), std::domain_error);  // not hermitian
  Eigen::MatrixXcd neg = Eigen::MatrixXcd::Zero(2, 2);
  neg(0, 0) = 1.1;
  neg(1, 1) = -0.1;
  EXPECT_THROW(PhotonicState::mixed(neg), std::domain_error);  // negative eigenvalue
  Eigen::MatrixXcd tr = Eigen::MatrixXcd::Identity(2, 2);
  EXPECT_THROW(PhotonicState::mixed(tr), std::domain_error);  // trace 2
  EXPECT_THROW(PhotonicState::pure(Eigen::VectorXcd::Ones(3)), std::domain_error);
}

TEST(Purity, Cases) {
  EXPECT_EQ(purity(PhotonicState::coherent(1.3, 30)), 1.0);
  Eigen::MatrixXcd poi = Eigen::MatrixXcd::Zero(31, 31);
  double ref = 0.0;
  for (int n = 0; n <= 30; ++n) {
    const double p = std::pow(coherentAmplitude(n, 1.0), 2);
    poi(n, n) = p;
    ref += p * p;
  }
  EXPECT_NEAR(purity(PhotonicState::mixed(poi)), ref, 1e-14);
  for (int d : {2, 5, 9}) EXPECT_NEAR(purity(PhotonicState::mixed(Eigen::MatrixXcd::Identity(d, d) / double(d))), 1.0 / d, 1e-14);
  const auto cat = targetFactory(Cat{1.5, 0.3}, 30);
  EXPECT_NEAR(purity(cat.asMixed()), 1.0, 1e-10);
}

TEST(Fidelity, Cases) {
  const auto c = targetFactory(Cat{cplx(1.2, 0.4), 0.9}, 30);
  EXPECT_NEAR(fidelity(c, c), 1.0, 1e-14);
  EXPECT_EQ(fidelity(PhotonicState::fock(2, 5), PhotonicState::fock(3, 5)), 0.0);
  const auto even = targetFactory(Cat{2.0, 0.0}, 40), odd = targetFactory(Cat{2.0, kPi}, 40);
  EXPECT_LT(fidelity(even, odd), 1e-30);
  EXPECT_THROW(fidelity(PhotonicState::vacuum(3), PhotonicState::vacuum(4)), std::invalid_argument);
  EXPECT_NEAR(fidelity(c, c.asMixed()), 1.0, 1e-12);
}

TEST(Expectation, Moments) {
  EXPECT_EQ(expectation(PhotonicState::vacuum(10), Observable::Number), cplx(0.0));
  const double b = 1.7;
  const auto coh = PhotonicState::coherent(b, 60);
  EXPECT_NEAR(expectation(coh, Observable::Number).real(), b * b, 1e-12);
  EXPECT_NEAR(expectation(coh, Observable::PairNormal).real(), std::pow(b, 4), 1e-11);
  EXPECT_NEAR(expectation(coh, Observable::Annihilation).real(), b, 1e-12);
  const auto one = PhotonicState::fock(1, 6);
  EXPECT_EQ(expectation(one, Observable::NumberSquared), cplx(1.0));
  EXPECT_EQ(expectation(one, Observable::Annihilation), cplx(0.0));
}

TEST(Wigner, OriginValues) {
  EXPECT_NEAR(wigner(PhotonicState::vacuum(5), {0.0}, {0.0}).values(0, 0), 2.0 / kPi, 1e-15);
  EXPECT_NEAR(wigner(PhotonicState::fock(1, 5), {0.0}, {0.0}).values(0, 0), -2.0 / kPi, 1e-15);
}

TEST(Wigner, PureAndMixedAgree) {
  const auto c = targetFactory(TriangularCat{1.4, 2.0 * kPi / 3.0}, 35);
  const std::vector<double> xs{-2.0, -0.3, 0.0, 1.1}, ps{-1.0, 0.0, 0.7};
  const auto a = wigner(c, xs, ps), b = wigner(c.asMixed(), xs, ps);
  EXPECT_LT((a.values - b.values).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Wigner, CatMatchesBruteForce) {
  const auto cat = targetFactory(Cat{2.0, kPi / 2.0}, 40);
  const Eigen::MatrixXcd rho = cat.density();
  for (double x : {-2.0 * std::sqrt(2.0), -1.0, 0.0, 0.4, 2.0 * std::sqrt(2.0)})
    for (double p : {-0.8, 0.0, 0.5}) {
      const double fast = wigner(cat, {x}, {p}).values(0, 0);
      EXPECT_NEAR(fast, wignerBrute(rho, x, p, 110), 1e-9) << x << " " << p;
    }
  // Lobes at alpha = +-2 (x = +-2 sqrt 2) and interference fringes with negative values between them.
  const auto lobes = wigner(cat, {-2.0 * std::sqrt(2.0), 2.0 * std::sqrt(2.0)}, {0.0});
  EXPECT_GT(lobes.values(0, 0), 0.25);
  EXPECT_GT(lobes.values(1, 0), 0.25);
  std::vector<double> ps;
  for (double p = -1.5; p <= 1.5; p += 0.05) ps.push_back(p);
  EXPECT_LT(wigner(cat, {0.0}, ps).values.minCoeff(), -0.2);
}

TEST(Wigner, IntegralAndMarginal) {
  std::vector<double> ax;
  for (double v = -7.0; v <= 7.0 + 1e-9; v += 0.1) ax.push_back(v);
  const cplx beta(0.8, -0.5);
  const auto g = wigner(PhotonicState::coherent(beta, 40), ax, ax);
  EXPECT_NEAR(g.integral(), 1.0, 0.02);
  const auto P = g.xMarginal();
  const double mean = std::sqrt(2.0) * beta.real();
  for (size_t i = 0; i < ax.size(); i += 7) {
    const double ref = std::exp(-std::pow(ax[i] - mean, 2)) / std::sqrt(kPi);
    EXPECT_NEAR(P[i], ref, 0.01 * std::exp(-std::pow(0.0, 2)) / std::sqrt(kPi));
  }
  const auto sq = wigner(targetFactory(SqueezedVacuum{0.4}, 60), ax, ax);
  const auto Ps = sq.xMarginal();
  const double var = 0.5 * std::exp(-0.8);  // tanh r > 0 squeezes x with this sign convention
  for (size_t i = 0; i < ax.size(); i += 7) {
    const double ref = std::exp(-ax[i] * ax[i] / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
    EXPECT_NEAR(Ps[i], ref, 0.01 * (1.0 / std::sqrt(2.0 * kPi * var)));
  }
}

TEST(TargetFactory, Cases) {
  const auto sv = targetFactory(SqueezedVacuum{0.0}, 10);
  EXPECT_NEAR(std::abs(sv.amplitudes()(0)), 1.0, 1e-15);
  const auto even = targetFactory(Cat{1.7, 0.0}, 40);
  for (int n = 1; n <= 40; n += 2) EXPECT_EQ(even.amplitudes()(n), cplx(0.0));
  const auto tri = targetFactory(TriangularCat{1.6, 2.0 * kPi / 3.0}, 40);
  for (int n = 0; n <= 40; ++n)
    if (n % 3 != 0) EXPECT_LT(std::abs(tri.amplitudes()(n)), 1e-14) << n;
  EXPECT_NEAR(tri.amplitudes().norm(), 1.0, 1e-14);
  EXPECT_THROW(targetFactory(Cat{3.0, 0.0}, 10), std::invalid_argument);
  EXPECT_THROW(targetFactory(SqueezedVacuum{1.5}, 12), std::invalid_argument);
  const auto cu = targetFactory(CustomTarget{{1.0, cplx(0.0, 1.0)}}, 4);
  EXPECT_NEAR(std::abs(cu.amplitudes()(1)), std::sqrt(0.5), 1e-15);
}

TEST(TargetFactory, SqueezedAmplitudes) {
  const double r = 0.6, t = std::tanh(r);
  const auto sv = targetFactory(SqueezedVacuum{r}, 80);
  const Eigen::VectorXcd& a = sv.amplitudes();
  // alpha_{2n} = (-tanh r)^n sqrt((2n)!) / (2^n n!) / sqrt(cosh r)
  EXPECT_NEAR(a(0).real(), 1.0 / std::sqrt(std::cosh(r)), 1e-12);
  EXPECT_NEAR(a(2).real(), -t * std::sqrt(2.0) / 2.0 / std::sqrt(std::cosh(r)), 1e-12);
  EXPECT_NEAR(a(4).real(), t * t * std::sqrt(24.0) / 8.0 / std::sqrt(std::cosh(r)), 1e-12);
}

TEST(Truncation, DefaultAndTail) {
  EXPECT_EQ(defaultTruncation(1.0), 30);
  EXPECT_EQ(defaultTruncation(2.0), 60);
  EXPECT_EQ(defaultTruncation(1.0, 3), 50);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v(3) = 1.0;
  EXPECT_THROW(requireTail(PhotonicState::pure(v)), std::runtime_error);
  EXPECT_NO_THROW(requireTail(PhotonicState::coherent(1.0, 30)));
}

TEST(TraceDistance, Basic) {
  const auto a = PhotonicState::fock(0, 3), b = PhotonicState::fock(1, 3);
  EXPECT_NEAR(traceDistance(a, b), 1.0, 1e-14);
  EXPECT_NEAR(traceDistance(a, a.asMixed()), 0.0, 1e-14);
}

TEST(Displacement, UnitaryOnLargeSpace) {
  const auto D = displacementMatrix(cplx(0.7, -0.3), 80);
  const Eigen::MatrixXcd top = (D.adjoint() * D).topLeftCorner(20, 20);
  EXPECT_LT((top - Eigen::MatrixXcd::Identity(20, 20)).cwiseAbs().maxCoeff(), 1e-13);
  (void)unit;
}
