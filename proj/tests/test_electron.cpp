#include "freelight/electron.hpp"
#include "freelight/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace freelight;
namespace {
constexpr double kPi = std::numbers::pi;

ElectronPulse iels(double beta, double d, double sigma = kInf, double dt = 0.0, double phase = 0.0) {
  return {ielsModulate({beta, phase, 1, d}), sigma, dt};
}
}  // namespace

TEST(IelsModulate, TrivialSpectrum) {
  const auto s = ielsModulate({0.0, 1.3, 1, 0.2});
  ASSERT_EQ(s.amps.size(), 1u);
  EXPECT_EQ(s.at(0), cplx(1.0));
  EXPECT_EQ(s.at(1), cplx(0.0));
}

TEST(IelsModulate, BesselValues) {
  const auto s = ielsModulate({1.0, 0.0, 1, 0.0});
  EXPECT_NEAR(s.at(0).real(), std::cyl_bessel_j(0.0, 2.0), 1e-14);
  EXPECT_NEAR(s.at(1).real(), std::cyl_bessel_j(1.0, 2.0), 1e-14);
  EXPECT_NEAR(s.at(-1).real(), -std::cyl_bessel_j(1.0, 2.0), 1e-14);
  EXPECT_NEAR(s.at(0).real(), 0.2238907791, 1e-10);
  EXPECT_NEAR(s.at(1).real(), 0.5767248078, 1e-10);
}

TEST(IelsModulate, NormalizedWithNegligibleTail) {
  for (double b : {1.0, 5.0, 20.0}) {
    const auto s = ielsModulate({b, 0.4, 1, 0.13});
    EXPECT_NEAR(s.norm2(), 1.0, 1e-12);
    const int L = ielsCutoff(b);
    double tail = 0.0;
    for (int l = L + 1; l < L + 200; ++l) tail += 2.0 * std::pow(std::cyl_bessel_j(double(l), 2.0 * b), 2);
    EXPECT_LT(tail, 1e-14) << b;
  }
}

TEST(IelsModulate, HarmonicOccupiesMultiples) {
  const auto s = ielsModulate({2.0, 0.0, 2, 0.1});
  for (int l = s.lo(); l <= s.hi(); ++l)
    if (l % 2 != 0) EXPECT_EQ(s.at(l), cplx(0.0));
  EXPECT_NEAR(std::abs(s.at(2)), std::fabs(std::cyl_bessel_j(1.0, 4.0)), 1e-14);
}

TEST(CoherenceFactor, NormalizationAndZeroDrift) {
  for (double b : {0.5, 3.0, 7.0}) {
    const auto p = iels(b, 0.0);
    EXPECT_NEAR(std::abs(coherenceFactor(p, 0) - 1.0), 0.0, 1e-12);
    for (int m = 1; m <= 4; ++m) EXPECT_LT(std::abs(coherenceFactor(p, m)), 1e-14) << b << " " << m;
  }
  EXPECT_NEAR(coherenceFactor(iels(2.0, 0.2, 50.0), 0).real(), 1.0, 1e-12);
}

TEST(CoherenceFactor, ClosedFormTrivialCases) {
  EXPECT_EQ(coherenceFactorClosedDrift(3.0, 0.0, 1), cplx(0.0));
  EXPECT_EQ(coherenceFactorClosedDrift(0.0, 0.3, 0), cplx(1.0));
}

TEST(CoherenceFactor, ClosedFormMatchesBesselDoubleSum) {
  for (double b = 0.0; b <= 6.0; b += 0.75)
    for (double d = 0.0; d <= 0.5; d += 0.0625)
      for (int m = 1; m <= 3; ++m)
        for (double ph : {0.0, 1.1}) {
          const cplx ref = oracle::latticeCF(b, ph, d, m);
          EXPECT_LT(std::abs(coherenceFactorClosedDrift(b, d, m, ph) - ref), 1e-9) << b << " " << d << " " << m;
          EXPECT_LT(std::abs(coherenceFactor(iels(b, d, kInf, 0.0, ph), m) - ref), 1e-12);
        }
}

TEST(CoherenceFactor, BoundedAndHermitian) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    const auto p = iels(6.0 * U(rng), U(rng), 0.3 + 5.0 * U(rng), 2.0 * U(rng), 6.0 * U(rng));
    for (int k = 0; k <= 6; ++k) {
      const cplx Mk = coherenceFactor(p, k);
      EXPECT_LE(std::abs(Mk), 1.0 + 1e-12);
      EXPECT_LT(std::abs(coherenceFactor(p, -k) - std::conj(Mk)), 1e-13);
    }
  }
}

TEST(CoherenceFactor, PeakBunchingNearPointFiveEight) {
  double best = 0.0;
  for (double b = 0.0; b <= 8.0; b += 0.02)
    for (double d = 0.0; d <= 0.5; d += 0.005) best = std::max(best, std::abs(coherenceFactorClosedDrift(b, d, 1)));
  EXPECT_NEAR(best, 0.58, 0.01);
}

TEST(CoherenceFactor, TableMatchesDirect) {
  const auto p = iels(2.5, 0.21, 2.0, 0.4);
  const CoherenceTable t(p, 8);
  for (int m = -8; m <= 8; ++m) EXPECT_LT(std::abs(t(m) - coherenceFactor(p, m)), 1e-14);
  EXPECT_THROW(t(9), std::out_of_range);
}

TEST(ProjectedCoherenceFactor, IntegratesToCoherenceFactor) {
  const auto p = iels(2.0, 0.25, 3.0);
  for (int k = -2; k <= 2; ++k) {
    cplx acc = 0.0;
    const double h = 0.01;
    for (double q = -30.0; q <= 30.0; q += h) acc += projectedCoherenceFactor(p, k, q) * h;
    EXPECT_LT(std::abs(acc - coherenceFactor(p, k)), 1e-8) << k;
  }
}

TEST(ProjectedCoherenceFactor, UnmodulatedGaussian) {
  const double sigma = 2.5;
  const ElectronPulse p{ModulationSpectrum{}, sigma, 0.0};
  const double sd = 1.0 / (2.0 * sigma);
  for (double q : {-0.3, 0.0, 0.1, 0.45}) {
    const double ref = std::exp(-q * q / (2.0 * sd * sd)) / (std::sqrt(2.0 * kPi) * sd);
    EXPECT_NEAR(projectedCoherenceFactor(p, 0, q).real(), ref, 1e-13);
  }
}

TEST(ProjectedCoherenceFactor, JitterSuppression) {
  const ElectronPulse a{ModulationSpectrum{}, 2.0, 0.0}, b{ModulationSpectrum{}, 2.0, 3.0};
  for (int m = 1; m <= 2; ++m) {
    const double ratio = std::abs(projectedCoherenceFactor(b, m, 0.0)) / std::abs(projectedCoherenceFactor(a, m, 0.0));
    EXPECT_NEAR(ratio, std::exp(-m * m * 9.0 / 2.0), 1e-12);
  }
}

TEST(ElectronWigner, MarginalIsDensity) {
  const auto p = iels(1.5, 0.2, 3.0, 0.5);
  std::vector<double> zs, qs;
  for (double z = -12.0; z <= 12.0; z += 0.7) zs.push_back(z);
  for (double q = -15.0; q <= 15.0; q += 0.01) qs.push_back(q);
  const auto W = electronWigner(p, zs, qs);
  for (size_t i = 0; i < zs.size(); ++i) {
    const double marg = W.row(static_cast<Eigen::Index>(i)).sum() * 0.01;
    EXPECT_GE(marg, -1e-12);
    EXPECT_NEAR(marg, electronDensity(p, zs[i]), 1e-9);
  }
}

TEST(ElectronWigner, UnmodulatedIsPositive) {
  const ElectronPulse p{ModulationSpectrum{}, 1.7, 0.8};
  std::vector<double> zs, qs;
  for (double z = -8.0; z <= 8.0; z += 0.25) zs.push_back(z);
  for (double q = -2.0; q <= 2.0; q += 0.05) qs.push_back(q);
  EXPECT_GE(electronWigner(p, zs, qs).minCoeff(), 0.0);
}

TEST(ElectronWigner, SubCycleOscillationAtFixedMomentum) {
  const auto p = iels(5.7, 0.0, 3.0);
  const double q = 0.5;
  std::vector<double> zs;
  for (double z = -2.0; z <= 2.0 + 2.0 * kPi; z += 0.1) zs.push_back(z);
  const auto W = electronWigner(p, zs, {q});
  // Divide out the envelope; what is left has period 2 pi.
  auto carrier = [&](size_t i) { return W(static_cast<Eigen::Index>(i), 0) / std::exp(-zs[i] * zs[i] / 18.0); };
  const size_t shift = static_cast<size_t>(std::lround(2.0 * kPi / 0.1));
  double lo = 1e300, hi = -1e300;
  for (size_t i = 0; i + shift < zs.size(); ++i) {
    lo = std::min(lo, carrier(i));
    hi = std::max(hi, carrier(i));
  }
  EXPECT_GT(hi - lo, 1e-3);
  // exact periodicity with the sampled shift (2 pi is not a multiple of 0.1, so compare on a shifted grid)
  const auto W2 = electronWigner(p, {0.3, 0.3 + 2.0 * kPi}, {q});
  EXPECT_NEAR(W2(0, 0) / std::exp(-0.09 / 18.0), W2(1, 0) / std::exp(-std::pow(0.3 + 2.0 * kPi, 2) / 18.0), 1e-10);
}

TEST(PreFilter, WholeSpectrumEqualsUnfiltered) {
  const IELSStage st{4.0, 0.0, 1, 0.17};
  const PreFilter all{200.0, 400.0};
  for (int m = 0; m <= 3; ++m) {
    const auto r = prefilterCF(st, all, m);
    EXPECT_NEAR(r.success, 1.0, 1e-12);
    EXPECT_LT(std::abs(r.cf - coherenceFactor({ielsModulate(st), kInf, 0.0}, m)), 1e-13);
  }
}

TEST(PreFilter, NarrowWindowKillsHighOrders) {
  const IELSStage st{10.0, 0.0, 1, 0.21};
  for (double dd : {1.0, 2.5, 3.0, 4.7}) {
    const PreFilter f{7.0, dd};
    for (int m = 1; m <= 8; ++m)
      if (std::floor(dd) < m) EXPECT_EQ(prefilterCF(st, f, m).cf, cplx(0.0)) << dd << " " << m;
  }
  // Integer width equal to |m| still keeps |m|+1 sidebands on a closed window.
  EXPECT_GT(std::abs(prefilterCF(st, {7.0, 3.0}, 3).cf), 0.0);
}

TEST(PreFilter, EmptyWindowThrows) {
  EXPECT_THROW(prefilterCF({2.0, 0.0, 1, 0.0}, {0.3, 0.2}, 1), std::invalid_argument);
  const auto far = prefilterCF({1.0, 0.0, 1, 0.0}, {500.0, 3.0}, 1);
  EXPECT_EQ(far.cf, cplx(0.0));
  EXPECT_EQ(far.success, 0.0);
}

TEST(PreFilter, FiniteSigmaConvergesToLatticeForm) {
  const IELSStage st{6.0, 0.0, 1, 0.19};
  for (const PreFilter f : {PreFilter{10.5, 12.0}, PreFilter{3.5, 5.0}, PreFilter{-2.5, 8.0}}) {
    for (int m = 0; m <= 3; ++m) {
      const auto a = prefilterCF(st, f, m);
      const auto b = prefilterCF(st, f, m, 50.0);
      EXPECT_LT(std::abs(a.cf - b.cf), 1e-4) << m;
      EXPECT_NEAR(a.success, b.success, 1e-4);
    }
  }
}

TEST(ModulationSpectrum, Validation) {
  ModulationSpectrum s;
  s.amps.clear();
  EXPECT_THROW(s.validate(), std::invalid_argument);
  ModulationSpectrum z;
  z.amps = {0.0, 0.0};
  EXPECT_THROW(z.normalized(), std::invalid_argument);
  EXPECT_THROW((ElectronPulse{ModulationSpectrum{}, 0.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((ElectronPulse{ModulationSpectrum{}, 1.0, -1.0}.validate()), std::invalid_argument);
}

TEST(ModulationSpectrum, DriftMatchesStage) {
  const auto a = ielsModulate({3.0, 0.5, 2, 0.0});
  const auto b = applyDrift(a, 0.37);
  const auto c = ielsModulate({3.0, 0.5, 2, 0.37});
  for (int l = c.lo(); l <= c.hi(); ++l) EXPECT_LT(std::abs(b.at(l) - c.at(l)), 1e-14);
}
