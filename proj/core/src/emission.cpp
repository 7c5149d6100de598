#include "freelight/emission.hpp"

#include "freelight/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace freelight {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kInnerCap = 40;

std::vector<double> coherentColumn(double beta0, int n_max) {
  std::vector<double> a(n_max + 1);
  for (int n = 0; n <= n_max; ++n) a[n] = coherentAmplitude(n, beta0);
  return a;
}

int resolveTruncation(int n_max, double beta0, int n_electrons) {
  if (!(beta0 >= 0.0) || !std::isfinite(beta0)) throw std::invalid_argument("beta0 must be finite and >= 0");
  return n_max < 0 ? defaultTruncation(beta0, n_electrons) : n_max;
}

// Normalizes by the trace and checks the truncation tail.
PhotonicState finishMixed(Eigen::MatrixXcd rho, double* trace_out = nullptr) {
  const double tr = rho.trace().real();
  if (trace_out) *trace_out = tr;
  if (!(tr > 0.0)) throw std::runtime_error("emission: state has zero trace");
  rho /= tr;
  // exact hermiticity
  rho = 0.5 * (rho + rho.adjoint()).eval();
  PhotonicState st = PhotonicState::mixed(std::move(rho));
  requireTail(st);
  return st;
}

// rho -> E_z[D(beta0 e^{-iz}) rho D^dag(beta0 e^{-iz})] with z distributed per the CF table.
Eigen::MatrixXcd displaceChannel(const Eigen::MatrixXcd& rho, const Eigen::MatrixXd& D, const CoherenceTable& M) {
  const int n = static_cast<int>(rho.rows());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  // Precompute M over the needed offset range.
  std::vector<cplx> Mv(4 * n + 1);
  for (int k = -2 * n; k <= 2 * n; ++k) Mv[k + 2 * n] = M(k);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      cplx acc = 0.0;
      for (int m = 0; m < n; ++m) {
        const double dam = D(a, m);
        if (dam == 0.0) continue;
        for (int mp = 0; mp < n; ++mp) {
          const cplx r = rho(m, mp);
          if (r == 0.0) continue;
          acc += dam * D(b, mp) * r * Mv[(b - mp) - (a - m) + 2 * n];
        }
      }
      out(a, b) = acc;
      out(b, a) = std::conj(acc);
    }
  }
  return out;
}

Eigen::MatrixXcd noFilterRho(const std::vector<CoherenceTable>& cfs, double beta0, int n_max) {
  const int N = static_cast<int>(cfs.size());
  if (N == 1) {
    const auto a = coherentColumn(beta0, n_max);
    Eigen::MatrixXcd rho(n_max + 1, n_max + 1);
    for (int n = 0; n <= n_max; ++n)
      for (int np = n; np <= n_max; ++np) {
        rho(n, np) = a[n] * a[np] * cfs[0](np - n);
        rho(np, n) = std::conj(rho(n, np));
      }
    return rho;
  }
  const int inner = n_max + 10;
  Eigen::MatrixXd D = displacementMatrix(cplx(beta0, 0.0), inner).real();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(inner + 1, inner + 1);
  rho(0, 0) = 1.0;
  for (const auto& t : cfs) rho = displaceChannel(rho, D, t);
  return rho.topLeftCorner(n_max + 1, n_max + 1);
}

void checkCfBound(const CoherenceTable& t, int upto) {
  for (int m = 0; m <= upto; ++m)
    if (std::abs(t(m)) > 1.0 + 1e-9) {
      std::ostringstream os;
      os << "coherence factor |M_" << m << "| = " << std::abs(t(m)) << " exceeds 1";
      throw std::invalid_argument(os.str());
    }
}

}  // namespace

std::vector<std::vector<int>> compositions(int n, int parts) {
  if (n < 0 || parts < 1) throw std::invalid_argument("compositions: need n >= 0 and parts >= 1");
  std::vector<std::vector<int>> out;
  std::vector<int> cur(parts, 0);
  // Fill slot i with values n_left down to 0, the last slot takes the remainder.
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == parts - 1) {
      cur[i] = left;
      out.push_back(cur);
      return;
    }
    for (int v = left; v >= 0; --v) {
      cur[i] = v;
      self(self, i + 1, left - v);
    }
  };
  rec(rec, 0, n);
  return out;
}

double multinomial(const std::vector<int>& m) {
  int total = 0;
  double lg = 0.0;
  for (int v : m) {
    if (v < 0) throw std::invalid_argument("multinomial: negative entry");
    total += v;
    lg -= logFactorial(v);
  }
  return std::round(std::exp(lg + logFactorial(total)));
}

PhotonicState emitNoFilter(const std::vector<ElectronPulse>& pulses, double beta0, int n_max) {
  const int N = static_cast<int>(pulses.size());
  if (N == 0) throw std::invalid_argument("emitNoFilter: no electrons");
  if (N > 3) throw std::invalid_argument("emitNoFilter: N > 3 unsupported; use emissionStats for statistics");
  n_max = resolveTruncation(n_max, beta0, N);
  std::vector<CoherenceTable> cfs;
  const int kmax = N == 1 ? n_max : 2 * (n_max + 11);
  for (const auto& p : pulses) cfs.emplace_back(p, kmax);
  return emitNoFilter(cfs, beta0, n_max);
}

PhotonicState emitNoFilter(const std::vector<CoherenceTable>& cfs, double beta0, int n_max) {
  const int N = static_cast<int>(cfs.size());
  if (N == 0) throw std::invalid_argument("emitNoFilter: no electrons");
  if (N > 3) throw std::invalid_argument("emitNoFilter: N > 3 unsupported; use emissionStats for statistics");
  n_max = resolveTruncation(n_max, beta0, N);
  const int need = N == 1 ? n_max : 2 * (n_max + 11);
  for (const auto& t : cfs) {
    if (t.kmax() < need) throw std::invalid_argument("emitNoFilter: coherence table too short");
    checkCfBound(t, need);
  }
  return finishMixed(noFilterRho(cfs, beta0, n_max));
}

EmissionStats computeEmissionStats(const std::vector<CoherenceTable>& cfs, double beta0) {
  const int N = static_cast<int>(cfs.size());
  if (N == 0) throw std::invalid_argument("emissionStats: no electrons");
  for (const auto& t : cfs) {
    if (t.kmax() < 2) throw std::invalid_argument("emissionStats: CF table needs orders up to 2");
    checkCfBound(t, 2);
  }
  const double b2 = beta0 * beta0;
  cplx sum1 = 0.0;
  double sq1 = 0.0;
  for (const auto& t : cfs) {
    sum1 += t(1);
    sq1 += std::norm(t(1));
  }
  EmissionStats st;
  st.intensity = b2 * (N + std::norm(sum1) - sq1);

  const auto comps = compositions(2, N);
  std::vector<double> w(comps.size());
  for (size_t i = 0; i < comps.size(); ++i) w[i] = multinomial(comps[i]);
  cplx g = 0.0;
  for (size_t i = 0; i < comps.size(); ++i)
    for (size_t j = 0; j < comps.size(); ++j) {
      cplx prod = w[i] * w[j];
      for (int e = 0; e < N; ++e) {
        const int k = comps[j][e] - comps[i][e];
        if (k != 0) prod *= cfs[e](k);
      }
      g += prod;
    }
  st.g_factor = b2 * b2 * g.real();
  st.fluct = st.intensity + st.g_factor - st.intensity * st.intensity;
  if (st.intensity > 0.0) {
    const double ratio = st.g_factor / (st.intensity * st.intensity);
    st.physical = ratio >= 1.0 - 1e-9 && st.fluct >= -1e-9;
  }
  return st;
}

EmissionStats emissionStats(const std::vector<CoherenceTable>& cfs, double beta0) {
  EmissionStats st = computeEmissionStats(cfs, beta0);
  if (!st.physical) throw std::domain_error("unphysical CF input");
  return st;
}

EmissionStats emissionStats(const CoherenceTable& cf, double beta0, int n_electrons) {
  if (n_electrons < 1) throw std::invalid_argument("emissionStats: N < 1");
  return emissionStats(std::vector<CoherenceTable>(n_electrons, cf), beta0);
}

FilterOutcome emitSingleWindow(const ElectronPulse& pulse, double beta0, const WindowFilter& w, int n_max) {
  pulse.validate();
  if (!(w.delta_d > 0.0)) throw std::invalid_argument("WindowFilter: delta_d must be > 0");
  n_max = resolveTruncation(n_max, beta0, 1);
  const auto a = coherentColumn(beta0, n_max);
  const auto& c = pulse.spectrum.amps;
  const int off = pulse.spectrum.offset;
  const int K = static_cast<int>(c.size());
  const bool sharp = std::isinf(pulse.sigma_t);
  const double w2 = sharp ? 0.0 : pulse.sigma_t * pulse.sigma_t + pulse.delta_t * pulse.delta_t;
  const double r2s = sharp ? 0.0 : std::sqrt(2.0) * pulse.sigma_t;
  // Largest |l - l' + n' - n| whose Gaussian weight does not underflow.
  const int dmax = sharp ? 0 : static_cast<int>(std::ceil(std::sqrt(2.0 * 745.0 / w2)));

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    for (int np = n; np <= n_max; ++np) {
      cplx acc = 0.0;
      for (int i = 0; i < K; ++i) {
        if (c[i] == 0.0) continue;
        // D = (i - j) + np - n
        for (int D = -dmax; D <= dmax; ++D) {
          const int j = i + np - n - D;
          if (j < 0 || j >= K || c[j] == 0.0) continue;
          const double x0 = (2.0 * off + i + j) / 2.0 - (n + np) / 2.0 - w.s;
          double weight;
          if (sharp) {
            const double ax = std::fabs(x0);
            weight = ax < w.delta_d ? 1.0 : (ax == w.delta_d ? 0.5 : 0.0);
          } else {
            weight = 0.5 * std::exp(-0.5 * D * D * w2) *
                     (std::erf(r2s * (w.delta_d + x0)) + std::erf(r2s * (w.delta_d - x0)));
          }
          if (weight == 0.0) continue;
          acc += c[i] * std::conj(c[j]) * weight;
        }
      }
      rho(n, np) = a[n] * a[np] * acc;
      rho(np, n) = std::conj(rho(n, np));
    }
  }
  const double tr = rho.trace().real();
  if (!(tr > 1e-30)) throw std::runtime_error("empty effective window");
  // Probability relative to the unfiltered electron, whose norm is only 1 once sidebands are resolved.
  double env_norm = 1.0;
  if (!sharp) {
    env_norm = 0.0;
    for (int i = 0; i < K; ++i)
      for (int j = std::max(0, i - dmax); j < std::min(K, i + dmax + 1); ++j)
        env_norm += (c[i] * std::conj(c[j])).real() * std::exp(-0.5 * (i - j) * (i - j) * w2);
  }
  double p = 0.0;
  PhotonicState st = finishMixed(std::move(rho), &p);
  return {std::move(st), p / env_norm};
}

namespace {

// Scaled bivariate series: S[a][r] = a! r! [x^a y^r] G. Products of scaled
// series use binomial weights, which keeps every entry O(N^(a+r)).
using Series = std::vector<std::vector<cplx>>;

Series scaledProduct(const Series& X, const Series& Y, const std::vector<std::vector<double>>& binom) {
  const int A = static_cast<int>(X.size()), R = static_cast<int>(X[0].size());
  Series out(A, std::vector<cplx>(R, cplx(0.0)));
  for (int a1 = 0; a1 < A; ++a1)
    for (int r1 = 0; r1 < R; ++r1) {
      const cplx x = X[a1][r1];
      if (x == 0.0) continue;
      for (int a2 = 0; a1 + a2 < A; ++a2)
        for (int r2 = 0; r1 + r2 < R; ++r2) {
          const cplx y = Y[a2][r2];
          if (y == 0.0) continue;
          out[a1 + a2][r1 + r2] += binom[a1 + a2][a1] * binom[r1 + r2][r1] * x * y;
        }
    }
  return out;
}

}  // namespace

FilterOutcome emitExact(const std::vector<ModulationSpectrum>& spectra, double beta0, const std::vector<int>& s,
                        int n_max) {
  const int N = static_cast<int>(spectra.size());
  if (N == 0) throw std::invalid_argument("emitExact: no electrons");
  if (static_cast<int>(s.size()) != N) throw std::invalid_argument("emitExact: one sideband per electron required");
  if (N > 4) throw std::invalid_argument("emitExact: N > 4 unsupported");
  for (const auto& sp : spectra) sp.validate();
  n_max = resolveTruncation(n_max, beta0, N);

  Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(n_max + 1);
  if (N == 1) {
    for (int n = 0; n <= n_max; ++n) amp(n) = coherentAmplitude(n, beta0) * spectra[0].at(n + s[0]);
  } else {
    if (n_max + kInnerCap > 600) throw std::invalid_argument("emitExact: truncation too large for N >= 2");
    const int A = n_max + kInnerCap + 1, R = kInnerCap + 1;
    std::vector<std::vector<double>> binom(std::max(A, R), std::vector<double>(std::max(A, R), 0.0));
    for (int i = 0; i < static_cast<int>(binom.size()); ++i) {
      binom[i][0] = 1.0;
      for (int j = 1; j <= i; ++j) binom[i][j] = binom[i - 1][j - 1] + (j < i ? binom[i - 1][j] : 0.0);
    }
    Series P;
    for (int e = 0; e < N; ++e) {
      Series G(A, std::vector<cplx>(R, cplx(0.0)));
      for (int a = 0; a < A; ++a)
        for (int r = 0; r < R; ++r) G[a][r] = spectra[e].at(a - r + s[e]);
      P = (e == 0) ? G : scaledProduct(P, G, binom);
    }
    // alpha_n = (beta0^n / sqrt n!) sum_K (-beta0^2/2)^K P[n+K][K] / K!
    std::vector<double> pref(n_max + 1);
    for (int n = 0; n <= n_max; ++n)
      pref[n] = beta0 == 0.0 ? (n == 0 ? 1.0 : 0.0) : std::exp(n * std::log(beta0) - 0.5 * logFactorial(n));
    int quiet_from = -1;
    for (int K = 0; K < R; ++K) {
      const double wK = std::pow(-0.5 * beta0 * beta0, K) / std::exp(logFactorial(K));
      double mass = 0.0;
      for (int n = 0; n <= n_max; ++n) {
        const cplx t = pref[n] * wK * P[n + K][K];
        amp(n) += t;
        mass += std::norm(t);
      }
      if (std::sqrt(mass) < 1e-10) {
        if (quiet_from < 0) quiet_from = K;
      } else {
        quiet_from = -1;
      }
    }
    if (quiet_from < 0) throw std::runtime_error("emitExact: inner sum not converged at k_max = 40");
  }
  const double p = amp.squaredNorm();
  if (!(p > 1e-300)) throw std::runtime_error("empty post-selection");
  amp /= std::sqrt(p);
  PhotonicState st = PhotonicState::pure(std::move(amp));
  requireTail(st);
  return {std::move(st), p};
}

double catDividingFactorDirect(double beta_abs, int s, int n_max_trunc, double beta0) {
  const double theta = s * kPi + kPi / 2.0 - 4.0 * beta_abs;
  double acc = 0.0;
  for (int n = 0; n <= n_max_trunc; ++n) {
    const double a = coherentAmplitude(n, beta0);
    acc += a * a * std::norm(1.0 + std::polar(1.0, theta) * ((n & 1) ? -1.0 : 1.0));
  }
  return acc;
}

CatClosedForm catClosedForm(double beta_abs, double beta_phase, int s, int n_max_trunc, double beta0) {
  if (n_max_trunc < 0) throw std::invalid_argument("catClosedForm: n_max_trunc < 0");
  CatClosedForm out{PhotonicState::vacuum(n_max_trunc), 0.0, 0.0, 0.0, 0.0};
  out.chi = cplx(0.0, -1.0) * beta0 * std::polar(1.0, beta_phase);
  out.theta = s * kPi + kPi / 2.0 - 4.0 * beta_abs;
  Eigen::VectorXcd v(n_max_trunc + 1);
  for (int n = 0; n <= n_max_trunc; ++n) {
    const cplx coh = coherentAmplitude(n, beta0) * std::polar(1.0, n * std::arg(out.chi));
    v(n) = coh * (1.0 + std::polar(1.0, out.theta) * ((n & 1) ? -1.0 : 1.0));
  }
  const double nfact = std::exp(logFactorial(n_max_trunc));
  const double sgn = (s % 2 == 0) ? 1.0 : -1.0;
  const double b2 = beta0 * beta0;
  out.pf_closed_form = 2.0 *
                       (upperIncompleteGamma(n_max_trunc + 1, b2) +
                        sgn * std::exp(-2.0 * b2) * std::sin(4.0 * beta_abs) * upperIncompleteGamma(n_max_trunc + 1, -b2)) /
                       nfact;
  // Normalization of the asymptotic spectrum kept on sidebands s..s+n_max_trunc.
  double spec_mass = 0.0;
  for (int m = s; m <= s + n_max_trunc; ++m) spec_mass += 1.0 + ((m % 2 == 0) ? 1.0 : -1.0) * std::sin(4.0 * beta_abs);
  out.p_success = out.pf_closed_form / (2.0 * spec_mass);
  const double norm2 = v.squaredNorm();
  if (!(norm2 > 0.0)) throw std::runtime_error("catClosedForm: zero state");
  v /= std::sqrt(norm2);
  out.state = PhotonicState::pure(std::move(v));
  return out;
}

cplx expectationField(const FilterOutcome& outcome) { return expectation(outcome.state, Observable::Annihilation); }

}  // namespace freelight
