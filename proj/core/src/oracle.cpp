#include "freelight/oracle.hpp"

#include "freelight/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace freelight::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXcd coherentKet(cplx g, int n_max) {
  Eigen::VectorXcd v(n_max + 1);
  v(0) = std::exp(-0.5 * std::norm(g));
  for (int n = 1; n <= n_max; ++n) v(n) = v(n - 1) * g / std::sqrt(double(n));
  return v;
}

cplx modulation(const ModulationSpectrum& sp, double z) {
  cplx acc = 0.0;
  for (size_t i = 0; i < sp.amps.size(); ++i)
    if (sp.amps[i] != 0.0) acc += sp.amps[i] * std::polar(1.0, (sp.offset + static_cast<int>(i)) * z);
  return acc;
}

struct Grid {
  std::vector<double> z;
  double h = 0.0;
  double norm = 1.0;  // extra weight (1/2pi for periodic integrals)
};

Grid makeGrid(const ElectronPulse& p, const QuadratureSpec& spec, int ppc, double extra) {
  Grid g;
  g.h = 2.0 * kPi / ppc;
  if (std::isinf(p.sigma_t)) {
    for (int i = 0; i < ppc; ++i) g.z.push_back(i * g.h);
    g.norm = 1.0 / (2.0 * kPi);
    return g;
  }
  const double seff = std::sqrt(p.sigma_t * p.sigma_t + p.delta_t * p.delta_t);
  const double Z = spec.z_extent > 0.0 ? spec.z_extent : 8.0 * seff + extra;
  const int half = static_cast<int>(std::ceil(Z / g.h));
  for (int i = -half; i <= half; ++i) g.z.push_back(i * g.h);
  return g;
}

// rho += sum_g w_g v_g v_g^dag, in column blocks.
void accumulateRankOne(Eigen::MatrixXcd& rho, const std::vector<Eigen::VectorXcd>& cols, const std::vector<double>& w) {
  const int D = static_cast<int>(rho.rows());
  const size_t B = 2048;
  for (size_t start = 0; start < cols.size(); start += B) {
    const size_t end = std::min(cols.size(), start + B);
    Eigen::MatrixXcd V(D, static_cast<Eigen::Index>(end - start));
    for (size_t k = start; k < end; ++k) V.col(static_cast<Eigen::Index>(k - start)) = cols[k] * std::sqrt(std::max(0.0, w[k]));
    rho.noalias() += V * V.adjoint();
  }
}

Eigen::MatrixXcd rhoOnce(const std::vector<ElectronPulse>& pulses, double beta0, cplx alpha0,
                         const std::vector<PostFilter>& filters, int n_max, const QuadratureSpec& spec, int ppc) {
  const int N = static_cast<int>(pulses.size());
  const int D = n_max + 1;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(D, D);
  const bool window = std::holds_alternative<WindowFilter>(filters[0]);

  if (N == 1 && window) {
    const auto& p = pulses[0];
    const auto& w = std::get<WindowFilter>(filters[0]);
    if (std::isinf(p.sigma_t)) throw std::invalid_argument("rhoDirect: window quadrature needs finite sigma_t");
    const double s2 = p.sigma_t * p.sigma_t;
    const double w2 = s2 + p.delta_t * p.delta_t;
    const Grid g = makeGrid(p, spec, ppc, 8.0 * p.sigma_t);
    const int G = static_cast<int>(g.z.size());
    Eigen::MatrixXcd V(D, G);
    std::vector<cplx> phi(G);
    for (int i = 0; i < G; ++i) {
      V.col(i) = coherentKet(alpha0 + beta0 * std::polar(1.0, -g.z[i]), n_max);
      phi[i] = modulation(p.spectrum, g.z[i]);
    }
    Eigen::MatrixXcd K(G, G);
    const double env0 = 1.0 / std::sqrt(2.0 * kPi * s2) * std::sqrt(s2 / w2);
    for (int i = 0; i < G; ++i)
      for (int j = 0; j < G; ++j) {
        const double wz = g.z[i] - g.z[j];
        const double u = 0.5 * (g.z[i] + g.z[j]);
        const double env = env0 * std::exp(-wz * wz / (8.0 * s2) - u * u / (2.0 * w2));
        const double sinc = (wz == 0.0) ? w.delta_d / kPi : std::sin(w.delta_d * wz) / (kPi * wz);
        K(i, j) = g.h * g.h * env * sinc * std::polar(1.0, -w.s * wz) * phi[i] * std::conj(phi[j]);
      }
    double norm = 0.0;
    for (int i = 0; i < G; ++i)
      norm += g.h * std::exp(-g.z[i] * g.z[i] / (2.0 * w2)) / std::sqrt(2.0 * kPi * w2) * std::norm(phi[i]);
    rho = V * K * V.adjoint() / norm;
    return rho;
  }

  for (const auto& f : filters)
    if (!std::holds_alternative<NoFilter>(f)) throw std::invalid_argument("rhoDirect: only N = 1 supports windows here");

  std::vector<Grid> grids;
  for (const auto& p : pulses) grids.push_back(makeGrid(p, spec, ppc, 0.0));
  std::vector<std::vector<double>> dens(N);
  for (int e = 0; e < N; ++e)
    for (double z : grids[e].z) dens[e].push_back(electronDensity(pulses[e], z) * grids[e].h * grids[e].norm);

  std::vector<Eigen::VectorXcd> cols;
  std::vector<double> wts;
  if (N == 1) {
    for (size_t i = 0; i < grids[0].z.size(); ++i) {
      cols.push_back(coherentKet(alpha0 + beta0 * std::polar(1.0, -grids[0].z[i]), n_max));
      wts.push_back(dens[0][i]);
    }
    accumulateRankOne(rho, cols, wts);
  } else {
    for (size_t i = 0; i < grids[0].z.size(); ++i) {
      cols.clear();
      wts.clear();
      const cplx g1 = alpha0 + beta0 * std::polar(1.0, -grids[0].z[i]);
      for (size_t j = 0; j < grids[1].z.size(); ++j) {
        cols.push_back(coherentKet(g1 + beta0 * std::polar(1.0, -grids[1].z[j]), n_max));
        wts.push_back(dens[0][i] * dens[1][j]);
      }
      accumulateRankOne(rho, cols, wts);
    }
  }
  return rho;
}

}  // namespace

FilterOutcome rhoDirect(const std::vector<ElectronPulse>& pulses, double beta0, cplx alpha0,
                        const std::vector<PostFilter>& filters, int n_max, const QuadratureSpec& spec) {
  const int N = static_cast<int>(pulses.size());
  if (N < 1 || N > 2) throw std::invalid_argument("rhoDirect: N must be 1 or 2");
  if (static_cast<int>(filters.size()) != N) throw std::invalid_argument("rhoDirect: one filter per electron");
  if (spec.points_per_cycle < 16) throw std::invalid_argument("rhoDirect: points_per_cycle must be >= 16");
  for (const auto& p : pulses) p.validate();

  Eigen::MatrixXcd rho = rhoOnce(pulses, beta0, alpha0, filters, n_max, spec, spec.points_per_cycle);
  if (spec.richardson) {
    const Eigen::MatrixXcd fine = rhoOnce(pulses, beta0, alpha0, filters, n_max, spec, 2 * spec.points_per_cycle);
    const double drift = (fine - rho).cwiseAbs().maxCoeff();
    if (drift >= 1e-5) {
      std::ostringstream os;
      os << "rhoDirect: insufficient resolution (Richardson drift " << drift << ")";
      throw std::runtime_error(os.str());
    }
    rho = fine;
  }
  const double tr = rho.trace().real();
  rho /= tr;
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return {PhotonicState::mixed(std::move(rho)), tr};
}

cplx cfQuadrature(const ElectronPulse& pulse, int m, const QuadratureSpec& spec) {
  pulse.validate();
  auto once = [&](int ppc) {
    const Grid g = makeGrid(pulse, spec, ppc, 0.0);
    cplx acc = 0.0;
    for (double z : g.z) acc += electronDensity(pulse, z) * std::polar(1.0, m * z);
    return acc * g.h * g.norm;
  };
  const cplx coarse = once(spec.points_per_cycle);
  if (!spec.richardson) return coarse;
  const cplx fine = once(2 * spec.points_per_cycle);
  if (std::abs(fine - coarse) >= 1e-5) throw std::runtime_error("cfQuadrature: insufficient resolution");
  return fine;
}

Eigen::VectorXcd exactTorus(const std::vector<ModulationSpectrum>& spectra, double beta0, const std::vector<int>& s,
                            int n_max, int grid) {
  const int N = static_cast<int>(spectra.size());
  if (N < 1 || static_cast<int>(s.size()) != N) throw std::invalid_argument("exactTorus: bad sizes");
  const double h = 2.0 * kPi / grid;
  // Per-electron factor psi_i(z) e^{-i s_i z} on the grid.
  std::vector<std::vector<cplx>> f(N, std::vector<cplx>(grid));
  std::vector<cplx> u(grid);
  for (int k = 0; k < grid; ++k) u[k] = std::polar(1.0, -k * h);
  for (int e = 0; e < N; ++e)
    for (int k = 0; k < grid; ++k) f[e][k] = modulation(spectra[e], k * h) * std::polar(1.0, -s[e] * k * h);
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n_max + 1);
  std::vector<int> idx(N, 0);
  long total = 1;
  for (int e = 0; e < N; ++e) total *= grid;
  for (long t = 0; t < total; ++t) {
    long r = t;
    cplx w = 1.0, g = 0.0;
    for (int e = 0; e < N; ++e) {
      const int k = static_cast<int>(r % grid);
      r /= grid;
      w *= f[e][k];
      g += u[k];
    }
    if (w == 0.0) continue;
    acc += w * coherentKet(beta0 * g, n_max);
  }
  return acc / std::pow(double(grid), N);
}

Eigen::MatrixXcd noFilterCombinatorial2(const CoherenceTable& m1, const CoherenceTable& m2, double beta0,
                                        int n_max, int k_max) {
  // A[n][d1 + k_max] for d = (d1, n - d1), d1 in [-k_max, n + k_max].
  auto f_coeff = [](int d, int r) {
    if (r < 0 || d + r < 0) return 0.0;
    return std::exp(-logFactorial(d + r) - logFactorial(r));
  };
  std::vector<std::vector<double>> A(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    A[n].assign(n + 2 * k_max + 1, 0.0);
    const double pref = beta0 == 0.0 ? (n == 0 ? 1.0 : 0.0) : std::exp(n * std::log(beta0) - 0.5 * logFactorial(n));
    for (int d1 = -k_max; d1 <= n + k_max; ++d1) {
      const int d2 = n - d1;
      double sum = 0.0;
      for (int k = 0; k <= k_max; ++k) {
        double tk = 0.0;
        for (int r1 = 0; r1 <= k; ++r1) tk += f_coeff(d1, r1) * f_coeff(d2, k - r1);
        if (tk == 0.0) continue;
        sum += std::pow(-0.5 * beta0 * beta0, k) * std::exp(logFactorial(n + k)) * tk;
      }
      A[n][d1 + k_max] = pref * sum;
    }
  }
  Eigen::MatrixXcd rho(n_max + 1, n_max + 1);
  for (int n = 0; n <= n_max; ++n)
    for (int np = 0; np <= n_max; ++np) {
      cplx acc = 0.0;
      for (int d1 = -k_max; d1 <= n + k_max; ++d1) {
        const double a = A[n][d1 + k_max];
        if (a == 0.0) continue;
        for (int e1 = -k_max; e1 <= np + k_max; ++e1) {
          const double b = A[np][e1 + k_max];
          if (b == 0.0) continue;
          const int k1 = e1 - d1, k2 = (np - e1) - (n - d1);
          if (std::abs(k1) > m1.kmax() || std::abs(k2) > m2.kmax()) continue;
          acc += a * b * m1(k1) * m2(k2);
        }
      }
      rho(n, np) = acc;
    }
  return rho;
}

cplx latticeCF(double beta_abs, double beta_phase, double drift, int m) {
  const int L = ielsCutoff(beta_abs) + std::abs(m);
  cplx acc = 0.0;
  auto c = [&](int l) {
    const double j = std::cyl_bessel_j(static_cast<double>(std::abs(l)), 2.0 * beta_abs) * ((l < 0 && (l & 1)) ? -1.0 : 1.0);
    return std::polar(j, l * beta_phase - 2.0 * kPi * std::fmod(double(l) * l * drift, 1.0));
  };
  for (int l = -L; l <= L; ++l) acc += c(l) * std::conj(c(l + m));
  return acc;
}

}  // namespace freelight::oracle
