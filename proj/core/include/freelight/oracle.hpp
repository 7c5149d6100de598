#pragma once

#include "freelight/electron.hpp"
#include "freelight/emission.hpp"
#include "freelight/fock.hpp"

#include <vector>

// Slow reference implementations for tests. Nothing here is installed.
namespace freelight::oracle {

struct QuadratureSpec {
  double z_extent = 0.0;     // half-range; <= 0 picks 8 sigma_eff (plus the kernel width when filtering)
  int points_per_cycle = 64;
  bool richardson = true;    // repeat at half the step and require agreement to 1e-5
};

// Fock-basis state from direct quadrature over electron coordinates of
// rho_e(z, z') F(z - z') |alpha0 + beta0 sum e^{-i z}><...|. N <= 2; windows
// only for N = 1. Normalized by the trace; the raw trace goes to p_success.
FilterOutcome rhoDirect(const std::vector<ElectronPulse>& pulses, double beta0, cplx alpha0,
                        const std::vector<PostFilter>& filters, int n_max, const QuadratureSpec& spec = {});

// int rho_e(z) e^{imz} dz by trapezoid (periodic when sigma_t is infinite).
cplx cfQuadrature(const ElectronPulse& pulse, int m, const QuadratureSpec& spec = {});

// Exact-filter amplitudes for N >= 1 from trapezoid quadrature on the
// N-torus, grid points per dimension given explicitly. Unnormalized.
Eigen::VectorXcd exactTorus(const std::vector<ModulationSpectrum>& spectra, double beta0, const std::vector<int>& s,
                            int n_max, int grid);

// No-filter density matrix for N = 2 from the ket Fourier table
// A_n(d) = (beta0^n / sqrt n!) sum_k (-beta0^2/2)^k (n+k)! [t^k] prod_i f_{d_i}(t).
Eigen::MatrixXcd noFilterCombinatorial2(const CoherenceTable& m1, const CoherenceTable& m2, double beta0,
                                        int n_max, int k_max);

// Plain double sum sum_l c_l conj(c_{l+m}) over Bessel values from std::cyl_bessel_j.
cplx latticeCF(double beta_abs, double beta_phase, double drift, int m);

}  // namespace freelight::oracle
