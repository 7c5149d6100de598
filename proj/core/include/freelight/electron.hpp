#pragma once

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <optional>
#include <vector>

namespace freelight {

using cplx = std::complex<double>;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Sideband amplitudes c_l on the fundamental (omega_0 / v) lattice.
// amps[i] holds c_{offset + i}; with harmonic h only multiples of h are
// populated but the storage stays dense on the fundamental lattice.
struct ModulationSpectrum {
  int offset = 0;
  std::vector<cplx> amps{cplx(1.0, 0.0)};
  int harmonic = 1;

  int lo() const { return offset; }
  int hi() const { return offset + static_cast<int>(amps.size()) - 1; }
  cplx at(int l) const {
    const int i = l - offset;
    return (i < 0 || i >= static_cast<int>(amps.size())) ? cplx(0.0) : amps[i];
  }
  double norm2() const;
  ModulationSpectrum normalized() const;
  // Drops zero padding at both ends (keeps at least one entry).
  ModulationSpectrum trimmed(double tol = 0.0) const;
  void validate() const;
};

// sigma_t = kInf is the infinite coherence-time limit.
struct ElectronPulse {
  ModulationSpectrum spectrum;
  double sigma_t = kInf;
  double delta_t = 0.0;

  void validate() const;
};

struct IELSStage {
  double beta_abs = 0.0;
  double beta_phase = 0.0;  // arg(-beta)
  int harmonic = 1;
  double drift = 0.0;       // d / z_T
};

struct PreFilter {
  double delta_max = 0.0;
  double delta_d = 1.0;
};

// Sideband cutoff L(beta) used by ielsModulate.
int ielsCutoff(double beta_abs);

ModulationSpectrum ielsModulate(const IELSStage& stage);

// Applies exp(-2 pi i l^2 drift) to every amplitude, with l counted in units
// of the modulation harmonic.
ModulationSpectrum applyDrift(const ModulationSpectrum& spec, double drift);

cplx coherenceFactor(const ElectronPulse& pulse, int m);

// Closed form for a single IELS stage at infinite coherence time. beta_phase
// enters only as exp(-i m beta_phase).
cplx coherenceFactorClosedDrift(double beta_abs, double drift, int m, double beta_phase = 0.0);

cplx projectedCoherenceFactor(const ElectronPulse& pulse, int m, double q);

// Rows follow zGrid, columns follow qGrid.
Eigen::MatrixXd electronWigner(const ElectronPulse& pulse, const std::vector<double>& zGrid,
                               const std::vector<double>& qGrid);

// Real-space density rho_e(z, z) including envelope and jitter.
double electronDensity(const ElectronPulse& pulse, double z);

struct PrefilterResult {
  cplx cf;
  double success = 0.0;  // M_0 before renormalization
};

// Sidebands kept by the pre-filter window [delta_max - delta_d, delta_max],
// edges included.
ModulationSpectrum prefilterSpectrum(const ModulationSpectrum& spec, const PreFilter& filter,
                                     double* success = nullptr);

// Infinite-sigma lattice form unless sigma_t is given, in which case the
// erf form with Gaussian envelope (and jitter delta_t) is used.
PrefilterResult prefilterCF(const IELSStage& stage, const PreFilter& filter, int m,
                            std::optional<double> sigma_t = std::nullopt, double delta_t = 0.0);

// Coherence factors M_m for |m| <= kmax, cached.
class CoherenceTable {
 public:
  CoherenceTable() = default;
  CoherenceTable(const ElectronPulse& pulse, int kmax);
  static CoherenceTable fromValues(std::vector<cplx> nonNegative);  // M_0..M_kmax

  int kmax() const { return kmax_; }
  cplx operator()(int m) const;

 private:
  std::vector<cplx> pos_;  // M_0..M_kmax; M_{-m} = conj(M_m)
  int kmax_ = -1;
};

}  // namespace freelight
