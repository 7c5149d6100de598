#pragma once

#include "freelight/electron.hpp"
#include "freelight/fock.hpp"

#include <variant>
#include <vector>

namespace freelight {

struct NoFilter {};
// Keeps final momenta in [s - delta_d, s + delta_d] (units omega_0 / v).
struct WindowFilter {
  int s = 0;
  double delta_d = 1.0;
};
struct ExactFilter {
  int s = 0;
};
using PostFilter = std::variant<NoFilter, WindowFilter, ExactFilter>;

struct EmissionStats {
  double intensity = 0.0;  // I_N = <n>
  double g_factor = 0.0;   // G_N = <a^dag^2 a^2>
  double fluct = 0.0;      // Delta I_N^2 = <n^2> - <n>^2
  bool physical = true;
  double gRatio() const { return intensity > 0.0 ? g_factor / (intensity * intensity) : 0.0; }
};

struct FilterOutcome {
  PhotonicState state;
  double p_success = 0.0;
};

// Single-electron and N <= 3 no-filter states. n_max < 0 selects defaultTruncation.
PhotonicState emitNoFilter(const std::vector<ElectronPulse>& pulses, double beta0, int n_max = -1);
// Same from precomputed coherence factors (e.g. pre-filtered electrons).
PhotonicState emitNoFilter(const std::vector<CoherenceTable>& cfs, double beta0, int n_max = -1);

// Statistics for any N from per-electron CFs at orders 0, +-1, +-2.
// emissionStats throws std::domain_error("unphysical CF input") when the
// table implies G/I^2 < 1 or a negative variance; computeEmissionStats only
// flags it.
EmissionStats computeEmissionStats(const std::vector<CoherenceTable>& cfs, double beta0);
EmissionStats emissionStats(const std::vector<CoherenceTable>& cfs, double beta0);
EmissionStats emissionStats(const CoherenceTable& cf, double beta0, int n_electrons);

FilterOutcome emitSingleWindow(const ElectronPulse& pulse, double beta0, const WindowFilter& w, int n_max = -1);

// Infinite coherence time, each electron post-selected on sideband s[i].
FilterOutcome emitExact(const std::vector<ModulationSpectrum>& spectra, double beta0, const std::vector<int>& s,
                        int n_max = -1);

struct CatClosedForm {
  PhotonicState state;
  double p_success = 0.0;       // probability of the post-selection for the truncated asymptotic spectrum
  double pf_closed_form = 0.0;  // unnormalized dividing factor from the incomplete-gamma formula
  cplx chi = 0.0;
  double theta = 0.0;
};
CatClosedForm catClosedForm(double beta_abs, double beta_phase, int s, int n_max_trunc, double beta0);

// Direct sum of |<n|chi>(1 + e^{i theta}(-1)^n)|^2 for n <= n_max_trunc.
double catDividingFactorDirect(double beta_abs, int s, int n_max_trunc, double beta0);

cplx expectationField(const FilterOutcome& outcome);

// All vectors of N nonnegative integers summing to n, in lexicographic order.
std::vector<std::vector<int>> compositions(int n, int parts);
double multinomial(const std::vector<int>& m);

}  // namespace freelight
