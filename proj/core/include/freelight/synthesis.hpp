#pragma once

#include "freelight/electron.hpp"
#include "freelight/fock.hpp"

#include <cstdint>
#include <vector>

namespace freelight {

struct Ring {
  double beta_abs = 0.0;
  double beta_phase = 0.0;
};

struct RingProfile {
  std::vector<Ring> betas;
  double drift = 0.0;
  int harmonic = 1;
};

// c_l proportional to exp(-2 pi i l^2 d) sum_i J_l(2|beta_i|) exp(i l phase_i), normalized.
ModulationSpectrum ringCoefficients(const RingProfile& profile);

struct SynthesisProblem {
  TargetState target = SqueezedVacuum{0.0};
  int n_max_coeff = 10;
  double beta0 = 1.0;
  int M = 1;
  int harmonic = 1;
  // Inclusive sideband range; defaults to [-n_max_coeff - 5, 5] when s_min > s_max.
  int s_min = 1;
  int s_max = 0;
  double beta_cap = 20.0;
  int restarts = 64;
  int max_iters = 500;
  std::uint64_t seed = 0;
  int working_truncation = -1;  // < 0: defaultTruncation(beta0)

  void validate() const;
  int sLow() const { return s_min > s_max ? -n_max_coeff - 5 : s_min; }
  int sHigh() const { return s_min > s_max ? 5 : s_max; }
  int truncation() const;
};

struct ObjectiveValue {
  double fidelity = 0.0;
  double p_success = 0.0;
};

// ringCoefficients -> emitExact -> fidelity against the target restricted to
// n <= n_max_coeff (renormalized there).
ObjectiveValue objective(const RingProfile& profile, int s, const SynthesisProblem& problem);

struct SynthesisResult {
  RingProfile best;
  int s = 0;
  double fidelity = 0.0;
  double p_success = 0.0;
  std::vector<double> trace;  // best fidelity of each restart index over all s
  std::uint64_t seed = 0;
  long evaluations = 0;
};

SynthesisResult optimize(const SynthesisProblem& problem);

// Same fidelity as objective() but only evaluates the sidebands that reach
// photon numbers 0..truncation. Exposed for tests and benchmarks.
class FidelityKernel {
 public:
  FidelityKernel(const SynthesisProblem& problem, int s);
  double operator()(const RingProfile& profile) const;

 private:
  int s_, h_, W_;
  std::vector<double> coh_;
  std::vector<cplx> target_;  // conj not applied; length n_max_coeff + 1
};

// Central-difference gradient used by the optimizer, in the unconstrained
// coordinates (logit(beta/cap), phases, drift).
std::vector<double> packParameters(const RingProfile& p, double beta_cap);
RingProfile unpackParameters(const std::vector<double>& x, int M, int harmonic, double beta_cap);
std::vector<double> finiteDifferenceGradient(const FidelityKernel& f, const std::vector<double>& x, int M,
                                             int harmonic, double beta_cap, double h);

}  // namespace freelight
