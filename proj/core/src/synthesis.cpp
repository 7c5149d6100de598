#include "freelight/synthesis.hpp"

#include "freelight/emission.hpp"
#include "freelight/random.hpp"
#include "freelight/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace freelight {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sigmoid(double u) { return u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u)); }

cplx driftPhase(long l, double drift) {
  const double frac = std::fmod(static_cast<double>(l * l) * drift, 1.0);
  return std::polar(1.0, -kTwoPi * frac);
}

std::vector<cplx> truncatedTarget(const SynthesisProblem& p) {
  std::vector<cplx> t(p.n_max_coeff + 1);
  double n2 = 0.0;
  for (int n = 0; n <= p.n_max_coeff; ++n) {
    t[n] = targetAmplitude(p.target, n);
    n2 += std::norm(t[n]);
  }
  if (!(n2 > 0.0)) throw std::invalid_argument("synthesis: target has no weight on n <= n_max_coeff");
  for (auto& v : t) v /= std::sqrt(n2);
  return t;
}

double sumBeta2(const RingProfile& p) {
  double s = 0.0;
  for (const auto& r : p.betas) s += r.beta_abs * r.beta_abs;
  return s;
}

}  // namespace

ModulationSpectrum ringCoefficients(const RingProfile& profile) {
  if (profile.betas.empty()) throw std::invalid_argument("ringCoefficients: M must be >= 1");
  if (profile.harmonic < 1) throw std::invalid_argument("ringCoefficients: harmonic < 1");
  int L = 0;
  for (const auto& r : profile.betas) {
    if (!(r.beta_abs >= 0.0)) throw std::invalid_argument("ringCoefficients: beta_abs < 0");
    L = std::max(L, r.beta_abs > 0.0 ? ielsCutoff(r.beta_abs) : 0);
  }
  const int h = profile.harmonic;
  std::vector<cplx> c(2 * L + 1, cplx(0.0));
  for (const auto& r : profile.betas) {
    const auto J = besselJRange(L, 2.0 * r.beta_abs);
    for (int l = -L; l <= L; ++l) {
      double j = J[std::abs(l)];
      if (l < 0 && (l & 1)) j = -j;
      c[l + L] += std::polar(j, l * r.beta_phase);
    }
  }
  ModulationSpectrum out;
  out.harmonic = h;
  out.offset = -L * h;
  out.amps.assign(static_cast<size_t>(2 * L * h + 1), cplx(0.0));
  for (int l = -L; l <= L; ++l) out.amps[(l + L) * h] = c[l + L] * driftPhase(l, profile.drift);
  return out.normalized();
}

void SynthesisProblem::validate() const {
  if (M < 1) throw std::invalid_argument("SynthesisProblem: M must be >= 1");
  if (harmonic < 1) throw std::invalid_argument("SynthesisProblem: harmonic must be >= 1");
  if (restarts < 1) throw std::invalid_argument("SynthesisProblem: restarts must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("SynthesisProblem: max_iters must be >= 1");
  if (!(beta_cap > 0.0)) throw std::invalid_argument("SynthesisProblem: beta_cap must be > 0");
  if (n_max_coeff < 0) throw std::invalid_argument("SynthesisProblem: n_max_coeff must be >= 0");
  if (!(beta0 >= 0.0)) throw std::invalid_argument("SynthesisProblem: beta0 must be >= 0");
  if (truncation() < n_max_coeff) throw std::invalid_argument("SynthesisProblem: working truncation below n_max_coeff");
}

int SynthesisProblem::truncation() const {
  return working_truncation >= 0 ? working_truncation : defaultTruncation(beta0);
}

ObjectiveValue objective(const RingProfile& profile, int s, const SynthesisProblem& problem) {
  const int W = problem.truncation();
  // Precondition: the target itself must be representable at the working truncation.
  (void)targetFactory(problem.target, W);
  const auto t = truncatedTarget(problem);
  const ModulationSpectrum spec = ringCoefficients(profile);
  const FilterOutcome out = emitExact({spec}, problem.beta0, {s}, W);
  const auto& a = out.state.amplitudes();
  cplx ov = 0.0;
  for (int n = 0; n <= problem.n_max_coeff && n <= W; ++n) ov += std::conj(t[n]) * a(n);
  return {std::norm(ov), out.p_success};
}

FidelityKernel::FidelityKernel(const SynthesisProblem& problem, int s)
    : s_(s), h_(problem.harmonic), W_(problem.truncation()) {
  coh_.resize(W_ + 1);
  for (int n = 0; n <= W_; ++n) coh_[n] = coherentAmplitude(n, problem.beta0);
  target_ = truncatedTarget(problem);
}

double FidelityKernel::operator()(const RingProfile& profile) const {
  // Only sidebands l with n = l h - s in [0, W] contribute.
  auto floorDiv = [](int a, int b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); };
  const int llo = -floorDiv(-s_, h_), lhi = floorDiv(s_ + W_, h_);
  if (llo > lhi) return 0.0;
  const int lmax = std::max(std::abs(llo), std::abs(lhi));
  std::vector<cplx> c(static_cast<size_t>(lhi - llo + 1), cplx(0.0));
  for (const auto& r : profile.betas) {
    const auto J = besselJRange(lmax, 2.0 * r.beta_abs);
    const cplx step = std::polar(1.0, r.beta_phase);
    cplx e = std::polar(1.0, llo * r.beta_phase);
    for (int l = llo; l <= lhi; ++l, e *= step) {
      double j = J[std::abs(l)];
      if (l < 0 && (l & 1)) j = -j;
      c[l - llo] += j * e;
    }
  }
  // exp(-2 pi i l^2 d) by recurrence: ratio exp(-2 pi i (2l+1) d) advances by exp(-4 pi i d).
  cplx drift = driftPhase(llo, profile.drift);
  cplx ratio = std::polar(1.0, -kTwoPi * std::fmod((2.0 * llo + 1.0) * profile.drift, 1.0));
  const cplx ratio_step = std::polar(1.0, -2.0 * kTwoPi * std::fmod(profile.drift, 1.0));
  cplx ov = 0.0;
  double norm = 0.0;
  for (int l = llo; l <= lhi; ++l, drift *= ratio, ratio *= ratio_step) {
    const int n = l * h_ - s_;
    const cplx a = coh_[n] * c[l - llo] * drift;
    norm += std::norm(a);
    if (n < static_cast<int>(target_.size())) ov += std::conj(target_[n]) * a;
  }
  return norm > 0.0 ? std::norm(ov) / norm : 0.0;
}

std::vector<double> packParameters(const RingProfile& p, double beta_cap) {
  std::vector<double> x;
  x.reserve(2 * p.betas.size() + 1);
  for (const auto& r : p.betas) {
    const double f = std::clamp(r.beta_abs / beta_cap, 1e-9, 1.0 - 1e-9);
    x.push_back(std::log(f / (1.0 - f)));
    x.push_back(r.beta_phase);
  }
  x.push_back(p.drift);
  return x;
}

RingProfile unpackParameters(const std::vector<double>& x, int M, int harmonic, double beta_cap) {
  RingProfile p;
  p.harmonic = harmonic;
  p.betas.resize(M);
  for (int i = 0; i < M; ++i) {
    p.betas[i].beta_abs = beta_cap * sigmoid(x[2 * i]);
    p.betas[i].beta_phase = x[2 * i + 1];
  }
  p.drift = x[2 * M];
  return p;
}

std::vector<double> finiteDifferenceGradient(const FidelityKernel& f, const std::vector<double>& x, int M,
                                             int harmonic, double beta_cap, double h) {
  std::vector<double> g(x.size());
  std::vector<double> y = x;
  for (size_t k = 0; k < x.size(); ++k) {
    y[k] = x[k] + h;
    const double fp = f(unpackParameters(y, M, harmonic, beta_cap));
    y[k] = x[k] - h;
    const double fm = f(unpackParameters(y, M, harmonic, beta_cap));
    y[k] = x[k];
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

SynthesisResult optimize(const SynthesisProblem& problem) {
  problem.validate();
  (void)targetFactory(problem.target, problem.truncation());
  const int M = problem.M, h = problem.harmonic;
  const double cap = problem.beta_cap;
  constexpr double kFdStep = 1e-3, kArmijo = 1e-4, kMinStep = 1e-8;

  SynthesisResult res;
  res.seed = problem.seed;
  res.trace.assign(problem.restarts, 0.0);
  bool have = false;
  double bestF = -1.0;
  std::vector<double> bestX;
  int bestS = 0;

  auto better = [&](double F, const RingProfile& prof, int s) {
    if (!have) return true;
    if (F > bestF + 1e-12) return true;
    if (F < bestF - 1e-12) return false;
    const RingProfile cur = unpackParameters(bestX, M, h, cap);
    const double a = sumBeta2(prof), b = sumBeta2(cur);
    if (a < b - 1e-12) return true;
    if (a > b + 1e-12) return false;
    return std::abs(s) < std::abs(bestS);
  };

  for (int s = problem.sLow(); s <= problem.sHigh(); ++s) {
    const FidelityKernel kernel(problem, s);
    auto loss = [&](const std::vector<double>& x) {
      ++res.evaluations;
      return 1.0 - kernel(unpackParameters(x, M, h, cap));
    };
    for (int r = 0; r < problem.restarts; ++r) {
      CounterRng rng(problem.seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(s)), static_cast<std::uint64_t>(r));
      RingProfile init;
      init.harmonic = h;
      init.betas.resize(M);
      for (auto& ring : init.betas) {
        ring.beta_abs = rng.uniform(0.0, cap);
        ring.beta_phase = rng.uniform(0.0, kTwoPi);
      }
      init.drift = rng.uniform();
      std::vector<double> x = packParameters(init, cap);
      double fx = loss(x);
      double step = 1.0;
      for (int it = 0; it < problem.max_iters; ++it) {
        const auto g = finiteDifferenceGradient(kernel, x, M, h, cap, kFdStep);
        res.evaluations += 2 * static_cast<long>(g.size());
        // g is the gradient of the fidelity; descend on the loss 1 - F.
        double gn2 = 0.0;
        for (double v : g) gn2 += v * v;
        if (gn2 < 1e-24) break;
        bool accepted = false;
        while (step >= kMinStep) {
          std::vector<double> y = x;
          for (size_t k = 0; k < y.size(); ++k) y[k] += step * g[k];
          y.back() -= std::floor(y.back());
          const double fy = loss(y);
          if (fy <= fx - kArmijo * step * gn2) {
            x = std::move(y);
            fx = fy;
            step *= 2.0;
            accepted = true;
            break;
          }
          step *= 0.5;
        }
        if (!accepted) break;
      }
      const double F = 1.0 - fx;
      res.trace[r] = std::max(res.trace[r], F);
      const RingProfile prof = unpackParameters(x, M, h, cap);
      if (better(F, prof, s)) {
        have = true;
        bestF = F;
        bestX = x;
        bestS = s;
      }
    }
  }

  res.best = unpackParameters(bestX, M, h, cap);
  for (auto& ring : res.best.betas) ring.beta_phase -= kTwoPi * std::floor(ring.beta_phase / kTwoPi);
  res.s = bestS;
  const ObjectiveValue v = objective(res.best, bestS, problem);
  res.fidelity = v.fidelity;
  res.p_success = v.p_success;
  return res;
}

}  // namespace freelight
