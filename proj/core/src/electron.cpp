#include "freelight/electron.hpp"

#include "freelight/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace freelight {

namespace {

constexpr double kPi = std::numbers::pi;

// R[D + (K-1)] = sum_l c_l conj(c_{l-D}) for D in [-(K-1), K-1].
std::vector<cplx> autocorrelation(const std::vector<cplx>& c) {
  const int K = static_cast<int>(c.size());
  std::vector<cplx> R(2 * K - 1, cplx(0.0));
  for (int D = -(K - 1); D <= K - 1; ++D) {
    cplx acc = 0.0;
    const int i0 = std::max(0, D), i1 = std::min(K - 1, K - 1 + D);
    for (int i = i0; i <= i1; ++i) acc += c[i] * std::conj(c[i - D]);
    R[D + K - 1] = acc;
  }
  return R;
}

// sum_D R_D exp(-(D+m)^2 s2 / 2), or R_{-m} when s2 is infinite.
cplx cfFromAutocorr(const std::vector<cplx>& R, int m, double s2) {
  const int K = (static_cast<int>(R.size()) + 1) / 2;
  if (std::isinf(s2)) {
    const int D = -m;
    return (D < -(K - 1) || D > K - 1) ? cplx(0.0) : R[D + K - 1];
  }
  cplx acc = 0.0;
  for (int D = -(K - 1); D <= K - 1; ++D) {
    const double x = D + m;
    const double g = std::exp(-0.5 * x * x * s2);
    if (g == 0.0) continue;
    acc += R[D + K - 1] * g;
  }
  return acc;
}

double totalWidth2(const ElectronPulse& p) {
  return p.sigma_t * p.sigma_t + p.delta_t * p.delta_t;
}

// Norm of envelope times modulation: sum_D R_D exp(-D^2 s2 / 2). Equals 1 up to
// O(exp(-s2/2)) once the sidebands are resolved; dividing by it keeps M_0 = 1
// and |M_m| <= 1 for short pulses too.
double envelopeNorm(const std::vector<cplx>& R, double s2) {
  return std::isinf(s2) ? 1.0 : cfFromAutocorr(R, 0, s2).real();
}

}  // namespace

double ModulationSpectrum::norm2() const {
  double s = 0.0;
  for (const auto& a : amps) s += std::norm(a);
  return s;
}

ModulationSpectrum ModulationSpectrum::normalized() const {
  const double n = norm2();
  if (!(n > 0.0)) throw std::invalid_argument("ModulationSpectrum: zero norm");
  ModulationSpectrum out = *this;
  const double inv = 1.0 / std::sqrt(n);
  for (auto& a : out.amps) a *= inv;
  return out;
}

ModulationSpectrum ModulationSpectrum::trimmed(double tol) const {
  int i0 = 0, i1 = static_cast<int>(amps.size()) - 1;
  while (i0 < i1 && std::abs(amps[i0]) <= tol) ++i0;
  while (i1 > i0 && std::abs(amps[i1]) <= tol) --i1;
  ModulationSpectrum out;
  out.offset = offset + i0;
  out.amps.assign(amps.begin() + i0, amps.begin() + i1 + 1);
  out.harmonic = harmonic;
  return out;
}

void ModulationSpectrum::validate() const {
  if (amps.empty()) throw std::invalid_argument("ModulationSpectrum: empty amplitude list");
  if (harmonic < 1) throw std::invalid_argument("ModulationSpectrum: harmonic must be >= 1");
  for (const auto& a : amps)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw std::invalid_argument("ModulationSpectrum: non-finite amplitude");
}

void ElectronPulse::validate() const {
  spectrum.validate();
  if (!(sigma_t > 0.0)) throw std::invalid_argument("ElectronPulse: sigma_t must be > 0");
  if (!(delta_t >= 0.0) || std::isinf(delta_t))
    throw std::invalid_argument("ElectronPulse: delta_t must be finite and >= 0");
}

int ielsCutoff(double beta_abs) {
  const double x = 2.0 * beta_abs;
  return static_cast<int>(std::ceil(x + 10.0 * std::cbrt(x) + 10.0));
}

ModulationSpectrum ielsModulate(const IELSStage& stage) {
  if (!(stage.beta_abs >= 0.0)) throw std::invalid_argument("ielsModulate: beta_abs < 0");
  if (stage.harmonic < 1) throw std::invalid_argument("ielsModulate: harmonic < 1");
  ModulationSpectrum out;
  out.harmonic = stage.harmonic;
  if (stage.beta_abs == 0.0) return out;

  const int L = ielsCutoff(stage.beta_abs);
  const int h = stage.harmonic;
  const auto J = besselJRange(L, 2.0 * stage.beta_abs);
  out.offset = -L * h;
  out.amps.assign(static_cast<size_t>(2 * L * h + 1), cplx(0.0));
  for (int l = -L; l <= L; ++l) {
    double j = J[std::abs(l)];
    if (l < 0 && (l & 1)) j = -j;
    // l^2 d reduced mod 1 before multiplying by 2 pi keeps the phase accurate.
    const double frac = std::fmod(static_cast<double>(l) * l * stage.drift, 1.0);
    const double ph = l * stage.beta_phase - 2.0 * kPi * frac;
    out.amps[(l + L) * h] = std::polar(j, ph);
  }
  return out.normalized();
}

ModulationSpectrum applyDrift(const ModulationSpectrum& spec, double drift) {
  ModulationSpectrum out = spec;
  const int h = spec.harmonic;
  for (int i = 0; i < static_cast<int>(out.amps.size()); ++i) {
    const int j = spec.offset + i;
    if (j % h != 0) continue;
    const long l = j / h;
    const double frac = std::fmod(static_cast<double>(l * l) * drift, 1.0);
    out.amps[i] *= std::polar(1.0, -2.0 * kPi * frac);
  }
  return out;
}

cplx coherenceFactor(const ElectronPulse& pulse, int m) {
  pulse.validate();
  const auto R = autocorrelation(pulse.spectrum.amps);
  const double w2 = totalWidth2(pulse);
  return cfFromAutocorr(R, m, w2) / envelopeNorm(R, w2);
}

cplx coherenceFactorClosedDrift(double beta_abs, double drift, int m, double beta_phase) {
  const double s = std::sin(2.0 * kPi * m * std::fmod(drift, 1.0));
  const double mag = besselJ(m, 4.0 * beta_abs * std::fabs(s));
  // i^m sign(s)^m exp(-i m phase)
  int q = ((m % 4) + 4) % 4;
  if (s < 0.0 && (m & 1)) q = (q + 2) % 4;
  static const cplx ipow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  return mag * ipow[q] * std::polar(1.0, -m * beta_phase);
}

cplx projectedCoherenceFactor(const ElectronPulse& pulse, int m, double q) {
  pulse.validate();
  if (std::isinf(pulse.sigma_t))
    throw std::invalid_argument("projectedCoherenceFactor: requires finite sigma_t");
  const auto& c = pulse.spectrum.amps;
  const int off = pulse.spectrum.offset;
  const int K = static_cast<int>(c.size());
  const double s2 = pulse.sigma_t * pulse.sigma_t;
  const double w2 = totalWidth2(pulse);
  cplx acc = 0.0;
  for (int i = 0; i < K; ++i) {
    if (c[i] == 0.0) continue;
    for (int k = 0; k < K; ++k) {
      if (c[k] == 0.0) continue;
      const double D = i - k + m;
      const double g1 = std::exp(-0.5 * D * D * w2);
      if (g1 == 0.0) continue;
      const double x = q - (2.0 * off + i + k) / 2.0;
      acc += c[i] * std::conj(c[k]) * g1 * std::exp(-2.0 * s2 * x * x);
    }
  }
  return acc * std::sqrt(2.0 * s2 / kPi) / envelopeNorm(autocorrelation(c), w2);
}

Eigen::MatrixXd electronWigner(const ElectronPulse& pulse, const std::vector<double>& zGrid,
                               const std::vector<double>& qGrid) {
  pulse.validate();
  if (std::isinf(pulse.sigma_t))
    throw std::invalid_argument("electronWigner: requires finite sigma_t");
  const auto& c = pulse.spectrum.amps;
  const int off = pulse.spectrum.offset;
  const int K = static_cast<int>(c.size());
  const double s2 = pulse.sigma_t * pulse.sigma_t;
  const double w2 = totalWidth2(pulse);
  const double env0 = std::sqrt(s2 / w2) / kPi / envelopeNorm(autocorrelation(c), w2);

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(zGrid.size()),
                                            static_cast<Eigen::Index>(qGrid.size()));
  for (size_t iq = 0; iq < qGrid.size(); ++iq) {
    // T_D(q) = sum over pairs with l - l' = D of c_l conj(c_l') exp(-2 s2 (q - (l+l')/2)^2)
    std::vector<cplx> T(2 * K - 1, cplx(0.0));
    for (int i = 0; i < K; ++i) {
      if (c[i] == 0.0) continue;
      for (int k = 0; k < K; ++k) {
        if (c[k] == 0.0) continue;
        const double x = qGrid[iq] - (2.0 * off + i + k) / 2.0;
        const double g = std::exp(-2.0 * s2 * x * x);
        if (g == 0.0) continue;
        T[i - k + K - 1] += c[i] * std::conj(c[k]) * g;
      }
    }
    for (size_t iz = 0; iz < zGrid.size(); ++iz) {
      const double z = zGrid[iz];
      double acc = 0.0;
      for (int D = -(K - 1); D <= K - 1; ++D) {
        const cplx t = T[D + K - 1];
        if (t == 0.0) continue;
        acc += (t * std::polar(1.0, D * z)).real();
      }
      W(static_cast<Eigen::Index>(iz), static_cast<Eigen::Index>(iq)) =
          env0 * std::exp(-z * z / (2.0 * w2)) * acc;
    }
  }
  return W;
}

double electronDensity(const ElectronPulse& pulse, double z) {
  pulse.validate();
  const auto& c = pulse.spectrum.amps;
  // Without jitter the density is |envelope|^2 |sum c_l e^{ilz}|^2; the jitter
  // only broadens the envelope because the modulation is locked to the lab frame.
  const auto R = autocorrelation(c);
  const int K = static_cast<int>(c.size());
  double acc = 0.0;
  for (int D = -(K - 1); D <= K - 1; ++D) acc += (R[D + K - 1] * std::polar(1.0, D * z)).real();
  if (std::isinf(pulse.sigma_t)) return acc;  // per unit length, periodic
  const double w2 = totalWidth2(pulse);
  return acc * std::exp(-z * z / (2.0 * w2)) / std::sqrt(2.0 * kPi * w2) / envelopeNorm(R, w2);
}

ModulationSpectrum prefilterSpectrum(const ModulationSpectrum& spec, const PreFilter& filter,
                                     double* success) {
  if (!(filter.delta_d > 0.0)) throw std::invalid_argument("PreFilter: delta_d must be > 0");
  const int lo = static_cast<int>(std::ceil(filter.delta_max - filter.delta_d - 1e-12));
  const int hi = static_cast<int>(std::floor(filter.delta_max + 1e-12));
  if (lo > hi) throw std::invalid_argument("empty pre-filter");
  ModulationSpectrum out;
  out.harmonic = spec.harmonic;
  out.offset = lo;
  out.amps.assign(static_cast<size_t>(hi - lo + 1), cplx(0.0));
  double mass = 0.0;
  for (int l = lo; l <= hi; ++l) {
    out.amps[l - lo] = spec.at(l);
    mass += std::norm(out.amps[l - lo]);
  }
  if (success) *success = mass;
  return out;
}

PrefilterResult prefilterCF(const IELSStage& stage, const PreFilter& filter, int m,
                            std::optional<double> sigma_t, double delta_t) {
  const ModulationSpectrum spec = ielsModulate(stage);
  if (!sigma_t) {
    double M0 = 0.0;
    const ModulationSpectrum kept = prefilterSpectrum(spec, filter, &M0);
    if (M0 <= 0.0) return {cplx(0.0), 0.0};
    const auto R = autocorrelation(kept.amps);
    return {cfFromAutocorr(R, m, kInf) / M0, M0};
  }

  if (!(filter.delta_d > 0.0)) throw std::invalid_argument("PreFilter: delta_d must be > 0");
  const double sig = *sigma_t;
  if (!(sig > 0.0)) throw std::invalid_argument("prefilterCF: sigma_t must be > 0");
  const double w2 = sig * sig + delta_t * delta_t;
  const auto& c = spec.amps;
  const int off = spec.offset;
  const int K = static_cast<int>(c.size());
  const double a = sig / std::sqrt(2.0);

  auto unnormalized = [&](int k) -> cplx {
    if (filter.delta_d <= std::abs(k)) return 0.0;
    const int kp = std::max(0, k), km = std::min(0, k);
    cplx acc = 0.0;
    for (int i = 0; i < K; ++i) {
      if (c[i] == 0.0) continue;
      for (int j = 0; j < K; ++j) {
        if (c[j] == 0.0) continue;
        const double D = i - j + k;
        const double g = std::exp(-0.5 * D * D * w2);
        if (g == 0.0) continue;
        const double kl = 2.0 * off + i + j - k;
        const double e = std::erf((2.0 * filter.delta_max - 2.0 * kp - kl) * a) +
                         std::erf((kl + 2.0 * km - 2.0 * filter.delta_max + 2.0 * filter.delta_d) * a);
        acc += c[i] * std::conj(c[j]) * g * e;
      }
    }
    return 0.5 * acc;
  };
  const double M0 = unnormalized(0).real();
  if (M0 <= 0.0) return {cplx(0.0), 0.0};
  return {unnormalized(m) / M0, M0 / envelopeNorm(autocorrelation(c), w2)};
}

CoherenceTable::CoherenceTable(const ElectronPulse& pulse, int kmax) : kmax_(kmax) {
  pulse.validate();
  if (kmax < 0) throw std::invalid_argument("CoherenceTable: kmax < 0");
  const auto R = autocorrelation(pulse.spectrum.amps);
  const double w2 = totalWidth2(pulse);
  pos_.resize(kmax + 1);
  const double norm = envelopeNorm(R, w2);
  for (int m = 0; m <= kmax; ++m) pos_[m] = cfFromAutocorr(R, m, w2) / norm;
}

CoherenceTable CoherenceTable::fromValues(std::vector<cplx> nonNegative) {
  if (nonNegative.empty()) throw std::invalid_argument("CoherenceTable: no values");
  CoherenceTable t;
  t.kmax_ = static_cast<int>(nonNegative.size()) - 1;
  t.pos_ = std::move(nonNegative);
  return t;
}

cplx CoherenceTable::operator()(int m) const {
  const int am = std::abs(m);
  if (am > kmax_) throw std::out_of_range("CoherenceTable: order beyond table");
  return m >= 0 ? pos_[am] : std::conj(pos_[am]);
}

}  // namespace freelight
