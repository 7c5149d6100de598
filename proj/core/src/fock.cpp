#include "freelight/fock.hpp"

#include "freelight/special_functions.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace freelight {

namespace {
constexpr double kPi = std::numbers::pi;
}

DensityCheck checkDensity(const Eigen::MatrixXcd& rho) {
  DensityCheck c;
  c.herm_err = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  c.trace_err = std::abs(rho.trace() - cplx(1.0));
  Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  c.min_eig = es.eigenvalues().minCoeff();
  return c;
}

PhotonicState PhotonicState::pure(Eigen::VectorXcd amps) {
  if (amps.size() == 0) throw std::domain_error("PhotonicState: empty amplitude vector");
  const double n = amps.squaredNorm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kPureNormTol) {
    std::ostringstream os;
    os << "PhotonicState: pure state norm " << n << " differs from 1";
    throw std::domain_error(os.str());
  }
  return PhotonicState(std::move(amps));
}

PhotonicState PhotonicState::mixed(Eigen::MatrixXcd rho) {
  if (rho.rows() == 0 || rho.rows() != rho.cols())
    throw std::domain_error("PhotonicState: density matrix must be square and nonempty");
  if (!rho.allFinite()) throw std::domain_error("PhotonicState: non-finite density matrix");
  const DensityCheck c = checkDensity(rho);
  if (!c.ok()) {
    std::ostringstream os;
    os << "PhotonicState: invalid density matrix (herm " << c.herm_err << ", trace "
       << c.trace_err << ", min eig " << c.min_eig << ")";
    throw std::domain_error(os.str());
  }
  return PhotonicState(std::move(rho));
}

PhotonicState PhotonicState::vacuum(int n_max) { return fock(0, n_max); }

PhotonicState PhotonicState::fock(int n, int n_max) {
  if (n < 0 || n > n_max) throw std::invalid_argument("PhotonicState::fock: n outside truncation");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n_max + 1);
  v(n) = 1.0;
  return pure(std::move(v));
}

PhotonicState PhotonicState::coherent(cplx alpha, int n_max) {
  Eigen::VectorXcd v(n_max + 1);
  const double a = std::abs(alpha);
  for (int n = 0; n <= n_max; ++n) v(n) = coherentAmplitude(n, a) * std::polar(1.0, n * std::arg(alpha));
  v /= v.norm();
  return pure(std::move(v));
}

int PhotonicState::nMax() const {
  if (isPure()) return static_cast<int>(std::get<Eigen::VectorXcd>(data_).size()) - 1;
  return static_cast<int>(std::get<Eigen::MatrixXcd>(data_).rows()) - 1;
}

const Eigen::VectorXcd& PhotonicState::amplitudes() const {
  if (!isPure()) throw std::logic_error("PhotonicState: amplitudes requested from a mixed state");
  return std::get<Eigen::VectorXcd>(data_);
}

Eigen::MatrixXcd PhotonicState::density() const {
  if (isPure()) {
    const auto& v = std::get<Eigen::VectorXcd>(data_);
    return v * v.adjoint();
  }
  return std::get<Eigen::MatrixXcd>(data_);
}

double coherentAmplitude(int n, double beta0) {
  if (n < 0 || beta0 < 0.0) throw std::invalid_argument("coherentAmplitude: n and beta0 must be >= 0");
  if (beta0 == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-0.5 * beta0 * beta0 + n * std::log(beta0) - 0.5 * logFactorial(n));
}

double purity(const PhotonicState& s) {
  if (s.isPure()) return 1.0;
  const Eigen::MatrixXcd rho = s.density();
  // Tr rho^2 = sum |rho_ij|^2 for hermitian rho
  return rho.cwiseAbs2().sum();
}

double fidelity(const PhotonicState& a, const PhotonicState& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  if (a.isPure() && b.isPure()) return std::norm(a.amplitudes().dot(b.amplitudes()));
  if (a.isPure() != b.isPure()) {
    const auto& psi = a.isPure() ? a.amplitudes() : b.amplitudes();
    const Eigen::MatrixXcd rho = a.isPure() ? b.density() : a.density();
    return std::real(psi.dot(rho * psi));
  }
  throw std::invalid_argument("fidelity: at least one state must be pure");
}

double traceDistance(const PhotonicState& a, const PhotonicState& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("traceDistance: dimension mismatch");
  const Eigen::MatrixXcd d = a.density() - b.density();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

cplx expectation(const PhotonicState& s, Observable op) {
  const Eigen::MatrixXcd rho = s.density();
  const int D = static_cast<int>(rho.rows());
  cplx acc = 0.0;
  switch (op) {
    case Observable::Number:
      for (int n = 0; n < D; ++n) acc += double(n) * rho(n, n).real();
      break;
    case Observable::NumberSquared:
      for (int n = 0; n < D; ++n) acc += double(n) * n * rho(n, n).real();
      break;
    case Observable::Annihilation:
      for (int n = 1; n < D; ++n) acc += std::sqrt(double(n)) * rho(n, n - 1);
      break;
    case Observable::PairNormal:
      for (int n = 2; n < D; ++n) acc += double(n) * (n - 1) * rho(n, n).real();
      break;
  }
  return acc;
}

Eigen::MatrixXcd displacementMatrix(cplx beta, int n_max) {
  const int D = n_max + 1;
  Eigen::MatrixXcd out(D, D);
  const double x = std::norm(beta);
  const double r = std::abs(beta);
  const double ph = std::arg(beta);
  std::vector<double> lag(D);
  for (int k = 0; k < D; ++k) {
    // Generalized Laguerre L_j^{(k)}(x), j = 0..n_max-k
    const int J = D - k;
    lag[0] = 1.0;
    if (J > 1) lag[1] = 1.0 + k - x;
    for (int j = 1; j + 1 < J; ++j)
      lag[j + 1] = ((2.0 * j + 1.0 + k - x) * lag[j] - (j + k) * lag[j - 1]) / (j + 1.0);
    for (int j = 0; j < J; ++j) {
      // n = j + k >= m = j: sqrt(m!/n!) beta^k e^{-x/2} L_m^{(k)}(x)
      double mag;
      if (r == 0.0) {
        mag = (k == 0) ? lag[j] : 0.0;
      } else {
        mag = std::exp(0.5 * (logFactorial(j) - logFactorial(j + k)) + k * std::log(r) - 0.5 * x) * lag[j];
      }
      out(j + k, j) = std::polar(1.0, k * ph) * mag;
      // m > n: sqrt(n!/m!) (-beta*)^k e^{-x/2} L_n^{(k)}(x)
      if (k > 0) out(j, j + k) = std::polar(1.0, -k * ph) * ((k & 1) ? -mag : mag);
    }
  }
  return out;
}

WignerGrid wigner(const PhotonicState& s, const std::vector<double>& xs, const std::vector<double>& ps) {
  WignerGrid g;
  g.xs = xs;
  g.ps = ps;
  g.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ps.size()));
  const int nmax = s.nMax();
  const int D = nmax + 1;
  Eigen::MatrixXcd rho = s.density();
  // Fold the parity into rho: sum_{m,n} rho_mn (-1)^m <n|D(2a)|m> = Tr[R Dm] with R_mn = (-1)^m rho_mn.
  for (int m = 1; m < D; m += 2) rho.row(m) *= -1.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    for (size_t j = 0; j < ps.size(); ++j) {
      const cplx alpha = cplx(xs[i], ps[j]) / std::sqrt(2.0);
      const Eigen::MatrixXcd Dm = displacementMatrix(2.0 * alpha, nmax);
      // sum_{m,n} R(m,n) Dm(n,m)
      const cplx t = (rho.transpose().cwiseProduct(Dm)).sum();
      g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (2.0 / kPi) * t.real();
    }
  }
  return g;
}

namespace {
double axisStep(const std::vector<double>& a) {
  return a.size() > 1 ? (a.back() - a.front()) / double(a.size() - 1) : 1.0;
}
}  // namespace

double WignerGrid::integral() const { return 0.5 * values.sum() * axisStep(xs) * axisStep(ps); }

std::vector<double> WignerGrid::xMarginal() const {
  std::vector<double> out(xs.size());
  const double dp = axisStep(ps);
  for (size_t i = 0; i < xs.size(); ++i) out[i] = 0.5 * values.row(static_cast<Eigen::Index>(i)).sum() * dp;
  return out;
}

cplx targetAmplitude(const TargetState& t, int n) {
  if (n < 0) return 0.0;
  return std::visit(
      [n](const auto& v) -> cplx {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SqueezedVacuum>) {
          if (n & 1) return 0.0;
          const int k = n / 2;
          const double t = std::tanh(v.r);
          if (k == 0) return 1.0;
          if (t == 0.0) return 0.0;
          // (-tanh r)^k sqrt((2k)!) / (2^k k!)
          const double lg = k * std::log(std::fabs(t)) + 0.5 * logFactorial(2 * k) - k * std::log(2.0) - logFactorial(k);
          const double sign = (t > 0.0 && (k & 1)) ? -1.0 : 1.0;
          return sign * std::exp(lg);
        } else if constexpr (std::is_same_v<T, Cat>) {
          const cplx coh = coherentAmplitude(n, std::abs(v.alpha)) * std::polar(1.0, n * std::arg(v.alpha));
          return coh * (1.0 + std::polar(1.0, v.theta) * ((n & 1) ? -1.0 : 1.0));
        } else if constexpr (std::is_same_v<T, TriangularCat>) {
          const cplx coh = coherentAmplitude(n, std::abs(v.alpha)) * std::polar(1.0, n * std::arg(v.alpha));
          return coh * (1.0 + std::polar(1.0, n * v.theta) + std::polar(1.0, 2.0 * n * v.theta));
        } else {
          return n < static_cast<int>(v.amps.size()) ? v.amps[n] : cplx(0.0);
        }
      },
      t);
}

PhotonicState targetFactory(const TargetState& t, int n_max) {
  if (n_max < 0) throw std::invalid_argument("targetFactory: n_max < 0");
  Eigen::VectorXcd v(n_max + 1);
  double kept = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    v(n) = targetAmplitude(t, n);
    kept += std::norm(v(n));
  }
  // Mass past n_max; stop once the tail terms have been negligible for a while.
  double tail = 0.0;
  int quiet = 0;
  const int hardCap = 200000;
  for (int n = n_max + 1; n < hardCap; ++n) {
    if (const auto* c = std::get_if<CustomTarget>(&t); c && n >= static_cast<int>(c->amps.size())) break;
    const double w = std::norm(targetAmplitude(t, n));
    tail += w;
    quiet = (w < 1e-22 * (kept + tail)) ? quiet + 1 : 0;
    if (quiet > 40) break;
  }
  const double total = kept + tail;
  if (!(total > 0.0)) throw std::invalid_argument("targetFactory: target has zero norm");
  if (tail / total > 1e-8) {
    std::ostringstream os;
    os << "targetFactory: truncation n_max=" << n_max << " too small (discarded mass " << tail / total << ")";
    throw std::invalid_argument(os.str());
  }
  if (!(kept > 0.0)) throw std::invalid_argument("targetFactory: no amplitude inside truncation");
  v /= std::sqrt(kept);
  return PhotonicState::pure(std::move(v));
}

int defaultTruncation(double beta0, int n_electrons) {
  return static_cast<int>(std::ceil(10.0 * std::max(1.0, n_electrons * beta0 * beta0))) + 20;
}

double topLevelMass(const PhotonicState& s) {
  if (s.isPure()) return std::norm(s.amplitudes()(s.nMax()));
  const Eigen::MatrixXcd rho = s.density();
  return rho.row(s.nMax()).cwiseAbs().sum();
}

void requireTail(const PhotonicState& s, double tol) {
  const double m = topLevelMass(s);
  if (m > tol) {
    std::ostringstream os;
    os << "truncation too small: top Fock level carries " << m << " (> " << tol << ")";
    throw std::runtime_error(os.str());
  }
}

}  // namespace freelight
