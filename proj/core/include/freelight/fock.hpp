#pragma once

#include <Eigen/Dense>

#include <complex>
#include <variant>
#include <vector>

namespace freelight {

using cplx = std::complex<double>;

// Truncated single-mode state on |0>..|n_max>. Construction validates the
// invariants and throws std::domain_error on violation.
class PhotonicState {
 public:
  static PhotonicState pure(Eigen::VectorXcd amps);
  static PhotonicState mixed(Eigen::MatrixXcd rho);
  static PhotonicState vacuum(int n_max);
  static PhotonicState fock(int n, int n_max);
  static PhotonicState coherent(cplx alpha, int n_max);

  bool isPure() const { return std::holds_alternative<Eigen::VectorXcd>(data_); }
  int nMax() const;
  int dim() const { return nMax() + 1; }
  const Eigen::VectorXcd& amplitudes() const;  // throws for mixed
  Eigen::MatrixXcd density() const;
  PhotonicState asMixed() const { return mixed(density()); }

  static constexpr double kHermTol = 1e-12;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPsdTol = 1e-9;
  static constexpr double kPureNormTol = 1e-10;

 private:
  explicit PhotonicState(std::variant<Eigen::VectorXcd, Eigen::MatrixXcd> d) : data_(std::move(d)) {}
  std::variant<Eigen::VectorXcd, Eigen::MatrixXcd> data_;
};

struct DensityCheck {
  double herm_err = 0.0;
  double trace_err = 0.0;
  double min_eig = 0.0;
  bool ok() const {
    return herm_err <= PhotonicState::kHermTol && trace_err <= PhotonicState::kTraceTol &&
           min_eig >= -PhotonicState::kPsdTol;
  }
};
DensityCheck checkDensity(const Eigen::MatrixXcd& rho);

// <n|beta0> for real beta0 >= 0, via log-gamma.
double coherentAmplitude(int n, double beta0);

double purity(const PhotonicState& s);

// |<a|b>|^2 for two pure states; <psi|rho|psi> when exactly one is mixed.
double fidelity(const PhotonicState& a, const PhotonicState& b);

double traceDistance(const PhotonicState& a, const PhotonicState& b);

enum class Observable { Number, NumberSquared, Annihilation, PairNormal };
cplx expectation(const PhotonicState& s, Observable op);

struct WignerGrid {
  std::vector<double> xs, ps;
  Eigen::MatrixXd values;  // values(i, j) = W(xs[i], ps[j])
  // sum W dx dp / 2, which approximates the trace on a grid that covers the state.
  double integral() const;
  // P(x_i) = (1/2) int W dp
  std::vector<double> xMarginal() const;
};

// W(alpha) = (2/pi) Tr[rho D(alpha) Pi D^dag(alpha)], alpha = (x + i p) / sqrt 2.
WignerGrid wigner(const PhotonicState& s, const std::vector<double>& xs, const std::vector<double>& ps);

// <n|D(beta)|m> for 0 <= n, m <= n_max.
Eigen::MatrixXcd displacementMatrix(cplx beta, int n_max);

struct SqueezedVacuum { double r = 0.0; };
struct Cat { cplx alpha = 0.0; double theta = 0.0; };
struct TriangularCat { cplx alpha = 0.0; double theta = 0.0; };
struct CustomTarget { std::vector<cplx> amps; };
using TargetState = std::variant<SqueezedVacuum, Cat, TriangularCat, CustomTarget>;

// Unnormalized target amplitude for photon number n.
cplx targetAmplitude(const TargetState& t, int n);

// Normalized on [0, n_max]; throws if the discarded mass exceeds 1e-8.
PhotonicState targetFactory(const TargetState& t, int n_max);

// ceil(10 max(1, N beta0^2)) + 20.
int defaultTruncation(double beta0, int n_electrons = 1);

// Population of the top Fock level; callers compare against 1e-8.
double topLevelMass(const PhotonicState& s);
void requireTail(const PhotonicState& s, double tol = 1e-8);

}  // namespace freelight
