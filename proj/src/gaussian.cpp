#include "fermitherm/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace fermitherm {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw ValidationError(std::string(what) + ": matrix is not square (" + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ")");
  }
}

void require_hermitian(const ComplexMatrix& m, const char* what) {
  const double defect = hermiticity_defect(m);
  if (!(defect <= kHermitianTol)) {
    throw ValidationError(std::string(what) + ": matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  }
}

double xlogx(double x) { return x <= 1e-300 ? 0.0 : x * std::log(x); }

// Eigenvalues and orthonormal eigenvectors of a real symmetric matrix; `a`
// is overwritten by the eigenvectors.
void symmetric_eigen(Eigen::MatrixXd& a, Eigen::VectorXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw EngineError("Propagator: eigendecomposition failed");
  w = es.eigenvalues();
  a = es.eigenvectors();
}

}  // namespace

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// QuadraticHamiltonian

QuadraticHamiltonian QuadraticHamiltonian::from_matrix(ComplexMatrix m) {
  require_square(m, "QuadraticHamiltonian");
  require_hermitian(m, "QuadraticHamiltonian");
  return QuadraticHamiltonian(std::move(m));
}

QuadraticHamiltonian QuadraticHamiltonian::diagonal(std::span<const double> energies) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(energies.size()), static_cast<Index>(energies.size()));
  for (std::size_t i = 0; i < energies.size(); ++i) m(static_cast<Index>(i), static_cast<Index>(i)) = energies[i];
  return QuadraticHamiltonian(std::move(m));
}

QuadraticHamiltonian QuadraticHamiltonian::two_mode(double eps_m, double eps_s, double omega) {
  ComplexMatrix m(2, 2);
  m << eps_m, omega, omega, eps_s;
  return QuadraticHamiltonian(std::move(m));
}

QuadraticHamiltonian QuadraticHamiltonian::zero(Index dim) { return QuadraticHamiltonian(ComplexMatrix::Zero(dim, dim)); }

// ---------------------------------------------------------------------------
// CorrelationMatrix

CorrelationMatrix CorrelationMatrix::from_matrix(ComplexMatrix m) {
  require_square(m, "CorrelationMatrix");
  require_hermitian(m, "CorrelationMatrix");
  if (m.rows() > 0) {
    const ComplexMatrix sym = 0.5 * (m + m.adjoint());
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(sym, Eigen::EigenvaluesOnly).eigenvalues();
    if (ev.minCoeff() < -kSpectrumTol || ev.maxCoeff() > 1.0 + kSpectrumTol) {
      throw ValidationError("CorrelationMatrix: eigenvalues outside [0, 1] (min " + std::to_string(ev.minCoeff()) +
                            ", max " + std::to_string(ev.maxCoeff()) + ")");
    }
  }
  return CorrelationMatrix(std::move(m), Unchecked{});
}

CorrelationMatrix CorrelationMatrix::diagonal(std::span<const double> occupations) {
  const auto n = static_cast<Index>(occupations.size());
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const double x = occupations[static_cast<std::size_t>(i)];
    if (!(x >= -kSpectrumTol && x <= 1.0 + kSpectrumTol)) {
      throw ValidationError("CorrelationMatrix: occupation " + std::to_string(x) + " outside [0, 1]");
    }
    m(i, i) = x;
  }
  return CorrelationMatrix(std::move(m), Unchecked{});
}

CorrelationMatrix CorrelationMatrix::vacuum(Index dim) {
  return CorrelationMatrix(ComplexMatrix::Zero(dim, dim), Unchecked{});
}

Eigen::VectorXd CorrelationMatrix::spectrum() const {
  if (dim() == 0) return {};
  return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(matrix_, Eigen::EigenvaluesOnly).eigenvalues();
}

CorrelationMatrix CorrelationMatrix::restrict_to(std::span<const Index> modes) const {
  const auto n = static_cast<Index>(modes.size());
  ComplexMatrix sub(n, n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) sub(a, b) = matrix_(modes[static_cast<std::size_t>(a)], modes[static_cast<std::size_t>(b)]);
  }
  // A principal sub-block of a valid C is itself valid (eigenvalue interlacing).
  return CorrelationMatrix(std::move(sub), Unchecked{});
}

// ---------------------------------------------------------------------------
// Propagator

Propagator::Propagator(const QuadraticHamiltonian& h, double dt) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw ValidationError("Propagator: dt must be finite and >= 0");
  const Index n = h.dim();
  if (n == 0) {
    unitary_.resize(0, 0);
    return;
  }
  // Real symmetric H: the real solver is several times faster and gives the
  // same unitary.
  if (h.matrix().imag().isZero(0.0)) {
    Eigen::MatrixXd v = h.matrix().real();
    Eigen::VectorXd w;
    symmetric_eigen(v, w);
    const Eigen::ArrayXd theta = dt * w.array();
    const Eigen::MatrixXd re = v * theta.cos().matrix().asDiagonal() * v.transpose();
    const Eigen::MatrixXd im = v * theta.sin().matrix().asDiagonal() * v.transpose();
    unitary_.resize(n, n);
    unitary_.real() = re;
    unitary_.imag() = im;
    return;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix());
  if (es.info() != Eigen::Success) throw EngineError("Propagator: eigendecomposition failed");
  const Eigen::VectorXcd phases = (Complex(0.0, dt) * es.eigenvalues().cast<Complex>()).array().exp();
  unitary_ = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

CorrelationMatrix Propagator::apply(const CorrelationMatrix& c) const {
  if (c.dim() != dim()) {
    throw ValidationError("evolve: dimension mismatch (C is " + std::to_string(c.dim()) + ", H is " +
                          std::to_string(dim()) + ")");
  }
  ComplexMatrix next = unitary_ * c.matrix() * unitary_.adjoint();
  ComplexMatrix sym = 0.5 * (next + next.adjoint());
  return CorrelationMatrix(std::move(sym), CorrelationMatrix::Unchecked{});
}

CorrelationMatrix evolve_step(const CorrelationMatrix& c, const QuadraticHamiltonian& h, double dt) {
  if (c.dim() != h.dim()) {
    throw ValidationError("evolve_step: dimension mismatch (C is " + std::to_string(c.dim()) + ", H is " +
                          std::to_string(h.dim()) + ")");
  }
  if (dt == 0.0) return c;
  return Propagator(h, dt).apply(c);
}

// ---------------------------------------------------------------------------
// Functionals

double binary_entropy(double x) {
  if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) {
    throw ValidationError("binary_entropy: argument " + std::to_string(x) + " outside [0, 1]");
  }
  x = std::clamp(x, 0.0, 1.0);
  return -xlogx(x) - xlogx(1.0 - x);
}

double subsystem_entropy(const CorrelationMatrix& c, std::span<const Index> modes) {
  if (modes.empty()) throw ValidationError("subsystem_entropy: empty mode subset");
  std::vector<bool> seen(static_cast<std::size_t>(c.dim()), false);
  for (Index m : modes) {
    if (m < 0 || m >= c.dim()) {
      throw ValidationError("subsystem_entropy: mode " + std::to_string(m) + " out of range [0, " +
                            std::to_string(c.dim()) + ")");
    }
    if (seen[static_cast<std::size_t>(m)]) throw ValidationError("subsystem_entropy: repeated mode " + std::to_string(m));
    seen[static_cast<std::size_t>(m)] = true;
  }
  const Eigen::VectorXd nu = c.restrict_to(modes).spectrum();
  double s = 0.0;
  for (Index k = 0; k < nu.size(); ++k) s += binary_entropy(std::clamp(nu(k), 0.0, 1.0));
  return s;
}

double total_entropy(const CorrelationMatrix& c) {
  if (c.dim() == 0) return 0.0;
  std::vector<Index> all(static_cast<std::size_t>(c.dim()));
  for (Index i = 0; i < c.dim(); ++i) all[static_cast<std::size_t>(i)] = i;
  return subsystem_entropy(c, all);
}

double coherent_information(const CorrelationMatrix& c, std::span<const Index> memory_modes) {
  if (memory_modes.empty() || static_cast<Index>(memory_modes.size()) >= c.dim()) {
    throw ValidationError("coherent_information: memory modes must be a proper nonempty subset");
  }
  return subsystem_entropy(c, memory_modes) - total_entropy(c);
}

double fermi_occupation(double eps) {
  if (std::isnan(eps)) throw ValidationError("fermi_occupation: eps is NaN");
  if (eps > 0.0) {
    const double e = std::exp(-eps);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(eps));
}

double energy_expectation(const CorrelationMatrix& c, const QuadraticHamiltonian& h) {
  if (c.dim() != h.dim()) throw ValidationError("energy_expectation: dimension mismatch");
  if (c.dim() == 0) return 0.0;
  const Complex e = (h.matrix().transpose().cwiseProduct(c.matrix())).sum();
  const double scale = 1.0 + h.matrix().norm() * c.matrix().norm();
  if (std::abs(e.imag()) > 1e-10 * scale) {
    throw EngineError("energy_expectation: imaginary residue " + std::to_string(e.imag()));
  }
  return e.real();
}

CorrelationMatrix thermal_correlation(std::span<const double> levels) {
  std::vector<double> occ(levels.size());
  std::transform(levels.begin(), levels.end(), occ.begin(), fermi_occupation);
  return CorrelationMatrix::diagonal(occ);
}

}  // namespace fermitherm
