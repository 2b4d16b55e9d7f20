#pragma once

// Number-conserving fermionic Gaussian states.
//
// A state on N modes is the correlation matrix C_ij = <c_i^dag c_j>.  Units:
// k_B T = 1, hbar = 1, mu = 0, so energies are in k_B T, times in 1/k_B T and
// entropies in nats.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fermitherm/errors.hpp"

namespace fermitherm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kSpectrumTol = 1e-10;

/// Single-particle Hamiltonian matrix.  Diagonal entries are mode energies,
/// off-diagonal entries tunnel amplitudes.  The many-body operator it stands
/// for is sum_ab conj(H_ab) c_a^dag c_b, so that <H> = Tr(H C) and the
/// Heisenberg evolution of C is e^{iHt} C e^{-iHt}.  For real H (every
/// Hamiltonian built in this project) this is the usual sum_ab H_ab c_a^dag c_b.
class QuadraticHamiltonian {
 public:
  /// Throws ValidationError unless `m` is square and Hermitian to kHermitianTol.
  static QuadraticHamiltonian from_matrix(ComplexMatrix m);
  static QuadraticHamiltonian diagonal(std::span<const double> energies);
  /// Two modes (memory, system) with a tunnel term omega (c_M^dag c_S + h.c.).
  static QuadraticHamiltonian two_mode(double eps_m, double eps_s, double omega);
  static QuadraticHamiltonian zero(Index dim);

  Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  explicit QuadraticHamiltonian(ComplexMatrix m) : matrix_(std::move(m)) {}
  ComplexMatrix matrix_;
};

class Propagator;

/// Correlation matrix of a number-conserving Gaussian state.
///
/// Invariants: Hermitian to kHermitianTol, eigenvalues in [0, 1] to
/// kSpectrumTol.  Instances are immutable values.
class CorrelationMatrix {
 public:
  /// Checked construction.  Throws ValidationError on a non-square,
  /// non-Hermitian or out-of-spectrum matrix.
  static CorrelationMatrix from_matrix(ComplexMatrix m);
  static CorrelationMatrix diagonal(std::span<const double> occupations);
  static CorrelationMatrix vacuum(Index dim);

  Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  Complex operator()(Index i, Index j) const { return matrix_(i, j); }
  double occupation(Index i) const { return matrix_(i, i).real(); }
  /// Total particle number.
  double trace() const { return matrix_.trace().real(); }
  /// Ascending eigenvalues of C.
  Eigen::VectorXd spectrum() const;
  /// Principal sub-block on `modes`, in the given order.
  CorrelationMatrix restrict_to(std::span<const Index> modes) const;

 private:
  friend class Propagator;
  struct Unchecked {};
  CorrelationMatrix(ComplexMatrix m, Unchecked) : matrix_(std::move(m)) {}
  ComplexMatrix matrix_;
};

/// Exact single-step propagator U = e^{i dt H} built from the
/// eigendecomposition of H.  Applying it maps C to U C U^dag and
/// re-symmetrises the result.  Reusable for any number of steps with the
/// same (H, dt).
class Propagator {
 public:
  Propagator(const QuadraticHamiltonian& h, double dt);

  Index dim() const { return unitary_.rows(); }
  const ComplexMatrix& unitary() const { return unitary_; }
  CorrelationMatrix apply(const CorrelationMatrix& c) const;

 private:
  ComplexMatrix unitary_;
};

/// C(t + dt) = e^{i dt H} C(t) e^{-i dt H}.
CorrelationMatrix evolve_step(const CorrelationMatrix& c, const QuadraticHamiltonian& h, double dt);

/// h(x) = -x ln x - (1-x) ln(1-x).  Inputs within 1e-12 outside [0, 1] are
/// clamped, anything further out throws ValidationError.
double binary_entropy(double x);

/// Von Neumann entropy of the reduced state on `modes`: sum_k h(nu_k) over
/// the eigenvalues nu_k of the sub-block.  Eigenvalues are clamped to [0, 1]
/// for the evaluation only.
double subsystem_entropy(const CorrelationMatrix& c, std::span<const Index> modes);

/// Entropy of the whole state.
double total_entropy(const CorrelationMatrix& c);

/// I_{S>M} = S_M - S_total; `memory_modes` must be a proper nonempty subset.
double coherent_information(const CorrelationMatrix& c, std::span<const Index> memory_modes);

/// Fermi function 1 / (1 + e^eps) at beta = 1, mu = 0.  Never overflows.
double fermi_occupation(double eps);

/// Tr(H C).  Throws EngineError if the imaginary residue is not negligible.
double energy_expectation(const CorrelationMatrix& c, const QuadraticHamiltonian& h);

/// diag(f(eps_1), ..., f(eps_K)).
CorrelationMatrix thermal_correlation(std::span<const double> levels);

/// Largest |C - C^dag| element; used by invariant checks.
double hermiticity_defect(const ComplexMatrix& m);

}  // namespace fermitherm
