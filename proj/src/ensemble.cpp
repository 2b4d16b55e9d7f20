#include "fermitherm/ensemble.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <random>

namespace fermitherm::ensemble {

std::vector<SequenceCase> separable_cases(std::size_t count, std::uint64_t seed, bool close) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> length(0, 4);
  std::uniform_int_distribution<int> kind(0, 3);

  std::vector<SequenceCase> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::array<double, 2> occ{unit(rng), unit(rng)};
    SequenceCase c{CorrelationMatrix::diagonal(occ), {}};
    const int n = length(rng);
    for (int k = 0; k < n; ++k) {
      switch (kind(rng)) {
        case 0:
          c.ops.emplace_back(protocol::Rotate{std::numbers::pi * unit(rng)});
          break;
        case 1:
          c.ops.emplace_back(protocol::Thermalize{unit(rng)});
          break;
        case 2:
          c.ops.emplace_back(protocol::Swap{});
          break;
        default:
          c.ops.emplace_back(protocol::Erase{});
          break;
      }
    }
    if (close) {
      for (auto& op : protocol::closure_operations(occ[0])) c.ops.push_back(op);
    }
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

ComplexMatrix random_unitary(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix a(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  return qr.householderQ() * ComplexMatrix::Identity(dim, dim);
}

CorrelationMatrix with_spectrum(const ComplexMatrix& v, const Eigen::VectorXd& nu) {
  ComplexMatrix c = v * nu.cast<Complex>().asDiagonal() * v.adjoint();
  c = 0.5 * (c + c.adjoint()).eval();
  return CorrelationMatrix::from_matrix(std::move(c));
}

}  // namespace

CorrelationMatrix random_correlation(Index dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd nu(dim);
  for (Index i = 0; i < dim; ++i) nu(i) = unit(rng);
  return with_spectrum(random_unitary(dim, rng), nu);
}

CorrelationMatrix random_pure_state(Index dim, Index particles, std::mt19937_64& rng) {
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(dim);
  for (Index i = 0; i < std::min(particles, dim); ++i) nu(i) = 1.0;
  return with_spectrum(random_unitary(dim, rng), nu);
}

QuadraticHamiltonian random_hamiltonian(Index dim, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  ComplexMatrix h(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    h(i, i) = g(rng);
    for (Index j = i + 1; j < dim; ++j) {
      h(i, j) = Complex(g(rng), g(rng));
      h(j, i) = std::conj(h(i, j));
    }
  }
  return QuadraticHamiltonian::from_matrix(std::move(h));
}

SequenceResult evaluate_case(const SequenceCase& c) {
  const auto ledger = protocol::run_sequence(c.initial, c.ops);
  return {ledger.minus_q(), protocol::witness_value(ledger), ledger.min_sigma(), ledger.system_purified,
          ledger.memory_restored};
}

std::vector<SequenceResult> evaluate_sequences_serial(std::span<const SequenceCase> cases) {
  std::vector<SequenceResult> out;
  out.reserve(cases.size());
  for (const auto& c : cases) out.push_back(evaluate_case(c));
  return out;
}

}  // namespace fermitherm::ensemble
