#pragma once

// Randomised protocol ensembles over separable (diagonal) two-mode inputs.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fermitherm/protocol.hpp"

namespace fermitherm::ensemble {

struct SequenceCase {
  CorrelationMatrix initial = CorrelationMatrix::vacuum(2);
  std::vector<protocol::Operation> ops;
};

struct SequenceResult {
  double minus_q = 0.0;
  double witness = 0.0;
  double min_sigma = 0.0;
  bool system_purified = false;
  bool memory_restored = false;
};

/// `count` diagonal initial states diag(n_M, n_S) with uniform occupations,
/// each followed by 0-4 random operations.  With `close` set, the
/// purification closure is appended so every case ends with S pure and its
/// memory marginal restored.
std::vector<SequenceCase> separable_cases(std::size_t count, std::uint64_t seed, bool close);

SequenceResult evaluate_case(const SequenceCase& c);

/// Random valid correlation matrix V diag(nu) V^dag with Haar-like V
/// (QR of a complex Gaussian matrix) and nu uniform in [0, 1].
CorrelationMatrix random_correlation(Index dim, std::mt19937_64& rng);
/// Random pure Gaussian state with `particles` occupied orbitals.
CorrelationMatrix random_pure_state(Index dim, Index particles, std::mt19937_64& rng);
/// Random complex Hermitian matrix with entries of order `scale`.
QuadraticHamiltonian random_hamiltonian(Index dim, std::mt19937_64& rng, double scale = 1.0);

/// Serial reference for parallel::evaluate_sequences.
std::vector<SequenceResult> evaluate_sequences_serial(std::span<const SequenceCase> cases);

}  // namespace fermitherm::ensemble
