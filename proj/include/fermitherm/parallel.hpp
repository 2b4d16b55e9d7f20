#pragma once

// OpenMP versions of the embarrassingly parallel drivers.  Each has a serial
// reference in its home module; results are identical element for element
// and always returned in input order.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fermitherm/ensemble.hpp"
#include "fermitherm/exact_dynamics.hpp"
#include "fermitherm/master_equation.hpp"

namespace fermitherm::parallel {

int max_threads();

/// Parallel master_eq::sweep_heat_curve.  Per-point engine errors are
/// rethrown after the loop (first failing point in input order).
std::vector<master_eq::HeatPoint> sweep_heat_curve(double eps1, double eps2, double gamma,
                                                   std::span<const double> gamma_taus, double n0 = 1.0);

struct PointOutcome {
  std::optional<master_eq::HeatPoint> point;
  std::string error;
};

/// Like sweep_heat_curve but records per-point failures instead of throwing.
std::vector<PointOutcome> sweep_heat_curve_outcomes(double eps1, double eps2, double gamma,
                                                    std::span<const double> gamma_taus, double n0 = 1.0);

/// Parallel ensemble::evaluate_sequences_serial.
std::vector<ensemble::SequenceResult> evaluate_sequences(std::span<const ensemble::SequenceCase> cases);

struct BathJob {
  bath::ReservoirSpec spec;
  bath::SweepSchedule schedule;
  double n_s0 = 1.0;
  double dt = 3.0;
  bath::SimulationOptions options;
};

std::vector<bath::BathRun> simulate_batch_serial(std::span<const BathJob> jobs);
std::vector<bath::BathRun> simulate_batch(std::span<const BathJob> jobs);

}  // namespace fermitherm::parallel
