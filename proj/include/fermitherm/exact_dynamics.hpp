#pragma once

// Exact correlation-matrix dynamics of the system mode plus a K-level
// reservoir in star geometry (system at index 0, bath modes 1..K).  The level
// energy of the system is swept stepwise: it is held constant on every
// interval [t, t + dt) and each interval is propagated exactly.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fermitherm/gaussian.hpp"
#include "fermitherm/master_equation.hpp"

namespace fermitherm::bath {

using master_eq::SweepSchedule;

struct ReservoirSpec {
  int K = 200;
  double window_lo = -7.0;
  double window_hi = 3.0;
  /// Target relaxation rate gamma = 2 pi t_amp^2 xi.
  double gamma = 0.02;

  /// Density of states K / (window width).
  double xi() const { return K / (window_hi - window_lo); }
  double t_amp() const;
  void validate() const;
};

struct Reservoir {
  std::vector<double> levels;
  double t_amp = 0.0;
};

/// Cell-centred equispaced levels eps_k = lo + width (k - 1/2) / K.
Reservoir build_reservoir(const ReservoirSpec& spec);

/// (K + 1 + spectators)-mode Hamiltonian: H_00 = eps_s, H_kk = levels,
/// H_0k = H_k0 = t_amp.  Trailing spectator modes are fully decoupled with
/// zero energy.
QuadraticHamiltonian build_full_hamiltonian(double eps_s, std::span<const double> levels, double t_amp,
                                            Index spectators = 0);

/// diag(n_s0, f(eps_1), ..., f(eps_K)).
CorrelationMatrix initial_state(const ReservoirSpec& spec, double n_s0);

struct SimulationOptions {
  bool stop_at_target = true;
  double target = 0.5;
  /// Defaults to tau + 50 / gamma.
  std::optional<double> max_time;
  /// Record per-step energies for the work-ledger audit.
  bool record_energy_audit = false;
};

/// Energies around one step k: the quench eps_old -> eps_new at t_k, then
/// evolution to t_k + dt under the new Hamiltonian.
struct StepEnergy {
  double time = 0.0;
  double eps_old = 0.0;
  double eps_new = 0.0;
  double n_s = 0.0;
  double before_quench = 0.0;
  double after_quench = 0.0;
  double end_of_step = 0.0;
};

struct BathRun {
  ReservoirSpec spec;
  SweepSchedule schedule;
  double n_s0 = 1.0;
  double dt = 0.0;

  std::vector<double> times;
  std::vector<double> n_s;
  /// E_R(t) = sum_k eps_k C_kk.
  std::vector<double> reservoir_energy;
  /// -Q(t) = E_R(t) - E_R(0).
  std::vector<double> minus_q;
  /// sigma(t) = h(n_s(t)) - h(n_s0) - Q(t).
  std::vector<double> sigma;
  std::vector<double> trace;

  std::optional<double> t_f;
  std::optional<double> minus_q_tf;
  /// State propagated to the interpolated t_f.
  std::optional<CorrelationMatrix> state_at_tf;
  /// Coupling energy 2 t_amp Re sum_k C_0k at t_f; reported, not assigned.
  double interaction_energy_tf = 0.0;
  CorrelationMatrix final_state = CorrelationMatrix::vacuum(0);
  std::size_t eigendecompositions = 0;
  std::vector<StepEnergy> energy_audit;
  std::vector<std::string> warnings;

  std::optional<double> gamma_tf() const {
    if (!t_f) return std::nullopt;
    return spec.gamma * *t_f;
  }
};

/// Runs from initial_state(spec, n_s0).
BathRun simulate(const ReservoirSpec& spec, const SweepSchedule& schedule, double n_s0, double dt,
                 const SimulationOptions& options = {});

/// Runs from an arbitrary initial state whose first K + 1 modes are
/// system + bath; any further modes are inert spectators.
BathRun simulate_state(const ReservoirSpec& spec, const SweepSchedule& schedule, const CorrelationMatrix& initial,
                       double dt, const SimulationOptions& options = {});

struct DeviationReport {
  double max_population_deviation = 0.0;
  double mean_population_deviation = 0.0;
  double heat_deviation = 0.0;
  double exact_minus_q = 0.0;
  double master_minus_q = 0.0;
  std::size_t samples = 0;
  /// Master-equation populations and -Q on the bath-run grid.
  std::vector<double> master_n;
  std::vector<double> master_minus_q_series;
};

/// Integrates the rate equation on a grid commensurate with the bath run and
/// compares populations over [0, t_f] and the heat at t_f.
DeviationReport compare_with_master_equation(const BathRun& run, double gamma);

}  // namespace fermitherm::bath
