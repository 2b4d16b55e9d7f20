#pragma once

// Memory-assisted purification of a fermionic system mode S with the help of
// a memory mode M.  Two-mode states use the ordering (M, S): index 0 is the
// memory, index 1 the system.  Heat Q is counted positive when it flows into
// the system; -Q is the reservoir energy change.

#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fermitherm/exact_dynamics.hpp"
#include "fermitherm/gaussian.hpp"
#include "fermitherm/master_equation.hpp"

namespace fermitherm::protocol {

inline constexpr Index kMemory = 0;
inline constexpr Index kSystem = 1;

enum class Engine { quasistatic, master_equation, exact_bath };

std::string_view to_string(Engine engine);
/// Accepts "quasistatic", "master-equation" and "exact-bath".
Engine parse_engine(std::string_view name);

struct LedgerRecord {
  std::string step;
  double n_m = 0.0;
  double n_s = 0.0;
  double s_m = 0.0;
  double s_s = 0.0;
  double s_ms = 0.0;
  double energy = 0.0;
  /// Cumulative heat into the system.
  double heat = 0.0;
  /// Cumulative work, dE - Q.
  double work = 0.0;
  /// Cumulative entropy production dS_MS - Q.
  double sigma = 0.0;
};

struct ThermoLedger {
  std::vector<LedgerRecord> records;
  Engine engine = Engine::quasistatic;
  double coherent_information = 0.0;
  bool system_purified = false;
  bool memory_restored = false;
  /// Exact-bath engine only: system-reservoir coupling energy at t_f.
  double interaction_residual = 0.0;
  std::optional<double> gamma_tf;
  double step1_angle = 0.0;
  CorrelationMatrix final_state = CorrelationMatrix::vacuum(2);

  const LedgerRecord& initial() const { return records.front(); }
  const LedgerRecord& final() const { return records.back(); }
  double total_heat() const { return final().heat; }
  double minus_q() const { return -final().heat; }
  double min_sigma() const;
};

struct ProtocolConfig {
  /// Overrides (p, phi) when set.
  std::optional<CorrelationMatrix> initial_state;
  double p = 0.5;
  double phi = std::numbers::pi / 2;
  double omega = 1.0;
  /// Omega * t for step 1.  Defaults to the angle that empties the memory.
  std::optional<double> step1_angle;
  Engine engine = Engine::quasistatic;
  /// Master-equation and exact-bath engines.
  master_eq::SweepSchedule schedule{-5.0, 1.0, 500.0};
  double gamma = 0.02;
  /// Rate-equation step or bath step; defaults to the module defaults
  /// (default_step, and gamma * dt = 0.06 for the bath).
  std::optional<double> dt;
  /// Exact-bath engine; its gamma is overwritten by `gamma`.
  bath::ReservoirSpec reservoir;
  /// Append a quasistatic erasure of S when it is not pure after the swap.
  bool enforce_endpoint = false;

  void validate() const;
};

/// sqrt(p)|1_M 0_S> + e^{-i phi} sqrt(1-p)|0_M 1_S>, i.e.
/// C = [[p, sqrt(p(1-p)) e^{-i phi}], [c.c., 1-p]].
CorrelationMatrix prepare_one_body_state(double p, double phi);

/// Rotation angle Omega t in [0, pi) minimising the memory population after
/// the tunnel rotation.
double memory_emptying_angle(const CorrelationMatrix& c);

/// Tunnel rotation with H = omega (c_M^dag c_S + h.c.), eps_M = eps_S = 0, for
/// time angle / omega.
CorrelationMatrix step1_rotate(const CorrelationMatrix& c, double omega, double angle = std::numbers::pi / 4);

struct QuasistaticResult {
  double heat = 0.0;
  double n_final = 0.0;
};

/// Reversible thermalisation from population n0 to target: Q = h(target) - h(n0).
QuasistaticResult step2_quasistatic(double n0 = 1.0, double target = 0.5);

/// Half-period tunnel rotation (time pi / (2 omega)): exchanges M and S.
CorrelationMatrix step3_swap(const CorrelationMatrix& c, double omega);

ThermoLedger run_purification(const ProtocolConfig& config);

/// h(n_S1) + h(n_M1) - max[h(n_S0), h(n_M0)] - beta Q.  Negative values
/// certify initial entanglement.
double witness_value(double n_s0, double n_m0, double n_s1, double n_m1, double beta_q);
double witness_value(const ThermoLedger& ledger);

struct CoolingBoundReport {
  bool passed = true;
  double minus_q = 0.0;
  double min_sigma = 0.0;
  std::vector<std::string> violations;
};

/// -Q >= -1e-9 when initially separable; sigma >= -1e-6 always.
CoolingBoundReport cooling_bound_check(const ThermoLedger& ledger, bool initially_separable);

// ---------------------------------------------------------------------------
// Elementary operations, used to compose arbitrary protocol sequences.

struct Rotate {
  double angle = std::numbers::pi / 4;
};
/// Quasistatic thermalisation of S to `target` (removes M-S coherence).
struct Thermalize {
  double target = 0.5;
};
struct Swap {};
/// Quasistatic Landauer erasure of S to the empty state.
struct Erase {};

using Operation = std::variant<Rotate, Thermalize, Swap, Erase>;

std::string describe(const Operation& op);

struct StepOutcome {
  CorrelationMatrix state;
  double heat = 0.0;
};

StepOutcome quasistatic_thermalize(const CorrelationMatrix& c, double target);
StepOutcome apply_operation(const CorrelationMatrix& c, const Operation& op);

/// Ledger of a quasistatic operation sequence on a two-mode state.
ThermoLedger run_sequence(const CorrelationMatrix& initial, std::span<const Operation> ops);

/// Thermalize S to the initial memory population, swap, erase S.  Appended
/// to any prefix this completes a purification: memory marginal restored,
/// system pure.
std::vector<Operation> closure_operations(double initial_memory_population);

}  // namespace fermitherm::protocol
