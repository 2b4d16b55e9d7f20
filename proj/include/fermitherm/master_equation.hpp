#pragma once

// Rate-equation model of the system mode coupled weakly to a thermal
// reservoir:  dn/dt = -gamma [n - f(eps(t))].

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fermitherm::master_eq {

/// Level energy eps(t): linear ramp from eps1 to eps2 over [0, tau], then
/// held at eps2.  tau == 0 is an instant quench (eps2 for all t >= 0) and
/// eps1 == eps2 a constant level.
struct SweepSchedule {
  double eps1 = -5.0;
  double eps2 = 1.0;
  double tau = 500.0;

  double energy(double t) const;
  /// Throws ValidationError on a malformed schedule.
  void validate() const;

  static SweepSchedule hold(double eps) { return {eps, eps, 0.0}; }
};

struct PopulationTrajectory {
  std::vector<double> times;
  std::vector<double> populations;
  std::vector<double> energies;
  /// dn/dt evaluated from the right-hand side at each sample.
  std::vector<double> rates;
  double dt = 0.0;
  double gamma = 0.0;

  std::size_t size() const { return times.size(); }
};

struct IntegrationOptions {
  /// Stop after the first sample with n <= target.
  bool stop_at_target = true;
  double target = 0.5;
  /// Defaults to tau + 50 / gamma.
  std::optional<double> max_time;
};

/// Step size used when none is given: the sweep end lands on a grid point and
/// dt <= min(0.01 / gamma, tau / 1000).
double default_step(const SweepSchedule& schedule, double gamma);

/// Classical RK4 integration with fixed step dt.  Throws ValidationError on
/// bad input (gamma < 0, n0 outside [0, 1], dt > 0.01 / gamma) and
/// EngineError("no-crossing ...") when stop_at_target is set and the target
/// is not reached before max_time.  Populations are clamped to [0, 1] on
/// output only.
PopulationTrajectory integrate_population(const SweepSchedule& schedule, double gamma, double n0, double dt,
                                          const IntegrationOptions& options = {});

/// Linear interpolation of the first downward crossing of `level`.  Zero if
/// the trajectory starts at or below it.
double find_crossing_time(const PopulationTrajectory& traj, double level = 0.5);
double find_half_population_time(const PopulationTrajectory& traj);

/// -Q = -int_0^{t_f} eps(t) dn/dt dt (trapezoid, rates from the ODE), with
/// the last partial step interpolated to t_f.
double heat_dissipated(const PopulationTrajectory& traj, double level = 0.5);

/// Running -Q(t) at every sample (no truncation at a crossing).
std::vector<double> cumulative_heat(const PopulationTrajectory& traj);

/// Rate-equation entropy production h(n(t_f)) - h(n0) - Q, with Q = -(-Q).
double entropy_production(double n0, double n_final, double minus_q);

struct HeatPoint {
  double gamma_tau = 0.0;
  double minus_q = 0.0;
  double gamma_tf = 0.0;
};

/// One heat-curve point: tau = gamma_tau / gamma, default step.
HeatPoint heat_point(double eps1, double eps2, double gamma, double gamma_tau, double n0 = 1.0);

/// Serial reference sweep over gamma_tau values (input order preserved).
std::vector<HeatPoint> sweep_heat_curve(double eps1, double eps2, double gamma, std::span<const double> gamma_taus,
                                        double n0 = 1.0);

/// First sign change of minus_q (positive -> non-positive), linearly
/// interpolated in gamma_tau.
std::optional<double> zero_crossing(std::span<const HeatPoint> curve);

/// Reversible heat Q = ln 2 - h(f(eps1)) absorbed when a level starting in
/// equilibrium at eps1 is raised until its population is 1/2.  The matching
/// -Q target of a slow sweep is the negative.
double quasistatic_limit(double eps1);

}  // namespace fermitherm::master_eq
