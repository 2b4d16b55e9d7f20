#include "fermitherm/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fermitherm/errors.hpp"
#include "fermitherm/gaussian.hpp"

namespace fermitherm::master_eq {

double SweepSchedule::energy(double t) const {
  if (tau <= 0.0 || t >= tau) return eps2;
  return eps1 + (eps2 - eps1) * (t / tau);
}

void SweepSchedule::validate() const {
  if (!std::isfinite(eps1) || !std::isfinite(eps2) || !std::isfinite(tau)) {
    throw ValidationError("SweepSchedule: non-finite parameter");
  }
  if (tau < 0.0) throw ValidationError("SweepSchedule: tau must be >= 0");
  if (eps1 > eps2) throw ValidationError("SweepSchedule: eps1 must not exceed eps2");
  if (tau > 0.0 && eps1 == eps2) throw ValidationError("SweepSchedule: a sweep needs eps1 < eps2");
}

double default_step(const SweepSchedule& schedule, double gamma) {
  double dt = gamma > 0.0 ? 0.01 / gamma : 0.01;
  if (schedule.tau > 0.0) {
    dt = std::min(dt, schedule.tau / 1000.0);
    dt = schedule.tau / std::ceil(schedule.tau / dt);
  }
  return dt;
}

PopulationTrajectory integrate_population(const SweepSchedule& schedule, double gamma, double n0, double dt,
                                          const IntegrationOptions& options) {
  schedule.validate();
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("integrate_population: gamma must be >= 0");
  if (!(n0 >= 0.0 && n0 <= 1.0)) throw ValidationError("integrate_population: n0 outside [0, 1]");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("integrate_population: dt must be > 0");
  if (gamma > 0.0 && dt > 0.01 / gamma * (1.0 + 1e-12)) {
    throw ValidationError("integrate_population: dt = " + std::to_string(dt) + " exceeds resolution guard 0.01/gamma = " +
                          std::to_string(0.01 / gamma));
  }
  const double t_max =
      options.max_time.value_or(schedule.tau + (gamma > 0.0 ? 50.0 / gamma : std::max(dt, schedule.tau)));

  auto rhs = [&](double t, double n) { return -gamma * (n - fermi_occupation(schedule.energy(t))); };

  PopulationTrajectory traj;
  traj.dt = dt;
  traj.gamma = gamma;
  auto record = [&](double t, double n) {
    traj.times.push_back(t);
    traj.populations.push_back(std::clamp(n, 0.0, 1.0));
    traj.energies.push_back(schedule.energy(t));
    traj.rates.push_back(rhs(t, n));
  };

  double n = n0;
  record(0.0, n);
  if (options.stop_at_target && n <= options.target) return traj;

  const auto max_steps = static_cast<long long>(std::ceil(t_max / dt - 1e-9));
  for (long long k = 0; k < max_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double k1 = rhs(t, n);
    const double k2 = rhs(t + 0.5 * dt, n + 0.5 * dt * k1);
    const double k3 = rhs(t + 0.5 * dt, n + 0.5 * dt * k2);
    const double k4 = rhs(t + dt, n + dt * k3);
    n += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    record(static_cast<double>(k + 1) * dt, n);
    if (options.stop_at_target && n <= options.target) return traj;
  }
  if (options.stop_at_target) {
    throw EngineError("no-crossing: population " + std::to_string(n) + " never reached " +
                      std::to_string(options.target) + " before t = " + std::to_string(t_max));
  }
  return traj;
}

namespace {

// Index j of the first sample with n <= level; 0 when the start is already there.
std::size_t crossing_index(const PopulationTrajectory& traj, double level) {
  if (traj.size() == 0) throw ValidationError("empty trajectory");
  for (std::size_t j = 0; j < traj.size(); ++j) {
    if (traj.populations[j] <= level) return j;
  }
  throw EngineError("no-crossing: trajectory never reaches " + std::to_string(level));
}

double crossing_fraction(const PopulationTrajectory& traj, std::size_t j, double level) {
  const double a = traj.populations[j - 1];
  const double b = traj.populations[j];
  if (!(a > b)) throw EngineError("crossing bracket is not monotone");
  return (a - level) / (a - b);
}

}  // namespace

double find_crossing_time(const PopulationTrajectory& traj, double level) {
  const std::size_t j = crossing_index(traj, level);
  if (j == 0) return traj.times[0];
  const double fr = crossing_fraction(traj, j, level);
  return traj.times[j - 1] + fr * (traj.times[j] - traj.times[j - 1]);
}

double find_half_population_time(const PopulationTrajectory& traj) { return find_crossing_time(traj, 0.5); }

double heat_dissipated(const PopulationTrajectory& traj, double level) {
  const std::size_t j = crossing_index(traj, level);
  if (j == 0) return 0.0;
  double q = 0.0;  // heat into the system
  double prev = traj.energies[0] * traj.rates[0];
  for (std::size_t k = 1; k < j; ++k) {
    const double cur = traj.energies[k] * traj.rates[k];
    q += 0.5 * (prev + cur) * (traj.times[k] - traj.times[k - 1]);
    prev = cur;
  }
  const double fr = crossing_fraction(traj, j, level);
  const double last = traj.energies[j] * traj.rates[j];
  const double at_tf = prev + fr * (last - prev);
  q += 0.5 * (prev + at_tf) * fr * (traj.times[j] - traj.times[j - 1]);
  return -q;
}

std::vector<double> cumulative_heat(const PopulationTrajectory& traj) {
  std::vector<double> out(traj.size(), 0.0);
  double q = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double a = traj.energies[k - 1] * traj.rates[k - 1];
    const double b = traj.energies[k] * traj.rates[k];
    q += 0.5 * (a + b) * (traj.times[k] - traj.times[k - 1]);
    out[k] = -q;
  }
  return out;
}

double entropy_production(double n0, double n_final, double minus_q) {
  return binary_entropy(n_final) - binary_entropy(n0) + minus_q;
}

HeatPoint heat_point(double eps1, double eps2, double gamma, double gamma_tau, double n0) {
  if (!(gamma > 0.0)) throw ValidationError("heat_point: gamma must be > 0");
  if (!(gamma_tau >= 0.0)) throw ValidationError("heat_point: gamma_tau must be >= 0");
  const SweepSchedule schedule{eps1, eps2, gamma_tau / gamma};
  const auto traj = integrate_population(schedule, gamma, n0, default_step(schedule, gamma));
  return {gamma_tau, heat_dissipated(traj), gamma * find_half_population_time(traj)};
}

std::vector<HeatPoint> sweep_heat_curve(double eps1, double eps2, double gamma, std::span<const double> gamma_taus,
                                        double n0) {
  if (gamma_taus.empty()) throw ValidationError("sweep_heat_curve: empty gamma_tau list");
  std::vector<HeatPoint> out;
  out.reserve(gamma_taus.size());
  for (double gt : gamma_taus) out.push_back(heat_point(eps1, eps2, gamma, gt, n0));
  return out;
}

std::optional<double> zero_crossing(std::span<const HeatPoint> curve) {
  for (std::size_t k = 1; k < curve.size(); ++k) {
    const auto& a = curve[k - 1];
    const auto& b = curve[k];
    if (a.minus_q > 0.0 && b.minus_q <= 0.0) {
      return a.gamma_tau + (b.gamma_tau - a.gamma_tau) * a.minus_q / (a.minus_q - b.minus_q);
    }
  }
  return std::nullopt;
}

double quasistatic_limit(double eps1) { return std::numbers::ln2 - binary_entropy(fermi_occupation(eps1)); }

}  // namespace fermitherm::master_eq
