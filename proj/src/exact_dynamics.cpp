#include "fermitherm/exact_dynamics.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "fermitherm/errors.hpp"

namespace fermitherm::bath {

double ReservoirSpec::t_amp() const { return std::sqrt(gamma / (2.0 * std::numbers::pi * xi())); }

void ReservoirSpec::validate() const {
  if (K < 2) throw ValidationError("ReservoirSpec: K must be >= 2 (got " + std::to_string(K) + ")");
  if (!(window_hi > window_lo)) throw ValidationError("ReservoirSpec: empty level window");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("ReservoirSpec: gamma must be >= 0");
}

Reservoir build_reservoir(const ReservoirSpec& spec) {
  spec.validate();
  Reservoir r;
  r.levels.resize(static_cast<std::size_t>(spec.K));
  const double width = spec.window_hi - spec.window_lo;
  for (int k = 1; k <= spec.K; ++k) {
    r.levels[static_cast<std::size_t>(k - 1)] = spec.window_lo + width * (k - 0.5) / spec.K;
  }
  r.t_amp = spec.t_amp();
  return r;
}

QuadraticHamiltonian build_full_hamiltonian(double eps_s, std::span<const double> levels, double t_amp,
                                            Index spectators) {
  const auto k = static_cast<Index>(levels.size());
  ComplexMatrix h = ComplexMatrix::Zero(k + 1 + spectators, k + 1 + spectators);
  h(0, 0) = eps_s;
  for (Index i = 0; i < k; ++i) {
    h(i + 1, i + 1) = levels[static_cast<std::size_t>(i)];
    h(0, i + 1) = t_amp;
    h(i + 1, 0) = t_amp;
  }
  return QuadraticHamiltonian::from_matrix(std::move(h));
}

CorrelationMatrix initial_state(const ReservoirSpec& spec, double n_s0) {
  if (!(n_s0 >= 0.0 && n_s0 <= 1.0)) throw ValidationError("initial_state: n_s0 outside [0, 1]");
  const Reservoir r = build_reservoir(spec);
  std::vector<double> occ;
  occ.reserve(r.levels.size() + 1);
  occ.push_back(n_s0);
  for (double e : r.levels) occ.push_back(fermi_occupation(e));
  return CorrelationMatrix::diagonal(occ);
}

namespace {

double reservoir_energy(const CorrelationMatrix& c, std::span<const double> levels) {
  double e = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) e += levels[k] * c.occupation(static_cast<Index>(k) + 1);
  return e;
}

}  // namespace

BathRun simulate_state(const ReservoirSpec& spec, const SweepSchedule& schedule, const CorrelationMatrix& initial,
                       double dt, const SimulationOptions& options) {
  spec.validate();
  schedule.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("simulate: dt must be > 0");
  const Index bath_dim = spec.K + 1;
  if (initial.dim() < bath_dim) {
    throw ValidationError("simulate: initial state has " + std::to_string(initial.dim()) + " modes, need at least " +
                          std::to_string(bath_dim));
  }
  const Index spectators = initial.dim() - bath_dim;
  const Reservoir res = build_reservoir(spec);

  BathRun run;
  run.spec = spec;
  run.schedule = schedule;
  run.n_s0 = initial.occupation(0);
  run.dt = dt;
  if (spec.gamma * dt > 0.1) {
    run.warnings.push_back("gamma*dt = " + std::to_string(spec.gamma * dt) + " > 0.1: coarse time step");
  }
  if (spec.gamma > 0.1) {
    run.warnings.push_back("gamma = " + std::to_string(spec.gamma) + " is not small compared to k_B T");
  }

  const double t_max =
      options.max_time.value_or(schedule.tau + (spec.gamma > 0.0 ? 50.0 / spec.gamma : std::max(dt, schedule.tau)));
  const double h0 = binary_entropy(run.n_s0);

  CorrelationMatrix c = initial;
  const double e_r0 = reservoir_energy(c, res.levels);
  auto record = [&](double t, const CorrelationMatrix& state) {
    const double n = state.occupation(0);
    const double er = reservoir_energy(state, res.levels);
    run.times.push_back(t);
    run.n_s.push_back(n);
    run.reservoir_energy.push_back(er);
    run.minus_q.push_back(er - e_r0);
    run.sigma.push_back(binary_entropy(std::clamp(n, 0.0, 1.0)) - h0 + (er - e_r0));
    run.trace.push_back(state.trace());
  };
  record(0.0, c);

  std::optional<Propagator> prop;
  std::optional<QuadraticHamiltonian> ham;
  double prop_eps = std::nan("");
  double prev_eps = schedule.energy(0.0);

  const auto max_steps = static_cast<long long>(std::ceil(t_max / dt - 1e-9));
  bool crossed = options.stop_at_target && run.n_s0 <= options.target;
  if (crossed) {
    run.t_f = 0.0;
    run.minus_q_tf = 0.0;
    run.state_at_tf = c;
  }
  for (long long k = 0; k < max_steps && !crossed; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double eps = schedule.energy(t);
    if (!prop || eps != prop_eps) {
      ham = build_full_hamiltonian(eps, res.levels, res.t_amp, spectators);
      prop.emplace(*ham, dt);
      prop_eps = eps;
      ++run.eigendecompositions;
    }
    CorrelationMatrix next = prop->apply(c);
    if (options.record_energy_audit) {
      const auto h_old = build_full_hamiltonian(prev_eps, res.levels, res.t_amp, spectators);
      run.energy_audit.push_back({t, prev_eps, eps, c.occupation(0), energy_expectation(c, h_old),
                                  energy_expectation(c, *ham), energy_expectation(next, *ham)});
    }
    prev_eps = eps;
    record(static_cast<double>(k + 1) * dt, next);

    const double n_prev = c.occupation(0);
    const double n_next = next.occupation(0);
    if (options.stop_at_target && n_next <= options.target) {
      crossed = true;
      const double fr = (n_prev - options.target) / (n_prev - n_next);
      run.t_f = t + fr * dt;
      const std::size_t j = run.minus_q.size() - 1;
      run.minus_q_tf = run.minus_q[j - 1] + fr * (run.minus_q[j] - run.minus_q[j - 1]);
      CorrelationMatrix at_tf = Propagator(*ham, fr * dt).apply(c);
      double coupling = 0.0;
      for (Index b = 1; b < bath_dim; ++b) coupling += 2.0 * res.t_amp * at_tf(0, b).real();
      run.interaction_energy_tf = coupling;
      run.state_at_tf = std::move(at_tf);
    }
    c = std::move(next);
  }
  if (options.stop_at_target && !crossed) {
    throw EngineError("no-crossing: system population " + std::to_string(c.occupation(0)) + " never reached " +
                      std::to_string(options.target) + " before t = " + std::to_string(t_max));
  }
  run.final_state = std::move(c);
  return run;
}

BathRun simulate(const ReservoirSpec& spec, const SweepSchedule& schedule, double n_s0, double dt,
                 const SimulationOptions& options) {
  return simulate_state(spec, schedule, initial_state(spec, n_s0), dt, options);
}

DeviationReport compare_with_master_equation(const BathRun& run, double gamma) {
  if (run.times.size() < 2) throw ValidationError("compare_with_master_equation: bath run too short");
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    if (std::abs(run.times[k] - static_cast<double>(k) * run.dt) > 1e-9 * (1.0 + run.times[k])) {
      throw ValidationError("compare_with_master_equation: grid mismatch (non-uniform bath grid)");
    }
  }
  const double base = master_eq::default_step(master_eq::SweepSchedule{run.schedule.eps1, run.schedule.eps2, 0.0},
                                              gamma);
  const auto m = static_cast<long long>(std::ceil(run.dt / base - 1e-9));
  const double dt_me = run.dt / static_cast<double>(m);

  const double t_end = run.times.back();
  master_eq::IntegrationOptions opts;
  opts.stop_at_target = false;
  opts.max_time = t_end + (gamma > 0.0 ? 20.0 / gamma : 0.0);
  const auto traj = master_eq::integrate_population(run.schedule, gamma, run.n_s0, dt_me, opts);
  const auto heat = master_eq::cumulative_heat(traj);

  DeviationReport rep;
  const double t_limit = run.t_f.value_or(t_end);
  double sum = 0.0;
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    const auto idx = static_cast<std::size_t>(static_cast<long long>(k) * m);
    rep.master_n.push_back(traj.populations[idx]);
    rep.master_minus_q_series.push_back(heat[idx]);
    if (run.times[k] <= t_limit + 1e-12) {
      const double d = std::abs(run.n_s[k] - traj.populations[idx]);
      rep.max_population_deviation = std::max(rep.max_population_deviation, d);
      sum += d;
      ++rep.samples;
    }
  }
  rep.mean_population_deviation = rep.samples ? sum / static_cast<double>(rep.samples) : 0.0;

  if (run.minus_q_tf) {
    rep.exact_minus_q = *run.minus_q_tf;
    rep.master_minus_q = master_eq::heat_dissipated(traj, 0.5);
  } else {
    const auto idx = static_cast<std::size_t>(static_cast<long long>(run.times.size() - 1) * m);
    rep.exact_minus_q = run.minus_q.back();
    rep.master_minus_q = heat[idx];
  }
  rep.heat_deviation = std::abs(rep.exact_minus_q - rep.master_minus_q);
  return rep;
}

}  // namespace fermitherm::bath
