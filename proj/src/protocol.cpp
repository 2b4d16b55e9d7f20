#include "fermitherm/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "fermitherm/errors.hpp"

namespace fermitherm::protocol {

namespace {

constexpr std::array<Index, 1> kMemorySet{kMemory};
constexpr std::array<Index, 1> kSystemSet{kSystem};
constexpr std::array<Index, 2> kBothSet{kMemory, kSystem};

void require_two_mode(const CorrelationMatrix& c, const char* what) {
  if (c.dim() != 2) {
    throw ValidationError(std::string(what) + ": expected a two-mode state, got " + std::to_string(c.dim()) + " modes");
  }
}

LedgerRecord make_record(std::string step, const CorrelationMatrix& c, double heat, const LedgerRecord* initial) {
  LedgerRecord r;
  r.step = std::move(step);
  r.n_m = c.occupation(kMemory);
  r.n_s = c.occupation(kSystem);
  r.s_m = subsystem_entropy(c, kMemorySet);
  r.s_s = subsystem_entropy(c, kSystemSet);
  r.s_ms = subsystem_entropy(c, kBothSet);
  // Bare mode energies are zero at every step boundary.
  r.energy = 0.0;
  r.heat = heat;
  const double e0 = initial ? initial->energy : r.energy;
  const double s0 = initial ? initial->s_ms : r.s_ms;
  r.work = (r.energy - e0) - heat;
  r.sigma = (r.s_ms - s0) - heat;
  return r;
}

// Phase integral of eps(t) over [0, t].
double phase_integral(const master_eq::SweepSchedule& s, double t) {
  if (s.tau <= 0.0 || t >= s.tau) {
    const double ramp = s.tau > 0.0 ? 0.5 * (s.eps1 + s.eps2) * s.tau : 0.0;
    return ramp + s.eps2 * (t - std::max(s.tau, 0.0));
  }
  return s.eps1 * t + 0.5 * (s.eps2 - s.eps1) * t * t / s.tau;
}

struct Step2Outcome {
  CorrelationMatrix state;
  double heat = 0.0;
  std::optional<double> gamma_tf;
  double interaction_residual = 0.0;
};

Step2Outcome step2_master_equation(const ProtocolConfig& cfg, const CorrelationMatrix& c, double target) {
  const double n_s = c.occupation(kSystem);
  if (std::abs(n_s - target) <= 1e-12) return {c, 0.0, 0.0, 0.0};
  if (n_s < target) {
    throw EngineError("master-equation engine: system population " + std::to_string(n_s) + " already below target " +
                      std::to_string(target));
  }
  const double dt = cfg.dt.value_or(master_eq::default_step(cfg.schedule, cfg.gamma));
  master_eq::IntegrationOptions opts;
  opts.target = target;
  const auto traj = master_eq::integrate_population(cfg.schedule, cfg.gamma, n_s, dt, opts);
  const double minus_q = master_eq::heat_dissipated(traj, target);
  const double t_f = master_eq::find_crossing_time(traj, target);
  // The M-S coherence follows the decaying system amplitude.
  const Complex z = c(kMemory, kSystem) * std::exp(-0.5 * cfg.gamma * t_f) *
                    std::exp(Complex(0.0, -phase_integral(cfg.schedule, t_f)));
  ComplexMatrix m(2, 2);
  m << c.occupation(kMemory), z, std::conj(z), target;
  try {
    return {CorrelationMatrix::from_matrix(std::move(m)), -minus_q, cfg.gamma * t_f, 0.0};
  } catch (const ValidationError& e) {
    throw EngineError(std::string("master-equation engine produced an invalid state: ") + e.what());
  }
}

Step2Outcome step2_exact_bath(const ProtocolConfig& cfg, const CorrelationMatrix& c, double target) {
  const double n_s = c.occupation(kSystem);
  if (std::abs(n_s - target) <= 1e-12) return {c, 0.0, 0.0, 0.0};
  if (n_s < target) {
    throw EngineError("exact-bath engine: system population " + std::to_string(n_s) + " already below target " +
                      std::to_string(target));
  }
  bath::ReservoirSpec spec = cfg.reservoir;
  spec.gamma = cfg.gamma;
  const CorrelationMatrix bath_only = bath::initial_state(spec, n_s);
  // Layout: system 0, bath 1..K, memory K+1 (inert spectator).
  const Index n = bath_only.dim() + 1;
  const Index mem = n - 1;
  ComplexMatrix full = ComplexMatrix::Zero(n, n);
  full.topLeftCorner(n - 1, n - 1) = bath_only.matrix();
  full(mem, mem) = c(kMemory, kMemory);
  full(mem, 0) = c(kMemory, kSystem);
  full(0, mem) = c(kSystem, kMemory);
  const auto start = CorrelationMatrix::from_matrix(std::move(full));

  const double dt = cfg.dt.value_or(0.06 / cfg.gamma);
  bath::SimulationOptions opts;
  opts.target = target;
  const auto run = bath::simulate_state(spec, cfg.schedule, start, dt, opts);
  const std::array<Index, 2> ms{mem, 0};
  return {run.state_at_tf->restrict_to(ms), -*run.minus_q_tf, run.gamma_tf(), run.interaction_energy_tf};
}

}  // namespace

std::string_view to_string(Engine engine) {
  switch (engine) {
    case Engine::quasistatic:
      return "quasistatic";
    case Engine::master_equation:
      return "master-equation";
    case Engine::exact_bath:
      return "exact-bath";
  }
  return "unknown";
}

Engine parse_engine(std::string_view name) {
  if (name == "quasistatic" || name == "quasistatic-analytic") return Engine::quasistatic;
  if (name == "master-equation" || name == "master") return Engine::master_equation;
  if (name == "exact-bath" || name == "exact") return Engine::exact_bath;
  throw ValidationError("unknown engine '" + std::string(name) + "'");
}

double ThermoLedger::min_sigma() const {
  double m = 0.0;
  for (const auto& r : records) m = std::min(m, r.sigma);
  return m;
}

void ProtocolConfig::validate() const {
  if (initial_state) {
    require_two_mode(*initial_state, "ProtocolConfig");
  } else if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("ProtocolConfig: p must lie in [0, 1]");
  }
  if (!std::isfinite(phi)) throw ValidationError("ProtocolConfig: phi must be finite");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("ProtocolConfig: omega must be > 0");
  if (step1_angle && !(std::isfinite(*step1_angle) && *step1_angle >= 0.0)) {
    throw ValidationError("ProtocolConfig: step1 angle must be finite and >= 0");
  }
  if (engine != Engine::quasistatic) {
    schedule.validate();
    if (!(gamma > 0.0)) throw ValidationError("ProtocolConfig: finite-time engines need gamma > 0");
    if (dt && !(*dt > 0.0)) throw ValidationError("ProtocolConfig: dt must be > 0");
  }
  if (engine == Engine::exact_bath) {
    bath::ReservoirSpec spec = reservoir;
    spec.gamma = gamma;
    spec.validate();
  }
}

CorrelationMatrix prepare_one_body_state(double p, double phi) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("prepare_one_body_state: p outside [0, 1]");
  const Complex z = std::sqrt(p * (1.0 - p)) * std::exp(Complex(0.0, -phi));
  ComplexMatrix m(2, 2);
  m << p, z, std::conj(z), 1.0 - p;
  return CorrelationMatrix::from_matrix(std::move(m));
}

double memory_emptying_angle(const CorrelationMatrix& c) {
  require_two_mode(c, "memory_emptying_angle");
  // Under the rotation the memory population is
  //   1/2 + (p - 1/2) cos 2a + Im(C_MS) sin 2a,
  // minimised at 2a = atan2(Im C_MS, p - 1/2) + pi.
  const double a = c.occupation(kMemory) - 0.5;
  const double b = c(kMemory, kSystem).imag();
  if (std::hypot(a, b) < 1e-15) return 0.0;
  double two_a = std::atan2(b, a) + std::numbers::pi;
  two_a = std::fmod(two_a, 2.0 * std::numbers::pi);
  if (two_a < 0.0) two_a += 2.0 * std::numbers::pi;
  return 0.5 * two_a;
}

CorrelationMatrix step1_rotate(const CorrelationMatrix& c, double omega, double angle) {
  require_two_mode(c, "step1_rotate");
  if (!(omega > 0.0)) throw ValidationError("step1_rotate: omega must be > 0");
  return evolve_step(c, QuadraticHamiltonian::two_mode(0.0, 0.0, omega), angle / omega);
}

QuasistaticResult step2_quasistatic(double n0, double target) {
  return {binary_entropy(target) - binary_entropy(n0), target};
}

CorrelationMatrix step3_swap(const CorrelationMatrix& c, double omega) {
  require_two_mode(c, "step3_swap");
  if (!(omega > 0.0)) throw ValidationError("step3_swap: omega must be > 0");
  return evolve_step(c, QuadraticHamiltonian::two_mode(0.0, 0.0, omega), std::numbers::pi / (2.0 * omega));
}

StepOutcome quasistatic_thermalize(const CorrelationMatrix& c, double target) {
  require_two_mode(c, "quasistatic_thermalize");
  if (!(target >= 0.0 && target <= 1.0)) throw ValidationError("quasistatic_thermalize: target outside [0, 1]");
  const auto r = step2_quasistatic(c.occupation(kSystem), target);
  const std::array<double, 2> occ{c.occupation(kMemory), target};
  return {CorrelationMatrix::diagonal(occ), r.heat};
}

StepOutcome apply_operation(const CorrelationMatrix& c, const Operation& op) {
  return std::visit(
      [&](const auto& o) -> StepOutcome {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Rotate>) {
          return {step1_rotate(c, 1.0, o.angle), 0.0};
        } else if constexpr (std::is_same_v<T, Thermalize>) {
          return quasistatic_thermalize(c, o.target);
        } else if constexpr (std::is_same_v<T, Swap>) {
          return {step3_swap(c, 1.0), 0.0};
        } else {
          return quasistatic_thermalize(c, 0.0);
        }
      },
      op);
}

std::string describe(const Operation& op) {
  return std::visit(
      [](const auto& o) -> std::string {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Rotate>) {
          return "rotate:" + std::to_string(o.angle);
        } else if constexpr (std::is_same_v<T, Thermalize>) {
          return "thermalize:" + std::to_string(o.target);
        } else if constexpr (std::is_same_v<T, Swap>) {
          return "swap";
        } else {
          return "erase";
        }
      },
      op);
}

ThermoLedger run_sequence(const CorrelationMatrix& initial, std::span<const Operation> ops) {
  require_two_mode(initial, "run_sequence");
  ThermoLedger ledger;
  ledger.engine = Engine::quasistatic;
  ledger.coherent_information = coherent_information(initial, kMemorySet);
  ledger.records.push_back(make_record("initial", initial, 0.0, nullptr));
  CorrelationMatrix c = initial;
  double heat = 0.0;
  for (const auto& op : ops) {
    auto out = apply_operation(c, op);
    heat += out.heat;
    c = std::move(out.state);
    ledger.records.push_back(make_record(describe(op), c, heat, &ledger.records.front()));
  }
  ledger.final_state = c;
  ledger.system_purified = ledger.final().s_s <= 1e-6;
  ledger.memory_restored = std::abs(ledger.final().n_m - ledger.initial().n_m) <= 1e-6;
  return ledger;
}

std::vector<Operation> closure_operations(double initial_memory_population) {
  return {Thermalize{initial_memory_population}, Swap{}, Erase{}};
}

ThermoLedger run_purification(const ProtocolConfig& config) {
  config.validate();
  const CorrelationMatrix c0 = config.initial_state ? *config.initial_state : prepare_one_body_state(config.p, config.phi);

  ThermoLedger ledger;
  ledger.engine = config.engine;
  ledger.coherent_information = coherent_information(c0, kMemorySet);
  ledger.records.push_back(make_record("initial", c0, 0.0, nullptr));
  ledger.step1_angle = config.step1_angle.value_or(memory_emptying_angle(c0));
  const CorrelationMatrix c1 = step1_rotate(c0, config.omega, ledger.step1_angle);
  ledger.records.push_back(make_record("step1-rotate", c1, 0.0, &ledger.records.front()));

  const double target = c0.occupation(kMemory);
  Step2Outcome s2{c1, 0.0, std::nullopt, 0.0};
  switch (config.engine) {
    case Engine::quasistatic: {
      auto out = quasistatic_thermalize(c1, target);
      s2 = {std::move(out.state), out.heat, std::nullopt, 0.0};
      break;
    }
    case Engine::master_equation:
      s2 = step2_master_equation(config, c1, target);
      break;
    case Engine::exact_bath:
      s2 = step2_exact_bath(config, c1, target);
      break;
  }
  double heat = s2.heat;
  ledger.gamma_tf = s2.gamma_tf;
  ledger.interaction_residual = s2.interaction_residual;
  ledger.records.push_back(make_record("step2-cool", s2.state, heat, &ledger.records.front()));

  CorrelationMatrix c3 = step3_swap(s2.state, config.omega);
  ledger.records.push_back(make_record("step3-swap", c3, heat, &ledger.records.front()));

  if (config.enforce_endpoint && ledger.final().s_s > 1e-9) {
    auto out = quasistatic_thermalize(c3, 0.0);
    heat += out.heat;
    c3 = std::move(out.state);
    ledger.records.push_back(make_record("step4-erase", c3, heat, &ledger.records.front()));
  }

  const double memory_tol = config.engine == Engine::exact_bath ? 1e-3 : 1e-6;
  ledger.system_purified = ledger.final().s_s <= 1e-6;
  ledger.memory_restored = std::abs(ledger.final().n_m - ledger.initial().n_m) <= memory_tol;
  ledger.final_state = std::move(c3);
  return ledger;
}

double witness_value(double n_s0, double n_m0, double n_s1, double n_m1, double beta_q) {
  for (double x : {n_s0, n_m0, n_s1, n_m1}) {
    if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) throw ValidationError("witness_value: occupancy outside [0, 1]");
  }
  return binary_entropy(n_s1) + binary_entropy(n_m1) - std::max(binary_entropy(n_s0), binary_entropy(n_m0)) - beta_q;
}

double witness_value(const ThermoLedger& ledger) {
  const auto& a = ledger.initial();
  const auto& b = ledger.final();
  return witness_value(a.n_s, a.n_m, b.n_s, b.n_m, b.heat);
}

CoolingBoundReport cooling_bound_check(const ThermoLedger& ledger, bool initially_separable) {
  CoolingBoundReport rep;
  rep.minus_q = ledger.minus_q();
  rep.min_sigma = ledger.min_sigma();
  if (initially_separable && rep.minus_q < -1e-9) {
    rep.violations.push_back("separable input cooled the reservoir: -Q = " + std::to_string(rep.minus_q));
  }
  for (const auto& r : ledger.records) {
    if (r.sigma < -1e-6) {
      rep.violations.push_back("negative entropy production at " + r.step + ": sigma = " + std::to_string(r.sigma));
    }
  }
  rep.passed = rep.violations.empty();
  return rep;
}

}  // namespace fermitherm::protocol
