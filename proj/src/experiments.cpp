#include "fermitherm/experiments.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "fermitherm/ensemble.hpp"
#include "fermitherm/errors.hpp"
#include "fermitherm/exact_dynamics.hpp"
#include "fermitherm/gaussian.hpp"
#include "fermitherm/master_equation.hpp"
#include "fermitherm/parallel.hpp"
#include "fermitherm/protocol.hpp"

namespace fermitherm::cli {

namespace {

constexpr std::array<const char*, 5> kExperiments{"protocol", "fig1", "fig2", "witness", "invariants"};

double parse_number(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ValidationError("cannot parse " + what + " '" + s + "'");
  return v;
}

// A resolved operation token; "rotate" without an angle is resolved against
// the state it is applied to.
struct OpToken {
  enum class Kind { rotate_auto, rotate, thermalize, thermalize_memory, swap, erase } kind;
  double value = 0.0;
};

OpToken parse_op(const std::string& token) {
  const auto colon = token.find(':');
  const std::string name = token.substr(0, colon);
  const bool has_arg = colon != std::string::npos;
  const std::string arg = has_arg ? token.substr(colon + 1) : "";
  if (name == "rotate") {
    if (!has_arg) return {OpToken::Kind::rotate_auto};
    const double a = parse_number(arg, "rotation angle");
    if (!std::isfinite(a) || a < 0.0) throw ValidationError("rotation angle must be finite and >= 0");
    return {OpToken::Kind::rotate, a};
  }
  if (name == "thermalize") {
    if (!has_arg) return {OpToken::Kind::thermalize_memory};
    const double t = parse_number(arg, "thermalize target");
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("thermalize target must lie in [0, 1]");
    return {OpToken::Kind::thermalize, t};
  }
  if (name == "swap" && !has_arg) return {OpToken::Kind::swap};
  if (name == "erase" && !has_arg) return {OpToken::Kind::erase};
  throw ValidationError("unknown operation '" + token + "'");
}

CorrelationMatrix initial_two_mode(const ExperimentConfig& c) {
  if (c.initial == "diagonal") {
    const std::array<double, 2> occ{c.n_m, c.n_s};
    return CorrelationMatrix::diagonal(occ);
  }
  return protocol::prepare_one_body_state(c.p, c.phi);
}

protocol::ProtocolConfig to_protocol_config(const ExperimentConfig& c) {
  protocol::ProtocolConfig pc;
  if (c.initial == "diagonal") pc.initial_state = initial_two_mode(c);
  pc.p = c.p;
  pc.phi = c.phi;
  pc.omega = c.omega;
  pc.engine = protocol::parse_engine(c.engine);
  pc.schedule = {c.eps1, c.eps2, c.sweep_time()};
  pc.gamma = c.gamma;
  pc.reservoir.K = c.K;
  pc.reservoir.gamma = c.gamma;
  pc.enforce_endpoint = c.enforce_endpoint;
  if (c.dt) {
    pc.dt = c.dt;
  } else if (pc.engine == protocol::Engine::exact_bath) {
    pc.dt = c.gamma_dt / c.gamma;
  }
  return pc;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw ValidationError("unknown format '" + name + "' (expected csv or json)");
}

std::vector<double> default_fig1_grid() {
  std::vector<double> g(50);
  for (int i = 0; i < 50; ++i) g[static_cast<std::size_t>(i)] = std::pow(10.0, -2.0 + 4.0 * i / 49.0);
  return g;
}

void ExperimentConfig::validate() const {
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end()) {
    throw ValidationError("unknown experiment '" + experiment + "'");
  }
  auto finite = [](double v, const char* name) {
    if (!std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite");
  };
  finite(gamma, "gamma");
  finite(eps1, "eps1");
  finite(eps2, "eps2");
  finite(gamma_tau, "gamma_tau");
  finite(p, "p");
  finite(phi, "phi");
  finite(omega, "omega");
  if (gamma < 0.0) throw ValidationError("gamma must be >= 0");
  if (gamma == 0.0 && experiment != "fig2" && experiment != "witness" && experiment != "invariants" &&
      !(experiment == "protocol" && engine == "quasistatic")) {
    throw ValidationError("gamma must be > 0 for " + experiment);
  }
  if (gamma == 0.0 && experiment == "fig2" && (!tau || !dt)) {
    throw ValidationError("fig2 with gamma = 0 (decoupled bath) needs explicit --tau and --dt");
  }
  if (!(eps1 < eps2)) throw ValidationError("eps1 must be < eps2");
  if (gamma_tau < 0.0) throw ValidationError("gamma_tau must be >= 0");
  if (tau && !(*tau >= 0.0 && std::isfinite(*tau))) throw ValidationError("tau must be finite and >= 0");
  for (double g : gamma_taus) {
    if (!(g >= 0.0 && std::isfinite(g))) throw ValidationError("gamma_tau grid values must be finite and >= 0");
  }
  if (K < 2) throw ValidationError("K must be >= 2");
  if (!(gamma_dt > 0.0 && std::isfinite(gamma_dt))) throw ValidationError("gamma_dt must be > 0");
  if (dt && !(*dt > 0.0 && std::isfinite(*dt))) throw ValidationError("dt must be > 0");
  if (!(n0 >= 0.0 && n0 <= 1.0)) throw ValidationError("n0 must lie in [0, 1]");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p must lie in [0, 1]");
  if (!(omega > 0.0)) throw ValidationError("omega must be > 0");
  if (!(n_m >= 0.0 && n_m <= 1.0) || !(n_s >= 0.0 && n_s <= 1.0)) throw ValidationError("n_m, n_s must lie in [0, 1]");
  if (initial != "one-body" && initial != "diagonal") {
    throw ValidationError("initial must be 'one-body' or 'diagonal'");
  }
  protocol::parse_engine(engine);
  for (const auto& t : sequence) parse_op(t);
  if (cases < 1) throw ValidationError("cases must be >= 1");
  if (experiment == "protocol" || experiment == "fig2") {
    const double t = sweep_time();
    if (!(t > 0.0 && std::isfinite(t))) throw ValidationError("sweep time must be > 0");
  }
}

ExperimentConfig apply_json(ExperimentConfig c, const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "experiment") c.experiment = v.get<std::string>();
      else if (key == "gamma") c.gamma = v.get<double>();
      else if (key == "eps1") c.eps1 = v.get<double>();
      else if (key == "eps2") c.eps2 = v.get<double>();
      else if (key == "gamma_tau") c.gamma_tau = v.get<double>();
      else if (key == "tau") c.tau = v.get<double>();
      else if (key == "gamma_taus") c.gamma_taus = v.get<std::vector<double>>();
      else if (key == "K") c.K = v.get<int>();
      else if (key == "gamma_dt") c.gamma_dt = v.get<double>();
      else if (key == "dt") c.dt = v.get<double>();
      else if (key == "n0") c.n0 = v.get<double>();
      else if (key == "p") c.p = v.get<double>();
      else if (key == "phi") c.phi = v.get<double>();
      else if (key == "omega") c.omega = v.get<double>();
      else if (key == "engine") c.engine = v.get<std::string>();
      else if (key == "enforce_endpoint") c.enforce_endpoint = v.get<bool>();
      else if (key == "initial") c.initial = v.get<std::string>();
      else if (key == "n_m") c.n_m = v.get<double>();
      else if (key == "n_s") c.n_s = v.get<double>();
      else if (key == "sequence") c.sequence = v.get<std::vector<std::string>>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "cases") c.cases = v.get<int>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "format") c.format = parse_format(v.get<std::string>());
      else throw ValidationError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config type error: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return apply_json(std::move(base), j);
}

// ---------------------------------------------------------------------------
// Experiments

Table cmd_protocol(const ExperimentConfig& config) {
  config.validate();
  const auto pc = to_protocol_config(config);
  const auto ledger = protocol::run_purification(pc);
  const bool separable = config.initial == "diagonal";
  const auto bound = protocol::cooling_bound_check(ledger, separable);

  Table t;
  t.experiment = "protocol";
  t.columns = {{"step", "label"}, {"n_M", "1"},  {"n_S", "1"},    {"S_M", "nats"}, {"S_S", "nats"},
               {"S_MS", "nats"},  {"E", "k_BT"}, {"Q", "k_BT"},   {"W", "k_BT"},   {"sigma", "nats"}};
  for (const auto& r : ledger.records) {
    t.rows.push_back({r.step, r.n_m, r.n_s, r.s_m, r.s_s, r.s_ms, r.energy, r.heat, r.work, r.sigma});
  }
  const auto& f = ledger.final();
  t.rows.push_back({std::string("total"), f.n_m, f.n_s, f.s_m, f.s_s, f.s_ms, f.energy, f.heat, f.work, f.sigma});

  t.meta["engine"] = std::string(protocol::to_string(ledger.engine));
  t.meta["minus_Q_total"] = ledger.minus_q();
  t.meta["coherent_information"] = ledger.coherent_information;
  t.meta["step1_angle"] = ledger.step1_angle;
  t.meta["system_purified"] = ledger.system_purified;
  t.meta["memory_restored"] = ledger.memory_restored;
  t.meta["gamma_tf"] = optional_number(ledger.gamma_tf);
  t.meta["interaction_residual"] = ledger.interaction_residual;
  t.meta["cooling_bound_passed"] = bound.passed;
  t.meta["initially_separable"] = separable;
  return t;
}

Table cmd_fig1(const ExperimentConfig& config) {
  config.validate();
  const auto grid = config.gamma_taus.empty() ? default_fig1_grid() : config.gamma_taus;
  const auto outcomes = parallel::sweep_heat_curve_outcomes(config.eps1, config.eps2, config.gamma, grid, config.n0);

  Table t;
  t.experiment = "fig1";
  t.columns = {{"gamma_tau", "1"}, {"minus_Q", "k_BT"}};
  std::vector<master_eq::HeatPoint> ok;
  nlohmann::ordered_json failed = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].point) {
      ok.push_back(*outcomes[i].point);
      t.rows.push_back({ok.back().gamma_tau, ok.back().minus_q});
    } else {
      failed.push_back({{"gamma_tau", grid[i]}, {"reason", outcomes[i].error}});
    }
  }
  t.meta["eps1"] = config.eps1;
  t.meta["eps2"] = config.eps2;
  t.meta["gamma"] = config.gamma;
  t.meta["n0"] = config.n0;
  t.meta["zero_crossing_gamma_tau"] = optional_number(master_eq::zero_crossing(ok));
  t.meta["quasistatic_minus_Q"] = -master_eq::quasistatic_limit(config.eps1);
  t.meta["failed"] = failed;
  return t;
}

Table cmd_fig2(const ExperimentConfig& config) {
  config.validate();
  bath::ReservoirSpec spec;
  spec.K = config.K;
  spec.gamma = config.gamma;
  const double tau = config.sweep_time();
  const bath::SweepSchedule schedule{config.eps1, config.eps2, tau};
  const double dt = config.dt.value_or(config.gamma_dt / std::max(config.gamma, 1e-300));
  bath::SimulationOptions opts;
  if (config.gamma == 0.0) {
    opts.stop_at_target = false;
    opts.max_time = 2.0 * tau;
  }
  const auto run = bath::simulate(spec, schedule, config.n0, dt, opts);
  const auto rep = bath::compare_with_master_equation(run, config.gamma);

  Table t;
  t.experiment = "fig2";
  t.columns = {{"t", "1/k_BT"},          {"gamma_t", "1"},         {"n_exact", "1"}, {"n_master", "1"},
               {"minus_Q_exact", "k_BT"}, {"minus_Q_master", "k_BT"}, {"Q_exact", "k_BT"}, {"Q_master", "k_BT"}};
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    t.rows.push_back({run.times[k], config.gamma * run.times[k], run.n_s[k], rep.master_n[k], run.minus_q[k],
                      rep.master_minus_q_series[k], -run.minus_q[k], -rep.master_minus_q_series[k]});
  }
  t.meta["gamma"] = config.gamma;
  t.meta["gamma_tau"] = config.gamma * tau;
  t.meta["gamma_dt"] = config.gamma * dt;
  t.meta["K"] = config.K;
  t.meta["t_amp"] = spec.t_amp();
  t.meta["gamma_tf"] = optional_number(run.gamma_tf());
  t.meta["minus_Q_at_tf"] = optional_number(run.minus_q_tf);
  t.meta["master_minus_Q_at_tf"] = rep.master_minus_q;
  t.meta["max_population_deviation"] = rep.max_population_deviation;
  t.meta["mean_population_deviation"] = rep.mean_population_deviation;
  t.meta["heat_deviation"] = rep.heat_deviation;
  t.meta["min_sigma"] = run.sigma.empty() ? 0.0 : *std::min_element(run.sigma.begin(), run.sigma.end());
  t.meta["interaction_energy_at_tf"] = run.interaction_energy_tf;
  t.meta["eigendecompositions"] = run.eigendecompositions;
  t.meta["warnings"] = run.warnings;
  return t;
}

Table cmd_witness(const ExperimentConfig& config) {
  config.validate();
  const CorrelationMatrix c0 = initial_two_mode(config);
  std::vector<protocol::Operation> ops;
  CorrelationMatrix c = c0;
  for (const auto& token : config.sequence) {
    const OpToken tok = parse_op(token);
    protocol::Operation op = protocol::Swap{};
    switch (tok.kind) {
      case OpToken::Kind::rotate_auto:
        op = protocol::Rotate{protocol::memory_emptying_angle(c)};
        break;
      case OpToken::Kind::rotate:
        op = protocol::Rotate{tok.value};
        break;
      case OpToken::Kind::thermalize:
        op = protocol::Thermalize{tok.value};
        break;
      case OpToken::Kind::thermalize_memory:
        op = protocol::Thermalize{c0.occupation(protocol::kMemory)};
        break;
      case OpToken::Kind::swap:
        op = protocol::Swap{};
        break;
      case OpToken::Kind::erase:
        op = protocol::Erase{};
        break;
    }
    c = protocol::apply_operation(c, op).state;
    ops.push_back(op);
  }
  const auto ledger = protocol::run_sequence(c0, ops);
  const double w = protocol::witness_value(ledger);
  const bool certified = w < -1e-9;

  Table t;
  t.experiment = "witness";
  t.columns = {{"n_S0", "1"},   {"n_M0", "1"},    {"n_S1", "1"},     {"n_M1", "1"},
               {"betaQ", "nats"}, {"witness", "nats"}, {"verdict", "label"}};
  const auto& a = ledger.initial();
  const auto& b = ledger.final();
  t.rows.push_back({a.n_s, a.n_m, b.n_s, b.n_m, b.heat, w,
                    std::string(certified ? "entanglement certified" : "not certified")});
  nlohmann::ordered_json seq = nlohmann::ordered_json::array();
  for (const auto& op : ops) seq.push_back(protocol::describe(op));
  t.meta["initial"] = config.initial;
  t.meta["sequence"] = seq;
  t.meta["witness"] = w;
  t.meta["certified"] = certified;
  return t;
}

Table cmd_invariants(const ExperimentConfig& config) {
  config.validate();
  Table t;
  t.experiment = "invariants";
  t.columns = {{"check", "label"}, {"cases", "count"}, {"worst", "value"}, {"tolerance", "value"}, {"status", "label"}};
  auto add = [&](const std::string& name, std::size_t n, double worst, double tol, bool pass) {
    t.rows.push_back({name, static_cast<double>(n), worst, tol, std::string(pass ? "pass" : "fail")});
    t.ok = t.ok && pass;
  };

  const auto n = static_cast<std::size_t>(config.cases);
  const auto closed = ensemble::separable_cases(n, config.seed, true);
  const auto closed_res = parallel::evaluate_sequences(closed);
  const auto open = ensemble::separable_cases(n, config.seed + 1, false);
  const auto open_res = parallel::evaluate_sequences(open);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  double min_mq = kInf, min_w_closed = kInf, min_w_open = kInf, min_sigma = kInf;
  bool all_closed = true;
  for (const auto& r : closed_res) {
    min_mq = std::min(min_mq, r.minus_q);
    min_w_closed = std::min(min_w_closed, r.witness);
    min_sigma = std::min(min_sigma, r.min_sigma);
    all_closed = all_closed && r.system_purified && r.memory_restored;
  }
  for (const auto& r : open_res) {
    min_w_open = std::min(min_w_open, r.witness);
    min_sigma = std::min(min_sigma, r.min_sigma);
  }
  add("separable_purification_minus_Q", n, min_mq, -1e-9, min_mq >= -1e-9 && all_closed);
  add("separable_purification_witness", n, min_w_closed, -1e-9, min_w_closed >= -1e-9);
  add("separable_open_sequence_witness", n, min_w_open, -1e-9, min_w_open >= -1e-9);
  add("sequence_entropy_production", 2 * n, min_sigma, -1e-6, min_sigma >= -1e-6);

  {
    const auto c1 = protocol::step1_rotate(protocol::prepare_one_body_state(0.5, std::numbers::pi / 2), 1.0);
    const double w = protocol::witness_value(0.5, 0.5, c1.occupation(1), c1.occupation(0), 0.0);
    const double err = std::abs(w + std::numbers::ln2);
    add("entangled_witness_after_rotation", 1, err, 1e-12, err <= 1e-12);
  }

  std::mt19937_64 rng(config.seed + 2);
  std::uniform_int_distribution<int> dims(2, 6);
  std::uniform_real_distribution<double> times(0.0, 3.0);
  const std::size_t m = std::min<std::size_t>(n, 200);
  double d_trace = 0.0, d_spec = 0.0, d_herm = 0.0, d_comp = 0.0, d_energy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Index d = dims(rng);
    const auto c = ensemble::random_correlation(d, rng);
    const auto h = ensemble::random_hamiltonian(d, rng);
    const double a = times(rng), b = times(rng);
    const auto ca = evolve_step(c, h, a);
    const auto cab = evolve_step(ca, h, b);
    const auto direct = evolve_step(c, h, a + b);
    d_trace = std::max(d_trace, std::abs(ca.trace() - c.trace()));
    d_spec = std::max(d_spec, (ca.spectrum() - c.spectrum()).cwiseAbs().maxCoeff());
    d_herm = std::max(d_herm, hermiticity_defect(ca.matrix()));
    d_comp = std::max(d_comp, (cab.matrix() - direct.matrix()).cwiseAbs().maxCoeff());
    d_energy = std::max(d_energy, std::abs(energy_expectation(ca, h) - energy_expectation(c, h)));
  }
  add("evolve_trace", m, d_trace, 1e-10, d_trace <= 1e-10);
  add("evolve_spectrum", m, d_spec, 1e-10, d_spec <= 1e-10);
  add("evolve_hermiticity", m, d_herm, 1e-12, d_herm <= 1e-12);
  add("evolve_composition", m, d_comp, 1e-10, d_comp <= 1e-10);
  add("evolve_energy", m, d_energy, 1e-10, d_energy <= 1e-10);

  t.meta["seed"] = config.seed;
  t.meta["cases"] = config.cases;
  t.meta["all_passed"] = t.ok;
  return t;
}

Table run_experiment(const ExperimentConfig& config) {
  if (config.experiment == "protocol") return cmd_protocol(config);
  if (config.experiment == "fig1") return cmd_fig1(config);
  if (config.experiment == "fig2") return cmd_fig2(config);
  if (config.experiment == "witness") return cmd_witness(config);
  if (config.experiment == "invariants") return cmd_invariants(config);
  throw ValidationError("unknown experiment '" + config.experiment + "'");
}

// ---------------------------------------------------------------------------
// Output

void write_csv(const Table& table, std::ostream& os) {
  os << "# experiment: " << table.experiment << "\n# columns:";
  for (const auto& [name, unit] : table.columns) os << ' ' << name << " [" << unit << "]";
  os << '\n';
  for (const auto& [key, value] : table.meta.items()) {
    os << "# " << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i].first;
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      if (const auto* d = std::get_if<double>(&row[i])) {
        os << format_number(*d);
      } else {
        os << std::get<std::string>(row[i]);
      }
    }
    os << '\n';
  }
}

void write_json(const Table& table, std::ostream& os) {
  nlohmann::ordered_json j;
  j["meta"] = table.meta;
  j["meta"]["experiment"] = table.experiment;
  nlohmann::ordered_json units = nlohmann::ordered_json::object();
  for (const auto& [name, unit] : table.columns) units[name] = unit;
  j["meta"]["units"] = units;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit([&](const auto& v) { r[table.columns[i].first] = v; }, row[i]);
    }
    j["rows"].push_back(std::move(r));
  }
  os << j.dump(2) << '\n';
}

void write_table(const Table& table, Format format, std::ostream& os) {
  if (format == Format::json) {
    write_json(table, os);
  } else {
    write_csv(table, os);
  }
}

// ---------------------------------------------------------------------------
// Command line

int run_cli(int argc, char** argv) {
  CLI::App app{"Fermionic memory-assisted purification simulator"};
  std::string experiment;
  std::optional<std::string> config_path, out, format, engine, sequence, initial;
  std::optional<double> gamma, eps1, eps2, tau, dt, gamma_tau, gamma_dt, p, phi, omega, n0, n_m, n_s;
  std::optional<int> K, cases;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> gamma_taus;
  bool enforce_endpoint = false;

  app.add_option("experiment", experiment, "protocol | fig1 | fig2 | witness | invariants")
      ->required()
      ->check(CLI::IsMember({"protocol", "fig1", "fig2", "witness", "invariants"}));
  app.add_option("--config", config_path, "JSON config file (keys as the long flag names)");
  app.add_option("--out", out, "output path (default: stdout)");
  app.add_option("--format", format, "csv | json");
  app.add_option("--gamma", gamma, "relaxation rate [k_BT]");
  app.add_option("--eps1", eps1, "sweep start energy [k_BT]");
  app.add_option("--eps2", eps2, "sweep end energy [k_BT]");
  app.add_option("--tau", tau, "sweep duration [1/k_BT] (overrides --gamma-tau)");
  app.add_option("--gamma-tau", gamma_tau, "sweep duration in units of 1/gamma");
  app.add_option("--gamma-taus", gamma_taus, "comma-separated gamma*tau grid for fig1");
  app.add_option("--K", K, "number of reservoir levels");
  app.add_option("--dt", dt, "time step [1/k_BT] (overrides --gamma-dt)");
  app.add_option("--gamma-dt", gamma_dt, "bath time step in units of 1/gamma");
  app.add_option("--engine", engine, "quasistatic | master-equation | exact-bath");
  app.add_option("--n0", n0, "initial system population for fig1/fig2");
  app.add_option("--p", p, "memory weight of the one-body state");
  app.add_option("--phi", phi, "relative phase of the one-body state [rad]");
  app.add_option("--omega", omega, "tunnel coupling [k_BT]");
  app.add_option("--initial", initial, "one-body | diagonal");
  app.add_option("--n-m", n_m, "memory population of a diagonal initial state");
  app.add_option("--n-s", n_s, "system population of a diagonal initial state");
  app.add_option("--sequence", sequence, "comma-separated operations (rotate[:angle], thermalize[:n], swap, erase)");
  app.add_option("--seed", seed, "random seed (invariants)");
  app.add_option("--cases", cases, "randomised cases (invariants)");
  app.add_flag("--enforce-endpoint", enforce_endpoint, "erase S after the swap when it is not pure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) parts.push_back(item);
    }
    return parts;
  };

  try {
    ExperimentConfig c;
    if (config_path) c = load_config(*config_path, c);
    c.experiment = experiment;
    if (out) c.out = *out;
    if (format) c.format = parse_format(*format);
    if (gamma) c.gamma = *gamma;
    if (eps1) c.eps1 = *eps1;
    if (eps2) c.eps2 = *eps2;
    if (tau) c.tau = *tau;
    if (gamma_tau) c.gamma_tau = *gamma_tau;
    if (gamma_taus) {
      c.gamma_taus.clear();
      for (const auto& s : split(*gamma_taus)) c.gamma_taus.push_back(parse_number(s, "gamma_tau"));
    }
    if (K) c.K = *K;
    if (dt) c.dt = *dt;
    if (gamma_dt) c.gamma_dt = *gamma_dt;
    if (engine) c.engine = *engine;
    if (n0) c.n0 = *n0;
    if (p) c.p = *p;
    if (phi) c.phi = *phi;
    if (omega) c.omega = *omega;
    if (initial) c.initial = *initial;
    if (n_m) c.n_m = *n_m;
    if (n_s) c.n_s = *n_s;
    if (sequence) c.sequence = split(*sequence);
    if (seed) c.seed = *seed;
    if (cases) c.cases = *cases;
    if (enforce_endpoint) c.enforce_endpoint = true;
    c.validate();

    const Table table = run_experiment(c);
    if (table.meta.contains("warnings")) {
      for (const auto& w : table.meta["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
    }
    if (c.out.empty()) {
      write_table(table, c.format, std::cout);
    } else {
      std::ofstream os(c.out, std::ios::binary);
      if (!os) throw ValidationError("cannot open output file '" + c.out + "'");
      write_table(table, c.format, os);
    }
    return table.ok ? 0 : 1;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const EngineError& e) {
    std::cerr << "engine error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace fermitherm::cli
