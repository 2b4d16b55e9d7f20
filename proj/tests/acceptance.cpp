// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fermitherm/ensemble.hpp"
#include "fermitherm/exact_dynamics.hpp"
#include "fermitherm/experiments.hpp"
#include "fermitherm/master_equation.hpp"
#include "fermitherm/parallel.hpp"
#include "fermitherm/protocol.hpp"
#include "fock_oracle.hpp"

using namespace fermitherm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    passed = passed && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// The reference bath run is shared by criteria 3, 4, 5 and 8.
struct ReferenceRun {
  bath::BathRun run;
  bath::DeviationReport report;
  double seconds = 0.0;
};

ReferenceRun reference_run() {
  ReferenceRun r;
  bath::ReservoirSpec spec;  // K = 200, gamma = 0.02
  const double gamma = spec.gamma;
  bath::SimulationOptions opts;
  opts.record_energy_audit = true;
  const auto t0 = Clock::now();
  r.run = bath::simulate(spec, {-5.0, 1.0, 10.0 / gamma}, 1.0, 0.06 / gamma, opts);
  r.seconds = seconds_since(t0);
  r.report = bath::compare_with_master_equation(r.run, gamma);
  return r;
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto ledger = protocol::run_purification({});
  const double elapsed = seconds_since(t0);
  o.require(std::abs(ledger.minus_q() + std::numbers::ln2) <= 1e-12, "-Q = " + fmt("%.15f", ledger.minus_q()));
  o.require(std::abs(ledger.minus_q() + ledger.coherent_information) <= 1e-12,
            "|-Q + I| = " + fmt("%.2e", std::abs(ledger.minus_q() + ledger.coherent_information)));
  o.require(elapsed < 1e-3, "runtime " + fmt("%.3f", elapsed * 1e3) + " ms < 1 ms");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto grid = cli::default_fig1_grid();
  const auto t0 = Clock::now();
  const auto curve = parallel::sweep_heat_curve(-5.0, 1.0, 0.02, grid);
  const double elapsed = seconds_since(t0);
  const auto crossing = master_eq::zero_crossing(curve);
  o.require(crossing && *crossing >= 3.5 && *crossing <= 4.5,
            "zero crossing gamma*tau = " + (crossing ? fmt("%.4f", *crossing) : std::string("none")) + " in [3.5, 4.5]");
  const auto at100 = std::find_if(curve.begin(), curve.end(), [](const auto& p) { return std::abs(p.gamma_tau - 100.0) < 1e-9; });
  const double target = -master_eq::quasistatic_limit(-5.0);
  o.require(at100 != curve.end() && std::abs(at100->minus_q - target) <= 0.02,
            "-Q(100) = " + fmt("%.5f", at100->minus_q) + " vs " + fmt("%.5f", target) + " +- 0.02");
  o.require(elapsed < 1.0, "50-point grid " + fmt("%.3f", elapsed) + " s < 1 s");
  return o;
}

Outcome criterion3(const ReferenceRun& ref) {
  Outcome o;
  const auto gtf = ref.run.gamma_tf();
  o.require(gtf && std::abs(*gtf - 9.3) <= 0.5, "gamma*t_f = " + fmt("%.4f", gtf.value_or(NAN)) + " (9.3 +- 0.5)");
  o.require(ref.run.minus_q_tf && std::abs(*ref.run.minus_q_tf + 0.42) <= 0.05,
            "-Q(t_f) = " + fmt("%.4f", ref.run.minus_q_tf.value_or(NAN)) + " (-0.42 +- 0.05)");
  o.require(ref.seconds < 30.0, fmt("%.0f", static_cast<double>(ref.run.eigendecompositions)) +
                                    " eigendecompositions in " + fmt("%.2f", ref.seconds) + " s < 30 s");
  return o;
}

Outcome criterion4(const ReferenceRun& ref) {
  Outcome o;
  o.require(ref.report.max_population_deviation <= 0.02,
            "max |n_exact - n_master| = " + fmt("%.5f", ref.report.max_population_deviation) + " <= 0.02 over " +
                fmt("%.0f", static_cast<double>(ref.report.samples)) + " samples");
  return o;
}

Outcome criterion5(const ReferenceRun& ref) {
  Outcome o;
  const double exact_min = *std::min_element(ref.run.sigma.begin(), ref.run.sigma.end());
  o.require(exact_min >= -1e-4, "exact min sigma = " + fmt("%.3e", exact_min) + " >= -1e-4");

  double me_min = INFINITY;
  const auto grid = cli::default_fig1_grid();
  for (const auto& p : parallel::sweep_heat_curve(-5.0, 1.0, 0.02, grid)) {
    me_min = std::min(me_min, master_eq::entropy_production(1.0, 0.5, p.minus_q));
  }
  for (double n0 : {0.6, 0.9, fermi_occupation(-5.0)}) {
    for (double gt : {0.01, 1.0, 10.0, 100.0}) {
      me_min = std::min(me_min, master_eq::entropy_production(n0, 0.5, master_eq::heat_point(-5.0, 1.0, 0.02, gt, n0).minus_q));
    }
  }
  protocol::ProtocolConfig me;
  me.engine = protocol::Engine::master_equation;
  for (double gt : {0.5, 10.0, 100.0}) {
    me.schedule = {-5.0, 1.0, gt / me.gamma};
    me_min = std::min(me_min, protocol::run_purification(me).min_sigma());
  }
  o.require(me_min >= -1e-6, "master-equation min sigma = " + fmt("%.3e", me_min) + " >= -1e-6");

  double qs_min = INFINITY;
  for (double p : {0.1, 0.5, 0.9}) {
    for (double phi : {0.0, std::numbers::pi / 2, 2.0}) {
      protocol::ProtocolConfig cfg;
      cfg.p = p;
      cfg.phi = phi;
      cfg.enforce_endpoint = true;
      qs_min = std::min(qs_min, protocol::run_purification(cfg).min_sigma());
    }
  }
  for (const auto& r : parallel::evaluate_sequences(ensemble::separable_cases(1000, 77, false))) qs_min = std::min(qs_min, r.min_sigma);
  o.require(qs_min >= -1e-6, "quasistatic min sigma = " + fmt("%.3e", qs_min) + " >= -1e-6");
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto closed = parallel::evaluate_sequences(ensemble::separable_cases(1000, 20240611, true));
  const auto open = parallel::evaluate_sequences(ensemble::separable_cases(1000, 20240612, false));
  double min_mq = INFINITY, min_w = INFINITY;
  bool all_conform = true;
  for (const auto& r : closed) {
    min_mq = std::min(min_mq, r.minus_q);
    min_w = std::min(min_w, r.witness);
    all_conform = all_conform && r.system_purified && r.memory_restored;
  }
  for (const auto& r : open) min_w = std::min(min_w, r.witness);
  o.require(all_conform, "1000 closed sequences purify S and restore M");
  o.require(min_mq >= -1e-9, "min -Q = " + fmt("%.3e", min_mq) + " >= -1e-9");
  o.require(min_w >= -1e-9, "min witness over 2000 sequences = " + fmt("%.3e", min_w) + " >= -1e-9");
  const std::vector<protocol::Operation> rotate{protocol::Rotate{std::numbers::pi / 4}};
  const auto ent = protocol::run_sequence(protocol::prepare_one_body_state(0.5, std::numbers::pi / 2), rotate);
  const double w = protocol::witness_value(ent);
  o.require(std::abs(w + std::numbers::ln2) <= 1e-12, "entangled witness = " + fmt("%.15f", w) + " (-ln 2 +- 1e-12)");
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> times(0.0, 5.0);
  double worst_s = 0.0, worst_c = 0.0;
  int cases = 0;
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 100; ++trial, ++cases) {
      const auto c = ensemble::random_correlation(n, rng);
      const auto h = ensemble::random_hamiltonian(n, rng);
      const double t = times(rng);
      const ComplexMatrix rho = fock::density_matrix(c.matrix());
      worst_s = std::max(worst_s, std::abs(fock::von_neumann(rho) - total_entropy(c)));
      for (Index m = 0; m < n; ++m) {
        const std::vector<Index> one{m};
        worst_s = std::max(worst_s, std::abs(fock::subset_entropy(c.matrix(), one) - subsystem_entropy(c, one)));
      }
      if (n == 3) {
        const std::vector<Index> pair{2, 0};
        worst_s = std::max(worst_s, std::abs(fock::subset_entropy(c.matrix(), pair) - subsystem_entropy(c, pair)));
      }
      const ComplexMatrix rho_t = fock::evolve_density(rho, fock::many_body_hamiltonian(h.matrix()), t);
      const auto ct = evolve_step(c, h, t);
      worst_c = std::max(worst_c, (fock::correlation_of(rho_t, n) - ct.matrix()).cwiseAbs().maxCoeff());
      worst_s = std::max(worst_s, std::abs(fock::von_neumann(rho_t) - total_entropy(ct)));
    }
  }
  o.require(worst_s <= 1e-8, "entropy deviation " + fmt("%.2e", worst_s) + " <= 1e-8");
  o.require(worst_c <= 1e-8, "evolution deviation " + fmt("%.2e", worst_c) + " <= 1e-8 over " +
                                 fmt("%.0f", static_cast<double>(cases)) + " random states");
  return o;
}

Outcome criterion8(const ReferenceRun& ref) {
  Outcome o;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> times(0.0, 3.0);
  double d_trace = 0.0, d_spec = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index dim = 2 + trial % 9;
    const auto c = ensemble::random_correlation(dim, rng);
    const auto h = ensemble::random_hamiltonian(dim, rng);
    const auto next = evolve_step(c, h, times(rng));
    d_trace = std::max(d_trace, std::abs(next.trace() - c.trace()));
    d_spec = std::max(d_spec, (next.spectrum() - c.spectrum()).cwiseAbs().maxCoeff());
  }
  for (double tr : ref.run.trace) d_trace = std::max(d_trace, std::abs(tr - ref.run.trace.front()));
  const auto initial = bath::initial_state(ref.run.spec, 1.0);
  d_spec = std::max(d_spec, (ref.run.final_state.spectrum() - initial.spectrum()).cwiseAbs().maxCoeff());
  o.require(d_trace <= 1e-10, "trace drift " + fmt("%.2e", d_trace));
  o.require(d_spec <= 1e-10, "spectrum drift " + fmt("%.2e", d_spec));

  double d_flat = 0.0, d_jump = 0.0;
  for (const auto& e : ref.run.energy_audit) {
    d_flat = std::max(d_flat, std::abs(e.end_of_step - e.after_quench));
    d_jump = std::max(d_jump, std::abs((e.after_quench - e.before_quench) - (e.eps_new - e.eps_old) * e.n_s));
  }
  o.require(d_flat <= 1e-10, "inter-quench energy drift " + fmt("%.2e", d_flat));
  o.require(d_jump <= 1e-10, "quench jump vs d(eps)*n_S " + fmt("%.2e", d_jump) + " over " +
                                 fmt("%.0f", static_cast<double>(ref.run.energy_audit.size())) + " steps");
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& body) {
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s [%d] %s: %s\n", o.passed ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.passed) ++failures;
  };

  report(1, "quasistatic protocol heat", criterion1);
  report(2, "heat curve versus sweep time", criterion2);
  ReferenceRun ref;
  bool have_ref = true;
  try {
    ref = reference_run();
  } catch (const std::exception& e) {
    have_ref = false;
    std::printf("reference bath run failed: %s\n", e.what());
  }
  auto with_ref = [&](auto fn) {
    return [&, fn]() {
      if (!have_ref) throw std::runtime_error("no reference run");
      return fn(ref);
    };
  };
  report(3, "exact bath dynamics at the reference parameters", with_ref(criterion3));
  report(4, "master-equation versus exact populations", with_ref(criterion4));
  report(5, "second-law suite", with_ref(criterion5));
  report(6, "separable-state cooling bound and witness", criterion6);
  report(7, "correlation-matrix oracle", criterion7);
  report(8, "conservation suite", with_ref(criterion8));
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
