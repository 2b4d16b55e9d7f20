#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "fermitherm/ensemble.hpp"
#include "fermitherm/protocol.hpp"

using namespace fermitherm;
using namespace fermitherm::protocol;
using std::numbers::ln2;
using std::numbers::pi;

namespace {

const Complex I{0.0, 1.0};

CorrelationMatrix diag2(double n_m, double n_s) {
  const std::array<double, 2> occ{n_m, n_s};
  return CorrelationMatrix::diagonal(occ);
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

void check_first_law(const ThermoLedger& ledger) {
  for (const auto& r : ledger.records) {
    CHECK(std::abs((r.energy - ledger.initial().energy) - (r.work + r.heat)) < 1e-9);
  }
}

}  // namespace

TEST_CASE("one-body state preparation") {
  const auto c = prepare_one_body_state(0.5, pi / 2);
  ComplexMatrix expected(2, 2);
  expected << 0.5, -0.5 * I, 0.5 * I, 0.5;
  CHECK(max_abs(c.matrix() - expected) < 1e-15);
  CHECK(c.spectrum()(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c.spectrum()(1) == doctest::Approx(1.0).epsilon(1e-12));

  for (double phi : {0.0, 1.0, 4.0}) {
    CHECK(max_abs(prepare_one_body_state(1.0, phi).matrix() - diag2(1.0, 0.0).matrix()) < 1e-15);
  }
  const auto real = prepare_one_body_state(0.5, 0.0);
  CHECK(real(0, 1).real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(real(0, 1).imag()) < 1e-15);
  CHECK(std::abs(total_entropy(real)) < 1e-10);
  CHECK_THROWS_AS(prepare_one_body_state(1.1, 0.0), ValidationError);
  CHECK_THROWS_AS(prepare_one_body_state(-0.1, 0.0), ValidationError);
}

TEST_CASE("step 1 rotation") {
  for (double omega : {0.1, 1.0, 7.5}) {
    const auto out = step1_rotate(prepare_one_body_state(0.5, pi / 2), omega);
    CHECK(std::abs(out.occupation(kMemory)) < 1e-12);
    CHECK(out.occupation(kSystem) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(out(0, 1)) < 1e-12);
  }
  const auto mixed = step1_rotate(diag2(1.0, 0.0), 1.0);
  CHECK(mixed.occupation(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mixed.occupation(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(mixed(0, 1)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(step1_rotate(CorrelationMatrix::vacuum(3), 1.0), ValidationError);
}

TEST_CASE("memory-emptying angle") {
  CHECK(memory_emptying_angle(prepare_one_body_state(0.5, pi / 2)) == doctest::Approx(pi / 4));
  CHECK(memory_emptying_angle(prepare_one_body_state(0.5, -pi / 2)) == doctest::Approx(3 * pi / 4));
  CHECK(memory_emptying_angle(diag2(1.0, 0.0)) == doctest::Approx(pi / 2));
  CHECK(memory_emptying_angle(diag2(0.5, 0.5)) == 0.0);
  for (double p : {0.2, 0.5, 0.9}) {
    for (double phi : {0.3, 1.5, 2.5, -1.0}) {
      const auto c = prepare_one_body_state(p, phi);
      const double a = memory_emptying_angle(c);
      CHECK(a >= 0.0);
      CHECK(a < pi);
      const double best = step1_rotate(c, 1.0, a).occupation(kMemory);
      for (double other = 0.0; other < pi; other += 0.05) CHECK(best <= step1_rotate(c, 1.0, other).occupation(kMemory) + 1e-12);
    }
  }
}

TEST_CASE("step 2 quasistatic heat") {
  CHECK(step2_quasistatic(1.0).heat == doctest::Approx(ln2).epsilon(1e-15));
  CHECK(step2_quasistatic(1.0).n_final == 0.5);
  CHECK(step2_quasistatic(0.5).heat == 0.0);
  CHECK(step2_quasistatic(0.993307).heat == doctest::Approx(0.652966).epsilon(1e-5));
  CHECK_THROWS_AS(step2_quasistatic(1.5), ValidationError);
}

TEST_CASE("step 3 swap") {
  const auto a = step3_swap(diag2(0.0, 0.5), 1.0);
  CHECK(a.occupation(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(a.occupation(1)) < 1e-12);
  for (auto [x, y] : {std::pair{0.1, 0.8}, std::pair{1.0, 0.3}, std::pair{0.6, 0.6}}) {
    const auto s = step3_swap(diag2(x, y), 2.0);
    CHECK(s.occupation(0) == doctest::Approx(y).epsilon(1e-12));
    CHECK(s.occupation(1) == doctest::Approx(x).epsilon(1e-12));
    CHECK(std::abs(s(0, 1)) < 1e-12);
  }
  CHECK_THROWS_AS(step3_swap(CorrelationMatrix::vacuum(1), 1.0), ValidationError);
}

TEST_CASE("ideal purification uses exactly the coherent information") {
  const auto ledger = run_purification({});
  REQUIRE(ledger.records.size() == 4);
  CHECK(ledger.minus_q() == doctest::Approx(-ln2).epsilon(1e-12));
  CHECK(std::abs(ledger.minus_q() + ledger.coherent_information) < 1e-12);
  CHECK(ledger.system_purified);
  CHECK(ledger.memory_restored);
  CHECK(ledger.final().s_s <= 1e-6);
  CHECK(std::abs(ledger.final().n_m - 0.5) <= 1e-6);
  CHECK(ledger.min_sigma() >= -1e-6);
  CHECK(std::abs(ledger.final().sigma) < 1e-9);
  check_first_law(ledger);
  const auto report = cooling_bound_check(ledger, false);
  CHECK(report.passed);
  CHECK(report.minus_q == doctest::Approx(-ln2));
}

TEST_CASE("diagonal input: no cooling without entanglement") {
  ProtocolConfig cfg;
  cfg.initial_state = diag2(0.5, 0.5);
  const auto ledger = run_purification(cfg);
  CHECK(std::abs(ledger.minus_q()) < 1e-12);
  CHECK_FALSE(ledger.system_purified);
  CHECK(ledger.memory_restored);
  const auto report = cooling_bound_check(ledger, true);
  CHECK(report.passed);
  CHECK(report.violations.empty());
  check_first_law(ledger);
}

TEST_CASE("localized particle with the erasure endpoint") {
  ProtocolConfig cfg;
  cfg.p = 1.0;
  cfg.step1_angle = pi / 4;  // creates coherence
  cfg.enforce_endpoint = true;
  const auto ledger = run_purification(cfg);
  CHECK(ledger.records.back().step == "step4-erase");
  CHECK(ledger.system_purified);
  CHECK(ledger.memory_restored);
  CHECK(ledger.minus_q() >= -1e-9);
  CHECK(cooling_bound_check(ledger, true).passed);

  ProtocolConfig automatic;
  automatic.p = 1.0;
  automatic.enforce_endpoint = true;
  const auto direct = run_purification(automatic);
  CHECK(direct.step1_angle == doctest::Approx(pi / 2));
  CHECK(direct.minus_q() >= -1e-9);
  CHECK(direct.system_purified);
}

TEST_CASE("phase invariance of the completed protocol") {
  for (double p : {0.5, 0.3, 0.8}) {
    ProtocolConfig a, b;
    a.p = b.p = p;
    a.phi = pi / 2;
    b.phi = -pi / 2;
    const auto la = run_purification(a);
    const auto lb = run_purification(b);
    if (p == 0.5) {
      CHECK(la.step1_angle == doctest::Approx(pi / 4));
      CHECK(lb.step1_angle == doctest::Approx(3 * pi / 4));
    }
    REQUIRE(la.records.size() == lb.records.size());
    for (std::size_t k = 0; k < la.records.size(); ++k) {
      CHECK(std::abs(la.records[k].heat - lb.records[k].heat) < 1e-9);
      CHECK(std::abs(la.records[k].s_ms - lb.records[k].s_ms) < 1e-9);
      CHECK(std::abs(la.records[k].s_s - lb.records[k].s_s) < 1e-9);
      CHECK(std::abs(la.records[k].s_m - lb.records[k].s_m) < 1e-9);
    }
    CHECK(std::abs(la.minus_q() + la.coherent_information) < 1e-9);
  }
}

TEST_CASE("master-equation engine") {
  ProtocolConfig cfg;
  cfg.engine = Engine::master_equation;
  cfg.schedule = {-5.0, 1.0, 10.0 / 0.02};
  const auto ledger = run_purification(cfg);
  CHECK(ledger.minus_q() > -0.653);
  CHECK(ledger.minus_q() < 0.0);
  CHECK(ledger.minus_q() > -ledger.coherent_information + 1e-9);
  CHECK(*ledger.gamma_tf == doctest::Approx(9.3).epsilon(0.01));
  CHECK(ledger.system_purified);
  CHECK(ledger.memory_restored);
  CHECK(ledger.min_sigma() >= -1e-6);
  check_first_law(ledger);
  CHECK(cooling_bound_check(ledger, false).passed);
}

TEST_CASE("exact-bath engine on a coarse grid") {
  ProtocolConfig cfg;
  cfg.engine = Engine::exact_bath;
  cfg.schedule = {-5.0, 1.0, 10.0 / 0.02};
  cfg.dt = 15.0;  // gamma dt = 0.3
  const auto ledger = run_purification(cfg);
  REQUIRE(ledger.gamma_tf.has_value());
  CHECK(*ledger.gamma_tf == doctest::Approx(9.3).epsilon(0.1));
  CHECK(ledger.minus_q() == doctest::Approx(-0.42).epsilon(0.15));
  CHECK(ledger.minus_q() > -ledger.coherent_information);
  // t_f is interpolated linearly between coarse samples, so the restored
  // memory population is only as good as the grid.
  CHECK(std::abs(ledger.final().n_m - 0.5) < 0.01);
  CHECK(ledger.min_sigma() >= -1e-4);
  CHECK(std::abs(ledger.interaction_residual) > 0.0);
  CHECK(std::abs(ledger.interaction_residual) < 0.05);
}

TEST_CASE("unitary-only sequences produce no heat, work or entropy") {
  const std::vector<Operation> ops{Rotate{0.3}, Swap{}, Rotate{1.1}};
  const auto ledger = run_sequence(diag2(0.7, 0.2), ops);
  for (const auto& r : ledger.records) {
    CHECK(r.heat == 0.0);
    CHECK(r.work == 0.0);
    CHECK(std::abs(r.sigma) < 1e-12);
  }
  const auto report = cooling_bound_check(ledger, true);
  CHECK(report.passed);
  CHECK(report.minus_q == 0.0);
}

TEST_CASE("cooling bound check reports violations") {
  const auto entangled = run_purification({});
  const auto report = cooling_bound_check(entangled, true);
  CHECK_FALSE(report.passed);
  REQUIRE_FALSE(report.violations.empty());
  ThermoLedger tampered = entangled;
  tampered.records[2].sigma = -0.1;
  const auto r2 = cooling_bound_check(tampered, false);
  CHECK_FALSE(r2.passed);
  CHECK(r2.min_sigma == doctest::Approx(-0.1));
}

TEST_CASE("witness values") {
  CHECK(witness_value(0.5, 0.5, 1.0, 0.0, 0.0) == doctest::Approx(-ln2).epsilon(1e-15));
  CHECK(witness_value(0.5, 0.5, 0.5, 0.5, 0.0) == doctest::Approx(ln2).epsilon(1e-15));
  CHECK(witness_value(0.0, 0.0, 0.0, 0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(witness_value(1.5, 0.5, 0.5, 0.5, 0.0), ValidationError);
  const std::vector<Operation> rotate{Rotate{pi / 4}};
  const auto ledger = run_sequence(prepare_one_body_state(0.5, pi / 2), rotate);
  CHECK(std::abs(witness_value(ledger) + ln2) < 1e-12);
  const auto identity = run_sequence(diag2(0.5, 0.5), std::vector<Operation>{});
  CHECK(witness_value(identity) == doctest::Approx(ln2).epsilon(1e-15));
}

TEST_CASE("operation primitives") {
  const auto erased = apply_operation(diag2(0.3, 0.6), Erase{});
  CHECK(erased.state.occupation(kSystem) == 0.0);
  CHECK(std::abs(erased.heat + binary_entropy(0.6)) < 1e-15);
  const auto th = quasistatic_thermalize(prepare_one_body_state(0.5, pi / 2), 0.5);
  CHECK(std::abs(th.state(0, 1)) == 0.0);
  CHECK(th.heat == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(quasistatic_thermalize(diag2(0.3, 0.6), 1.5), ValidationError);
  CHECK(describe(Swap{}) == "swap");
  CHECK(describe(Erase{}) == "erase");
  CHECK(describe(Thermalize{0.25}).rfind("thermalize:0.25", 0) == 0);
  const auto closed = run_sequence(diag2(0.4, 0.9), closure_operations(0.4));
  CHECK(closed.system_purified);
  CHECK(closed.memory_restored);
  CHECK(closed.minus_q() >= -1e-9);
}

TEST_CASE("engine names and config validation") {
  CHECK(parse_engine("quasistatic") == Engine::quasistatic);
  CHECK(parse_engine("master-equation") == Engine::master_equation);
  CHECK(parse_engine("exact-bath") == Engine::exact_bath);
  CHECK(to_string(Engine::exact_bath) == "exact-bath");
  CHECK_THROWS_AS(parse_engine("euler"), ValidationError);
  ProtocolConfig bad;
  bad.p = 2.0;
  CHECK_THROWS_AS(run_purification(bad), ValidationError);
  ProtocolConfig no_rate;
  no_rate.engine = Engine::master_equation;
  no_rate.gamma = 0.0;
  CHECK_THROWS_AS(run_purification(no_rate), ValidationError);
  ProtocolConfig three;
  three.initial_state = CorrelationMatrix::vacuum(3);
  CHECK_THROWS_AS(run_purification(three), ValidationError);
  ProtocolConfig stuck;
  stuck.engine = Engine::master_equation;
  stuck.schedule = {-5.0, -1.0, 100.0};
  CHECK_THROWS_AS(run_purification(stuck), EngineError);
}

TEST_CASE("separable ensembles never beat the cooling bound or the witness") {
  const auto closed = ensemble::separable_cases(300, 5, true);
  for (const auto& r : ensemble::evaluate_sequences_serial(closed)) {
    CHECK(r.minus_q >= -1e-9);
    CHECK(r.witness >= -1e-9);
    CHECK(r.min_sigma >= -1e-6);
    CHECK(r.system_purified);
    CHECK(r.memory_restored);
  }
  const auto open = ensemble::separable_cases(300, 6, false);
  for (const auto& r : ensemble::evaluate_sequences_serial(open)) {
    CHECK(r.witness >= -1e-9);
    CHECK(r.min_sigma >= -1e-6);
  }
}
