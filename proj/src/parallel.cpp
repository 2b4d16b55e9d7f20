#include "fermitherm/parallel.hpp"

#include <exception>
#include <optional>

#include "fermitherm/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fermitherm::parallel {

namespace {

// Runs body(i) for i in [0, n) across threads; the first exception in index
// order is rethrown once all iterations are done.
template <class Body>
void parallel_for(long long n, Body&& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<master_eq::HeatPoint> sweep_heat_curve(double eps1, double eps2, double gamma,
                                                   std::span<const double> gamma_taus, double n0) {
  if (gamma_taus.empty()) throw ValidationError("sweep_heat_curve: empty gamma_tau list");
  std::vector<master_eq::HeatPoint> out(gamma_taus.size());
  parallel_for(static_cast<long long>(gamma_taus.size()),
               [&](std::size_t i) { out[i] = master_eq::heat_point(eps1, eps2, gamma, gamma_taus[i], n0); });
  return out;
}

std::vector<PointOutcome> sweep_heat_curve_outcomes(double eps1, double eps2, double gamma,
                                                    std::span<const double> gamma_taus, double n0) {
  std::vector<PointOutcome> out(gamma_taus.size());
  const auto n = static_cast<long long>(gamma_taus.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    auto& slot = out[static_cast<std::size_t>(i)];
    try {
      slot.point = master_eq::heat_point(eps1, eps2, gamma, gamma_taus[static_cast<std::size_t>(i)], n0);
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
  }
  return out;
}

std::vector<ensemble::SequenceResult> evaluate_sequences(std::span<const ensemble::SequenceCase> cases) {
  std::vector<ensemble::SequenceResult> out(cases.size());
  parallel_for(static_cast<long long>(cases.size()), [&](std::size_t i) { out[i] = ensemble::evaluate_case(cases[i]); });
  return out;
}

std::vector<bath::BathRun> simulate_batch_serial(std::span<const BathJob> jobs) {
  std::vector<bath::BathRun> out;
  out.reserve(jobs.size());
  for (const auto& j : jobs) out.push_back(bath::simulate(j.spec, j.schedule, j.n_s0, j.dt, j.options));
  return out;
}

std::vector<bath::BathRun> simulate_batch(std::span<const BathJob> jobs) {
  std::vector<std::optional<bath::BathRun>> slots(jobs.size());
  parallel_for(static_cast<long long>(jobs.size()), [&](std::size_t i) {
    const auto& j = jobs[i];
    slots[i] = bath::simulate(j.spec, j.schedule, j.n_s0, j.dt, j.options);
  });
  std::vector<bath::BathRun> out;
  out.reserve(jobs.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace fermitherm::parallel
