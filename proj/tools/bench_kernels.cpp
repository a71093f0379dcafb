// Timings for the data-parallel kernels against their serial twins:
// memory force reduction, history advance, pseudo-spectral nonlinearity,
// and the reference solver's convolution sweep.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "memheat/history.hpp"
#include "memheat/solver.hpp"

using namespace memheat;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, ms_since(t0));
  }
  return best;
}

}  // namespace

int main() {
  const int n_modes = 192;
  const int n_nodes = 1024;
  const int steps = 100;

  SpatialBasis basis(1.0, n_modes, 4 * n_modes + 1);
  MemoryKernel kernel = MemoryKernel::exponential(1.0, 1.0);
  auto rule = std::make_shared<const WeightedQuadrature>(
      build_quadrature(kernel, n_nodes, 40.0));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  std::vector<std::vector<ExpTerm>> terms(static_cast<std::size_t>(n_modes));
  for (auto& mode : terms) mode.push_back({unif(rng), 0.5 + 0.5 * unif(rng)});
  PastTrajectory phi = PastTrajectory::exp_mix(terms);
  HistoryField eta = lift(phi, rule, basis);

  SpectralField u;
  u.coeffs.resize(static_cast<std::size_t>(n_modes));
  for (auto& b : u.coeffs) b = unif(rng);
  std::vector<double> inc(static_cast<std::size_t>(n_modes));
  for (auto& x : inc) x = 1e-3 * unif(rng);

  Nonlinearity f({1.0, 0.0, -1.0, 0.0});

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#endif
  std::printf("%-22s %10s %10s %8s\n", "kernel", "serial ms", "openmp ms", "speedup");

  auto report = [](const char* name, double ts, double tp) {
    std::printf("%-22s %10.3f %10.3f %8.2fx\n", name, ts, tp, ts / tp);
  };

  {
    const auto serial = [&] {
      for (int k = 0; k < steps; ++k) (void)memory_force(eta, basis, Exec::serial);
    };
    const auto par = [&] {
      for (int k = 0; k < steps; ++k) (void)memory_force(eta, basis, Exec::openmp);
    };
    report("memory_force", time_best_of(3, serial), time_best_of(3, par));
  }
  {
    const AdvancePlan plan = make_advance_plan(*rule, 1e-3);
    const auto serial = [&] {
      HistoryField h = eta;
      for (int k = 0; k < steps; ++k) h = advance(h, plan, inc, u, Exec::serial);
    };
    const auto par = [&] {
      HistoryField h = eta;
      for (int k = 0; k < steps; ++k) h = advance(h, plan, inc, u, Exec::openmp);
    };
    report("advance", time_best_of(3, serial), time_best_of(3, par));
  }
  {
    const auto serial = [&] {
      for (int k = 0; k < steps; ++k) (void)nonlinear_galerkin(u, f, basis, Exec::serial);
    };
    const auto par = [&] {
      for (int k = 0; k < steps; ++k) (void)nonlinear_galerkin(u, f, basis, Exec::openmp);
    };
    report("nonlinear_galerkin", time_best_of(3, serial), time_best_of(3, par));
  }
  {
    // separate, smaller setup: the convolution solver is explicit and needs
    // dt within the RK2 stability bound of lambda_n
    const int n_ref = 16;
    SpatialBasis rbasis(1.0, n_ref, 2 * n_ref + 1);
    std::vector<std::vector<ExpTerm>> rterms(static_cast<std::size_t>(n_ref));
    for (auto& mode : rterms) mode.push_back({unif(rng), 1.0});
    PastTrajectory rphi = PastTrajectory::exp_mix(rterms);
    SpectralField ru;
    ru.coeffs.resize(static_cast<std::size_t>(n_ref));
    for (auto& b : ru.coeffs) b = 0.1 * unif(rng);
    ProblemConfig cfg{rbasis, kernel, rule, f, NonlocalCoefficient::constant(1.0),
                      SpectralField{}, 0.5, 5e-5, 0.15, Scheme::imex, Exec::serial};
    cfg.forcing.coeffs.assign(static_cast<std::size_t>(n_ref), 0.0);
    cfg.exec = Exec::serial;
    const auto serial = [&] {
      for (int r = 0; r < 4; ++r) (void)solve_reference(cfg, ru, rphi);
    };
    const auto par = [&] {
#pragma omp parallel for schedule(dynamic)
      for (int r = 0; r < 4; ++r) (void)solve_reference(cfg, ru, rphi);
    };
    report("reference_ensemble(4)", time_best_of(2, serial), time_best_of(2, par));
  }
  {
    // ensemble of Dafermos solves, parallel across runs
    SpatialBasis ebasis(1.0, 8, 17);
    auto erule = std::make_shared<const WeightedQuadrature>(
        build_quadrature(kernel, 128, 40.0));
    ProblemConfig cfg{ebasis, kernel, erule, f, NonlocalCoefficient::constant(1.0),
                      SpectralField{}, 0.45, 1e-3, 4.0, Scheme::imex, Exec::serial};
    cfg.forcing.coeffs.assign(8, 0.0);
    std::vector<SpectralField> starts(8);
    for (auto& s0 : starts) {
      s0.coeffs.resize(8);
      for (auto& b0 : s0.coeffs) b0 = unif(rng);
    }
    PastTrajectory ephi = PastTrajectory::exp_mix(
        std::vector<std::vector<ExpTerm>>(8));
    const auto serial = [&] {
      for (int r = 0; r < 8; ++r) (void)solve(cfg, starts[(size_t)r], ephi);
    };
    const auto par = [&] {
#pragma omp parallel for schedule(dynamic)
      for (int r = 0; r < 8; ++r) (void)solve(cfg, starts[(size_t)r], ephi);
    };
    report("solve_ensemble(8)", time_best_of(2, serial), time_best_of(2, par));
  }
  return 0;
}
