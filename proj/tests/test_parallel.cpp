// The OpenMP kernels parallelize over independent output elements only, so
// they must agree bit-for-bit with their serial twins.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "memheat/solver.hpp"

using namespace memheat;

namespace {

struct Fixture {
  SpatialBasis basis{1.0, 24, 49};
  MemoryKernel kernel = MemoryKernel::exponential(1.0, 1.0);
  std::shared_ptr<const WeightedQuadrature> rule =
      std::make_shared<const WeightedQuadrature>(
          build_quadrature(kernel, 128, 40.0));
  PastTrajectory phi;
  HistoryField eta;
  SpectralField u;
  std::vector<double> inc;

  Fixture() : phi(make_phi()) {
    eta = lift(phi, rule, basis);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    u.coeffs.resize(24);
    inc.resize(24);
    for (auto& x : u.coeffs) x = unif(rng);
    for (auto& x : inc) x = 1e-3 * unif(rng);
  }

  static PastTrajectory make_phi() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<std::vector<ExpTerm>> terms(24);
    for (auto& mode : terms) {
      mode.push_back({unif(rng), 0.4 + 0.5 * std::fabs(unif(rng))});
      mode.push_back({0.3 * unif(rng), 1.5});
    }
    return PastTrajectory::exp_mix(terms);
  }
};

}  // namespace

TEST_CASE("memory_force: serial == openmp bitwise") {
  Fixture fx;
  const auto a = memory_force(fx.eta, fx.basis, Exec::serial);
  const auto b = memory_force(fx.eta, fx.basis, Exec::openmp);
  REQUIRE(a.size() == b.size());
  for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == b[j]);
}

TEST_CASE("advance: serial == openmp bitwise") {
  Fixture fx;
  const auto a = advance(fx.eta, fx.inc, 1e-3, fx.u, Exec::serial);
  const auto b = advance(fx.eta, fx.inc, 1e-3, fx.u, Exec::openmp);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    CHECK(a.values[i] == b.values[i]);
    CHECK(a.slopes[i] == b.slopes[i]);
  }
}

TEST_CASE("nonlinear_galerkin: serial == openmp bitwise") {
  Fixture fx;
  Nonlinearity f({1.0, 0.0, -1.0, 0.0});
  const auto a = nonlinear_galerkin(fx.u, f, fx.basis, Exec::serial);
  const auto b = nonlinear_galerkin(fx.u, f, fx.basis, Exec::openmp);
  for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == b[j]);
}

TEST_CASE("whole solves: serial == openmp bitwise") {
  Fixture fx;
  ProblemConfig cfg{fx.basis, fx.kernel, fx.rule,
                    Nonlinearity({1.0, 0.0, -1.0, 0.0}),
                    NonlocalCoefficient::constant(1.0), SpectralField{},
                    0.45,     5e-4,      0.2,    Scheme::imex, Exec::serial};
  cfg.forcing.coeffs.assign(24, 0.0);
  cfg.forcing.coeffs[0] = 0.3;
  const auto a = solve(cfg, fx.u, fx.phi);
  cfg.exec = Exec::openmp;
  const auto b = solve(cfg, fx.u, fx.phi);
  REQUIRE(a.trajectory.coeffs.size() == b.trajectory.coeffs.size());
  for (std::size_t i = 0; i < a.trajectory.coeffs.size(); ++i)
    CHECK(a.trajectory.coeffs[i] == b.trajectory.coeffs[i]);
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].energy == b.records[k].energy);
    CHECK(a.records[k].x_norm == b.records[k].x_norm);
  }
}

TEST_CASE("reference solver: serial == openmp bitwise") {
  Fixture fx;
  ProblemConfig cfg{fx.basis, fx.kernel, fx.rule, std::nullopt,
                    NonlocalCoefficient::constant(1.0), SpectralField{},
                    0.45,     2e-3,      0.25,   Scheme::imex, Exec::serial};
  cfg.forcing.coeffs.assign(24, 0.0);
  const auto a = solve_reference(cfg, fx.u, fx.phi);
  cfg.exec = Exec::openmp;
  const auto b = solve_reference(cfg, fx.u, fx.phi);
  REQUIRE(a.coeffs.size() == b.coeffs.size());
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    CHECK(a.coeffs[i] == b.coeffs[i]);
}
