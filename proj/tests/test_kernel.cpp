#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "memheat/kernel.hpp"
#include "memheat/numerics.hpp"
#include "oracles.hpp"

using namespace memheat;

TEST_CASE("kernel construction and parameter errors") {
  CHECK_NOTHROW(MemoryKernel::exponential(1.0, 1.0));
  CHECK_NOTHROW(MemoryKernel::singular(1.0, 0.5));
  CHECK_THROWS_AS(MemoryKernel::exponential(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(MemoryKernel::exponential(1.0, -2.0), std::invalid_argument);
  CHECK_THROWS_AS(MemoryKernel::singular(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(MemoryKernel::singular(1.0, -0.1), std::invalid_argument);
}

TEST_CASE("mu evaluation") {
  const auto expk = MemoryKernel::exponential(1.0, 1.0);
  CHECK(expk.mu(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  const auto sing = MemoryKernel::singular(1.0, 0.5);
  CHECK(sing.mu(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(sing.mu(0.0), std::domain_error);
  CHECK_THROWS_AS(sing.mu_prime(0.0), std::domain_error);
  CHECK_THROWS_AS(expk.k_of(-0.1), std::domain_error);
}

TEST_CASE("k_of closed forms against the quadrature oracle") {
  const auto expk = MemoryKernel::exponential(1.0, 1.0);
  CHECK(expk.k_of(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(expk.k_of(2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));

  const auto sing = MemoryKernel::singular(1.0, 0.5);
  // oracle: int_0^inf e^{-s} s^{-1/2} ds computed by singular-substitution
  const double k0_oracle =
      oracle::integrate_singular([](double) { return 1.0; }, 1.0, 0.5, 50.0);
  CHECK(k0_oracle == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
  CHECK(sing.k_of(0.0) == doctest::Approx(k0_oracle).epsilon(1e-10));

  // t > 0 tail against the oracle
  const double t = 0.7;
  const double tail_oracle = oracle::integrate_tail(
      [](double s) { return std::exp(-s) * std::pow(s, -0.5); }, t, 1.0);
  CHECK(sing.k_of(t) == doctest::Approx(tail_oracle).epsilon(1e-10));
}

TEST_CASE("k_of monotone decreasing with exponentially weighted decay") {
  const auto sing = MemoryKernel::singular(2.0, 0.25);
  const double gamma = 1.0;  // < delta
  double prev = sing.k_of(0.0);
  double prev_weighted = prev;
  for (double t : oracle::log_grid(1e-3, 30.0, 40)) {
    const double k = sing.k_of(t);
    CHECK(k <= prev + 1e-15);
    CHECK(k <= sing.mu(t) / sing.delta() * (1.0 + 1e-12));
    prev = k;
    const double weighted = k * std::exp(gamma * t);
    if (t > 1.0) CHECK(weighted < prev_weighted);
    if (t > 1.0) prev_weighted = weighted;
  }
  CHECK(sing.k_of(30.0) * std::exp(gamma * 30.0) < 1e-10);
}

TEST_CASE("hypothesis validation") {
  const auto grid = oracle::log_grid(1e-3, 40.0, 200);
  SUBCASE("singular kernel passes at its own delta") {
    const auto rep = validate_hypotheses(MemoryKernel::singular(1.0, 0.5), grid, 1.0);
    CHECK(rep.h1_nonneg);
    CHECK(rep.h1_monotone);
    CHECK(rep.h1_integrable);
    CHECK(rep.h2_pass);
    CHECK(rep.h2_margin >= 0.0);
  }
  SUBCASE("exponential family is exact: passes iff delta_test <= delta") {
    const auto k = MemoryKernel::exponential(1.0, 1.0);
    CHECK(validate_hypotheses(k, grid, 0.5).h2_pass);
    CHECK(validate_hypotheses(k, grid, 1.0).h2_pass);
    CHECK(validate_hypotheses(k, grid, 1.0).h2_margin == doctest::Approx(0.0));
    const auto fail = validate_hypotheses(k, grid, 2.0);
    CHECK_FALSE(fail.h2_pass);
    CHECK(fail.h2_margin < 0.0);
  }
  SUBCASE("report serializes to the documented JSON keys") {
    const auto rep = validate_hypotheses(MemoryKernel::exponential(1.0, 1.0), grid, 1.0);
    const std::string js = rep.to_json();
    for (const char* key : {"h1_nonneg", "h1_monotone", "h1_integrable",
                            "h2_pass", "h2_margin"})
      CHECK(js.find(key) != std::string::npos);
  }
  SUBCASE("preconditions") {
    std::vector<double> bad = {1.0, -2.0};
    CHECK_THROWS_AS(
        validate_hypotheses(MemoryKernel::exponential(1.0, 1.0), bad, 1.0),
        std::invalid_argument);
    CHECK_THROWS_AS(validate_hypotheses(MemoryKernel::exponential(1.0, 1.0),
                                        std::vector<double>{}, 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("quadrature mass telescopes to k(0)") {
  SUBCASE("exponential") {
    const auto k = MemoryKernel::exponential(1.0, 1.0);
    const auto rule = build_quadrature(k, 128, 40.0);
    CHECK(rule.mass == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rule.mass <= k.k0() * (1.0 + 1e-12));
  }
  SUBCASE("singular") {
    const auto k = MemoryKernel::singular(1.0, 0.5);
    const auto rule = build_quadrature(k, 64, 30.0);
    CHECK(rule.mass == doctest::Approx(k.k0()).epsilon(1e-10));
  }
  SUBCASE("mass defect is within the recorded tolerance") {
    for (int fam = 0; fam < 2; ++fam) {
      const auto k = fam == 0 ? MemoryKernel::exponential(1.3, 0.9)
                              : MemoryKernel::singular(0.9, 0.6);
      const auto rule = build_quadrature(k, 96, default_s_max(k));
      CHECK(std::fabs(rule.mass - k.k0()) / k.k0() <= rule.tol);
    }
  }
}

TEST_CASE("quadrature structure: sorted positive nodes, non-negative weights") {
  for (double alpha : {0.0, 0.3, 0.7}) {
    const auto k = alpha == 0.0 ? MemoryKernel::exponential(2.0, 1.5)
                                : MemoryKernel::singular(1.5, alpha);
    const auto rule = build_quadrature(k, 96, 25.0);
    REQUIRE(rule.size() == 96);
    CHECK(rule.nodes.front() > 0.0);
    for (std::size_t i = 1; i < rule.size(); ++i)
      CHECK(rule.nodes[i] > rule.nodes[i - 1]);
    for (double w : rule.weights) CHECK(w >= 0.0);
  }
  CHECK_THROWS_AS(build_quadrature(MemoryKernel::exponential(1, 1), 1, 10.0),
                  std::invalid_argument);
  // the minimal two-node rule is legal: one cell plus the tail patch
  const auto tiny = build_quadrature(MemoryKernel::exponential(1, 1), 2, 40.0);
  CHECK(tiny.size() == 2);
  CHECK(tiny.mass == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(build_quadrature(MemoryKernel::exponential(1, 1), 7, 10.0),
                  std::invalid_argument);
}

TEST_CASE("quadrature integrates smooth decaying test functions") {
  SUBCASE("singular kernel, g = e^{-s}") {
    const auto k = MemoryKernel::singular(1.0, 0.5);
    const auto rule = build_quadrature(k, 64, 30.0);
    std::vector<double> g(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) g[i] = std::exp(-rule.nodes[i]);
    // oracle: int_0^inf e^{-2s} s^{-1/2} ds = sqrt(pi/2)
    const double expected = std::sqrt(std::numbers::pi / 2.0);
    const double oracle_val =
        oracle::integrate_singular([](double s) { return std::exp(-s); }, 1.0, 0.5, 40.0);
    CHECK(oracle_val == doctest::Approx(expected).epsilon(1e-9));
    CHECK(rule.apply(g) == doctest::Approx(oracle_val).epsilon(1e-3));
  }
  SUBCASE("exponential kernel, g = cos(s)") {
    const auto k = MemoryKernel::exponential(1.0, 1.0);
    const auto rule = build_quadrature(k, 128, 40.0);
    std::vector<double> g(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) g[i] = std::cos(rule.nodes[i]);
    // int_0^inf e^{-s} cos s ds = 1/2
    CHECK(rule.apply(g) == doctest::Approx(0.5).epsilon(1e-6));
  }
}

TEST_CASE("quadrature mass grows monotonically to k(0) with s_max") {
  const auto k = MemoryKernel::singular(1.0, 0.4);
  double prev = 0.0;
  for (double s_max : {5.0, 10.0, 20.0, 40.0}) {
    // mass without the tail patch: subtract it back out
    auto rule = build_quadrature(k, 64, s_max);
    const double raw = rule.mass - k.k_of(s_max);
    CHECK(raw >= prev - 1e-13);
    CHECK(raw <= k.k0() + 1e-13);
    prev = raw;
  }
  CHECK(prev == doctest::Approx(k.k0()).epsilon(1e-10));
}

TEST_CASE("gamma_select") {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(gamma_select(1.0, pi2, 1.0, 0.5) == doctest::Approx(0.5));
  CHECK(gamma_select(0.01, pi2, 5.0, 0.9) == doctest::Approx(0.9 * 0.01 * pi2));
  CHECK_THROWS_AS(gamma_select(1.0, pi2, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gamma_select(1.0, pi2, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gamma_select(-1.0, pi2, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("k_mu_bound closed form") {
  SUBCASE("exponential: e^{1/2}(1-e^{-1}) + 4 e^{-1} e") {
    const auto k = MemoryKernel::exponential(1.0, 1.0);
    const double expected =
        std::exp(0.5) * (1.0 - std::exp(-1.0)) + std::exp(-1.0) * std::exp(1.0) * 4.0;
    CHECK(k_mu_bound(k, 0.5) == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("singular: first term from the quadrature oracle") {
    const auto k = MemoryKernel::singular(1.0, 0.5);
    const double int01 =
        oracle::integrate_singular([](double) { return 1.0; }, 1.0, 0.5, 1.0);
    const double expected =
        std::exp(0.5) * int01 + std::exp(-1.0) * std::exp(1.0) * 4.0;
    CHECK(k_mu_bound(k, 0.5) == doctest::Approx(expected).epsilon(1e-9));
  }
  SUBCASE("pole guard") {
    const auto k = MemoryKernel::exponential(1.0, 1.0);
    CHECK_THROWS_AS(k_mu_bound(k, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(k_mu_bound(k, 1.5), std::invalid_argument);
  }
  SUBCASE("monotone non-decreasing in gamma on (0, delta)") {
    const auto k = MemoryKernel::singular(1.0, 0.3);
    double prev = 0.0;
    for (double g = 0.05; g < 1.0; g += 0.05) {
      const double v = k_mu_bound(k, g);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("kernel spec strings round-trip") {
  const auto k1 = parse_kernel_spec("exp(2.5, 0.75)");
  CHECK(k1.family() == KernelFamily::exponential);
  CHECK(k1.amplitude() == doctest::Approx(2.5));
  CHECK(k1.delta() == doctest::Approx(0.75));
  const auto k2 = parse_kernel_spec(k1.spec_string());
  CHECK(k2.delta() == k1.delta());
  const auto k3 = parse_kernel_spec("singular(1.5,0.25)");
  CHECK(k3.family() == KernelFamily::singular_exp);
  CHECK(k3.alpha() == doctest::Approx(0.25));
  CHECK_THROWS_AS(parse_kernel_spec("gauss(1,1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_kernel_spec("exp(1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_kernel_spec("exp(a,b)"), std::invalid_argument);
}

TEST_CASE("incomplete gamma building blocks") {
  CHECK(num::gamma_p(1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(num::gamma_q(0.5, 0.0) == doctest::Approx(1.0));
  CHECK(num::upper_gamma(0.5, 0.0) ==
        doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
  // large-x continued fraction branch
  CHECK(num::gamma_q(0.5, 30.0) ==
        doctest::Approx(oracle::integrate_tail(
                            [](double s) { return std::exp(-s) / std::sqrt(s); },
                            30.0, 1.0, 1e-22) /
                        std::sqrt(std::numbers::pi))
            .epsilon(1e-9));
}
