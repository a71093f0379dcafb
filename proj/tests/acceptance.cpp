// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Tolerances are fixed here, not tuned at runtime.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "memheat/diagnostics.hpp"
#include "memheat/solver.hpp"

using namespace memheat;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::shared_ptr<const WeightedQuadrature> make_rule(const MemoryKernel& k,
                                                    int nodes, double s_max) {
  return std::make_shared<const WeightedQuadrature>(
      build_quadrature(k, nodes, s_max));
}

SpectralField modal(std::vector<double> v) {
  SpectralField u;
  u.coeffs = std::move(v);
  return u;
}

PastTrajectory zero_phi(int n) {
  return PastTrajectory::exp_mix(
      std::vector<std::vector<ExpTerm>>(static_cast<std::size_t>(n)));
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Memory-equivalence of the history form and the convolution form
// ---------------------------------------------------------------------------

Outcome criterion1() {
  SpatialBasis basis(1.0, 4, 8);
  // exponential kernel: both sides are sums of amp/(1+rate) in closed form
  const auto expk = MemoryKernel::exponential(1.0, 1.0);
  auto rule = make_rule(expk, 128, 40.0);
  const std::vector<std::vector<ExpTerm>> terms = {
      {{1.0, 1.0}},
      {{0.7, 2.0}, {0.3, 0.5}},
      {{-0.4, 1.5}},
      {{0.2, 0.25}, {-0.1, 3.0}}};
  const auto phi = PastTrajectory::exp_mix(terms);
  const auto eta = lift(phi, rule, basis);
  double worst_closed = 0.0;
  for (int j = 0; j < 4; ++j) {
    double lhs = 0.0;
    for (int i = 0; i < eta.n_nodes(); ++i)
      lhs += rule->weights[static_cast<std::size_t>(i)] * eta.at(j, i);
    double rhs = 0.0;
    for (const ExpTerm& t : terms[static_cast<std::size_t>(j)])
      rhs += t.amp / (1.0 + t.rate);
    worst_closed = std::max(worst_closed, std::fabs(lhs - rhs) / std::fabs(rhs));
  }
  const double res_exp = equivalence_residual(eta, phi, expk, basis);

  const auto sing = MemoryKernel::singular(1.0, 0.5);
  auto srule = make_rule(sing, 128, 40.0);
  const auto seta = lift(phi, srule, basis);
  const double res_sing = equivalence_residual(seta, phi, sing, basis);

  Outcome out;
  out.pass = worst_closed <= 1e-6 && res_exp <= 1e-6 && res_sing <= 1e-3;
  out.detail = fmt("exp closed-form %.2e, exp oracle %.2e, singular %.2e  "
                   "(tol 1e-6 / 1e-6 / 1e-3)",
                   worst_closed, res_exp, res_sing);
  return out;
}

// ---------------------------------------------------------------------------
// 2. Lift continuity bound over randomized admissible histories
// ---------------------------------------------------------------------------

Outcome criterion2() {
  SpatialBasis basis(1.0, 4, 8);
  const auto kernel = MemoryKernel::exponential(1.0, 1.0);
  auto rule = make_rule(kernel, 128, 40.0);
  const double gamma = 0.5;
  const double k_mu = k_mu_bound(kernel, gamma);
  std::mt19937_64 rng(20260810);
  std::uniform_real_distribution<double> amp(-2.0, 2.0);
  std::uniform_real_distribution<double> rate(0.0, 3.0);
  int violations = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<ExpTerm>> terms(4);
    for (auto& mode : terms)
      for (int t = 0; t < 2; ++t)
        mode.push_back({amp(rng), -gamma / 2.0 + 0.05 + rate(rng)});
    const auto phi = PastTrajectory::exp_mix(terms);
    const double lhs = history_norm_mu(lift(phi, rule, basis, gamma), basis);
    const double rhs = k_mu * lv2_norm_sq(phi, gamma, basis);
    if (lhs > rhs) ++violations;
    worst_ratio = std::max(worst_ratio, lhs / rhs);
  }
  Outcome out;
  out.pass = violations == 0;
  out.detail = fmt("0 violations required, got %.0f; worst ratio %.3f (K_mu %.4f)",
                   static_cast<double>(violations), worst_ratio, k_mu);
  return out;
}

// ---------------------------------------------------------------------------
// 3. Linear decay oracle with Richardson confirmation of the O(dt) bias
// ---------------------------------------------------------------------------

Outcome criterion3() {
  SpatialBasis basis(1.0, 1, 4);
  const auto kernel = MemoryKernel::exponential(1e-30, 1.0);  // no memory
  auto rule = make_rule(kernel, 16, 40.0);
  ProblemConfig cfg{basis,  kernel, rule, std::nullopt,
                    NonlocalCoefficient::constant(1.0), SpectralField{},
                    0.5,    1e-4,   1.0,  Scheme::imex, Exec::serial};
  cfg.forcing.coeffs = {0.0};
  const auto run = solve(cfg, modal({1.0}), zero_phi(1));
  const double expected = std::exp(-pi * pi);
  const double err = std::fabs(std::fabs(run.final_state.u[0]) - expected);
  cfg.dt = 2e-4;
  const auto coarse = solve(cfg, modal({1.0}), zero_phi(1));
  const double rich =
      2.0 * run.final_state.u[0] - coarse.final_state.u[0];
  const double err_rich = std::fabs(std::fabs(rich) - expected);
  Outcome out;
  out.pass = err <= 1e-6 && err_rich < err;
  out.detail = fmt("|u(1)| error %.3e (tol 1e-6); Richardson residual %.3e",
                   err, err_rich);
  return out;
}

// ---------------------------------------------------------------------------
// 4. Exponential-kernel 2x2 reduction oracle
// ---------------------------------------------------------------------------

Outcome criterion4() {
  const double delta = 1.0, c = 0.5, lam = 1.0, a_const = 1.0;
  const auto kernel = MemoryKernel::exponential(c, delta);
  SpatialBasis basis(pi, 1, 4);  // lambda_1 = 1
  auto rule = make_rule(kernel, 256, 40.0);
  ProblemConfig cfg{basis,  kernel, rule, std::nullopt,
                    NonlocalCoefficient::constant(a_const), SpectralField{},
                    0.45,   5e-5,   2.0,  Scheme::imex, Exec::serial};
  cfg.forcing.coeffs = {0.0};
  const auto run = solve(cfg, modal({1.0}), zero_phi(1));

  // closed form of z' = [[-lam a, -lam],[mass, -delta]] z from (1, 0)
  const double mass = c / delta;
  const std::complex<double> tr(-lam * a_const - delta, 0.0);
  const std::complex<double> det(lam * a_const * delta + lam * mass, 0.0);
  const std::complex<double> disc = std::sqrt(tr * tr - 4.0 * det);
  const std::complex<double> s1 = 0.5 * (tr + disc), s2 = 0.5 * (tr - disc);
  const auto vy = [&](std::complex<double> s) { return (s + lam * a_const) / (-lam); };
  const std::complex<double> c2 = (0.0 - vy(s1) * 1.0) / (vy(s2) - vy(s1));
  const std::complex<double> c1 = 1.0 - c2;
  const double exact =
      (c1 * std::exp(s1 * 2.0) + c2 * std::exp(s2 * 2.0)).real();

  const double err = std::fabs(run.final_state.u[0] - exact);
  Outcome out;
  out.pass = err <= 1e-5;
  out.detail = fmt("|b(2) - closed form| = %.3e (tol 1e-5)", err);
  return out;
}

// ---------------------------------------------------------------------------
// 5. Dafermos solver vs direct-convolution reference, full nonlinear run
// ---------------------------------------------------------------------------

Outcome criterion5() {
  const int n = 16;
  const auto kernel = MemoryKernel::exponential(1.0, 1.0);
  SpatialBasis basis(1.0, n, 2 * n + 1);
  auto rule = make_rule(kernel, 128, 40.0);
  ProblemConfig cfg{basis,  kernel, rule, Nonlinearity({1.0, 0.0, -1.0, 0.0}),
                    NonlocalCoefficient::constant(1.0), SpectralField{},
                    0.5,    1e-4,   1.0,  Scheme::imex, Exec::openmp};
  cfg.forcing.coeffs.assign(n, 0.0);
  cfg.forcing.coeffs[0] = 0.3;
  std::vector<double> u0(n, 0.0);
  for (int j = 0; j < n; ++j)
    u0[static_cast<std::size_t>(j)] =
        (j % 2 == 0 ? 0.8 : -0.5) / ((j + 1) * (j + 1));
  std::vector<std::vector<ExpTerm>> terms(n);
  terms[0] = {{0.5, 1.0}};
  terms[1] = {{-0.2, 0.6}};
  terms[3] = {{0.1, 1.4}};
  const auto phi = PastTrajectory::exp_mix(terms);

  const auto run = solve(cfg, modal(u0), phi);
  const auto ref = solve_reference(cfg, modal(u0), phi);
  double diff = 0.0;
  for (int j = 0; j < n; ++j) {
    const double d =
        run.final_state.u[static_cast<std::size_t>(j)] -
        ref.modal(ref.steps())[static_cast<std::size_t>(j)];
    diff += d * d;
  }
  diff = std::sqrt(diff);
  Outcome out;
  out.pass = diff <= 1e-3;
  out.detail = fmt("H-norm deviation at T=1: %.3e (tol 1e-3)", diff);
  return out;
}

// ---------------------------------------------------------------------------
// Campaign shared by criteria 6 and 7
// ---------------------------------------------------------------------------

struct CampaignRun {
  bool hypotheses_ok = false;
  int residual_violations = 0;
  bool envelope_pass = false;
  double envelope_margin = 0.0;
  bool entry_applicable = false;  // E0 > 2 K2
  bool entry_ok = false;
  double entry_time = -1.0, predicted = 0.0;
  double e0 = 0.0;
};

CampaignRun campaign_run(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const bool singular = unif(rng) < 0.4;
  const double delta = 0.6 + unif(rng);
  const auto kernel = singular
                          ? MemoryKernel::singular(delta, 0.2 + 0.5 * unif(rng))
                          : MemoryKernel::exponential(0.3 + 1.2 * unif(rng), delta);
  const int n = 6;
  SpatialBasis basis(1.0, n, 2 * n + 1);
  const double m_low = 0.5 + 0.5 * unif(rng);
  NonlocalCoefficient a =
      unif(rng) < 0.5
          ? NonlocalCoefficient::constant(m_low + 0.5 * unif(rng))
          : NonlocalCoefficient::clamped_affine(m_low + 0.4, 0.3 * (2.0 * unif(rng) - 1.0),
                                                m_low, m_low + 1.0,
                                                {1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  const double gamma = gamma_select(a.m(), basis.lambda1(), delta, 0.5);
  auto rule = make_rule(kernel, 96, default_s_max(kernel));

  ProblemConfig cfg{basis,  kernel, rule, Nonlinearity({1.0, 0.0, -1.0 + 1.5 * unif(rng), 0.0}),
                    a,      SpectralField{}, gamma, 1e-3, 8.0, Scheme::imex,
                    Exec::serial};
  cfg.forcing.coeffs.assign(n, 0.0);
  cfg.forcing.coeffs[0] = 0.6 * (2.0 * unif(rng) - 1.0);
  cfg.forcing.coeffs[1] = 0.3 * (2.0 * unif(rng) - 1.0);

  const double amp = 0.5 + 5.5 * unif(rng);
  std::vector<double> u0(n);
  for (int j = 0; j < n; ++j)
    u0[static_cast<std::size_t>(j)] =
        amp * (2.0 * unif(rng) - 1.0) / ((j + 1) * (j + 1));
  std::vector<std::vector<ExpTerm>> terms(n);
  for (int j = 0; j < n; ++j)
    if (unif(rng) < 0.6)
      terms[static_cast<std::size_t>(j)].push_back(
          {0.5 * (2.0 * unif(rng) - 1.0) / (j + 1),
           -gamma / 2.0 + 0.05 + 2.0 * unif(rng)});
  const auto phi = PastTrajectory::exp_mix(terms);

  CampaignRun result;
  // hypothesis validation gate
  std::vector<double> grid;
  for (int i = 0; i < 128; ++i)
    grid.push_back(1e-3 * std::pow(4e4, i / 127.0));
  const auto rep = validate_hypotheses(kernel, grid, delta);
  result.hypotheses_ok =
      rep.h1_nonneg && rep.h1_monotone && rep.h1_integrable && rep.h2_pass &&
      gamma < delta;

  const EnvelopeConstants c = envelope_constants(cfg);
  const double e0 = modal(u0).h_norm_sq() + lv2_norm_sq(phi, gamma, basis);
  result.e0 = e0;
  if (e0 > 2.0 * c.k2) {
    result.entry_applicable = true;
    result.predicted = std::log(c.k1 * e0 / c.k2) / gamma;
    cfg.horizon = std::max(8.0, 1.2 * result.predicted + 1.0);
  }

  const auto run = solve(cfg, modal(u0), phi);
  for (std::size_t k = 1; k < run.records.size(); ++k)
    if (run.records[k].dissipation_residual > run.records[k].residual_allowance)
      ++result.residual_violations;

  const auto env = envelope_check(run.records, c, e0);
  result.envelope_pass = env.pass;
  result.envelope_margin = env.min_margin;

  const auto abs_rep = absorbing_entry(run.records, c, e0);
  if (result.entry_applicable) {
    result.entry_ok = abs_rep.status == AbsorbStatus::entered &&
                      abs_rep.entry_time <= 1.1 * abs_rep.predicted_entry;
    result.entry_time = abs_rep.entry_time;
  }
  return result;
}

std::vector<CampaignRun> run_campaign() {
  std::vector<CampaignRun> runs(100);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < 100; ++i)
    runs[static_cast<std::size_t>(i)] = campaign_run(77000 + static_cast<std::uint64_t>(i));
  return runs;
}

Outcome criterion6(const std::vector<CampaignRun>& runs) {
  int bad_hypo = 0, violations = 0;
  for (const auto& r : runs) {
    if (!r.hypotheses_ok) ++bad_hypo;
    violations += r.residual_violations;
  }
  Outcome out;
  out.pass = bad_hypo == 0 && violations == 0;
  out.detail = fmt("%.0f dissipation violations over 100 runs (tol 0); "
                   "%.0f hypothesis failures",
                   static_cast<double>(violations), static_cast<double>(bad_hypo));
  return out;
}

Outcome criterion7(const std::vector<CampaignRun>& runs) {
  int env_fail = 0, entry_fail = 0, entry_checked = 0;
  double worst_margin = 1e300;
  for (const auto& r : runs) {
    if (!r.envelope_pass) ++env_fail;
    worst_margin = std::min(worst_margin, r.envelope_margin);
    if (r.entry_applicable) {
      ++entry_checked;
      if (!r.entry_ok) ++entry_fail;
    }
  }
  Outcome out;
  out.pass = env_fail == 0 && entry_fail == 0 && entry_checked > 0;
  out.detail = fmt("0 envelope violations required, got %.0f (worst margin %.3e); "
                   "absorbing-entry failures %.0f",
                   static_cast<double>(env_fail), worst_margin,
                   static_cast<double>(entry_fail)) +
               fmt(" of %.0f applicable runs", static_cast<double>(entry_checked));
  return out;
}

// ---------------------------------------------------------------------------
// 8. Two-trajectory separation under the K5 envelope
// ---------------------------------------------------------------------------

Outcome criterion8() {
  const int n = 6;
  const auto kernel = MemoryKernel::exponential(1.0, 1.0);
  SpatialBasis basis(1.0, n, 2 * n + 1);
  auto rule = make_rule(kernel, 96, 40.0);
  const double gamma = gamma_select(1.0, basis.lambda1(), 1.0, 0.5);
  ProblemConfig cfg{basis,  kernel, rule, Nonlinearity({1.0, 0.0, -1.0, 0.0}),
                    NonlocalCoefficient::constant(1.0), SpectralField{},
                    gamma,  1e-3,   6.0,  Scheme::imex, Exec::serial};
  cfg.forcing.coeffs.assign(n, 0.0);
  cfg.forcing.coeffs[0] = 0.3;
  const EnvelopeConstants c = envelope_constants(cfg);

  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  int bound_fail = 0, rate_fail = 0;
  double worst_ratio = 0.0, worst_rate = 1e300;
  std::vector<std::pair<SpectralField, SpectralField>> pairs;
  for (int p = 0; p < 20; ++p) {
    std::vector<double> a0(n), b0(n);
    for (int j = 0; j < n; ++j) {
      a0[static_cast<std::size_t>(j)] = unif(rng) / ((j + 1) * (j + 1));
      b0[static_cast<std::size_t>(j)] =
          a0[static_cast<std::size_t>(j)] + 0.5 * unif(rng) / (j + 1);
    }
    pairs.emplace_back(modal(a0), modal(b0));
  }
  std::vector<SeparationResult> seps(pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (int p = 0; p < static_cast<int>(pairs.size()); ++p) {
    const auto ra = solve(cfg, pairs[static_cast<std::size_t>(p)].first, zero_phi(n));
    const auto rb = solve(cfg, pairs[static_cast<std::size_t>(p)].second, zero_phi(n));
    seps[static_cast<std::size_t>(p)] =
        separation_decay(ra.trajectory, rb.trajectory, 0.0, cfg, c.k5, 1e-3);
  }
  for (const auto& sep : seps) {
    if (sep.max_bound_ratio > 1.001) ++bound_fail;
    if (sep.fitted_rate < 0.9 * gamma) ++rate_fail;
    worst_ratio = std::max(worst_ratio, sep.max_bound_ratio);
    worst_rate = std::min(worst_rate, sep.fitted_rate);
  }
  Outcome out;
  out.pass = bound_fail == 0 && rate_fail == 0;
  out.detail = fmt("bound ratio max %.3f (tol 1.001), fitted rate min %.3f "
                   "(needs >= %.3f)",
                   worst_ratio, worst_rate, 0.9 * gamma);
  return out;
}

// ---------------------------------------------------------------------------
// 9. Temporal self-convergence of the default scheme
// ---------------------------------------------------------------------------

Outcome criterion9() {
  const int n = 8;
  const auto kernel = MemoryKernel::exponential(1.0, 1.0);
  SpatialBasis basis(1.0, n, 2 * n + 1);
  auto rule = make_rule(kernel, 96, 40.0);
  ProblemConfig cfg{basis,  kernel, rule, Nonlinearity({1.0, 0.0, -1.0, 0.0}),
                    NonlocalCoefficient::constant(1.0), SpectralField{},
                    0.5,    1.0,    1.0,  Scheme::imex, Exec::openmp};
  cfg.forcing.coeffs.assign(n, 0.0);
  cfg.forcing.coeffs[0] = 0.3;
  std::vector<double> u0(n);
  for (int j = 0; j < n; ++j)
    u0[static_cast<std::size_t>(j)] = (j % 2 ? -0.6 : 0.9) / ((j + 1) * (j + 1));
  std::vector<std::vector<ExpTerm>> terms(n);
  terms[0] = {{0.4, 1.0}};
  terms[2] = {{-0.2, 0.7}};
  const auto phi = PastTrajectory::exp_mix(terms);

  const double T = 1.0;
  cfg.dt = T / std::pow(2.0, 12) / 64.0;
  const auto ref = solve(cfg, modal(u0), phi);
  std::vector<double> errs;
  for (int k = 8; k <= 12; ++k) {
    cfg.dt = T / std::pow(2.0, k);
    const auto run = solve(cfg, modal(u0), phi);
    double d = 0.0;
    for (int j = 0; j < n; ++j) {
      const double diff = run.final_state.u[static_cast<std::size_t>(j)] -
                          ref.final_state.u[static_cast<std::size_t>(j)];
      d += diff * diff;
    }
    errs.push_back(std::sqrt(d));
  }
  // least-squares slope of log2(err) against the level index
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < errs.size(); ++i) {
    const double x = static_cast<double>(i);
    const double y = std::log2(errs[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double m = static_cast<double>(errs.size());
  const double order = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
  Outcome out;
  out.pass = order >= 0.9;
  out.detail = fmt("observed imex order %.3f over dt = T/2^8..T/2^12 "
                   "(needs >= 0.9); coarsest err %.2e",
                   order, errs.front());
  return out;
}

// ---------------------------------------------------------------------------
// 10. Attractor probes: damped collapse and bistable clusters
// ---------------------------------------------------------------------------

Outcome criterion10() {
  // damped case: g = 0, monotone f, memory on
  const auto kernel = MemoryKernel::exponential(1.0, 1.0);
  SpatialBasis basis(1.0, 4, 9);
  auto rule = make_rule(kernel, 96, 40.0);
  ProblemConfig damped{basis,  kernel, rule, Nonlinearity({1.0, 0.0, 0.0, 0.0}),
                       NonlocalCoefficient::constant(1.0), SpectralField{},
                       0.5,    1e-3,   10.0, Scheme::imex, Exec::serial};
  damped.forcing.coeffs.assign(4, 0.0);
  std::mt19937_64 rng(1313);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<SolveResult> druns(8);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < 8; ++i) {
    std::mt19937_64 local(1313 + static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> u0(4);
    for (auto& x : u0) x = u(local);
    std::vector<std::vector<ExpTerm>> terms(4);
    terms[0] = {{0.5 * u(local), 1.0}};
    druns[static_cast<std::size_t>(i)] =
        solve(damped, modal(u0), PastTrajectory::exp_mix(terms));
  }
  const auto dprobe = attractor_probe(druns, 5.0);

  // bistable case: long domain, no memory, cubic double well
  const auto null_kernel = MemoryKernel::exponential(1e-30, 1.0);
  SpatialBasis bbasis(4.0, 4, 9);
  auto brule = make_rule(null_kernel, 16, 40.0);
  ProblemConfig bist{bbasis, null_kernel, brule, Nonlinearity({1.0, 0.0, -1.0, 0.0}),
                     NonlocalCoefficient::constant(1.0), SpectralField{},
                     0.3,    1e-3,   40.0, Scheme::imex, Exec::serial};
  bist.forcing.coeffs.assign(4, 0.0);
  std::vector<SolveResult> bruns(12);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < 12; ++i) {
    std::mt19937_64 local(999 + static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> u0(4);
    for (auto& x : u0) x = 0.3 * u(local);
    u0[0] = (i % 2 == 0 ? 1.0 : -1.0) * (0.2 + 0.6 * std::fabs(u(local)));
    bruns[static_cast<std::size_t>(i)] =
        solve(bist, modal(u0), zero_phi(4));
  }
  const auto bprobe = attractor_probe(bruns, 20.0);
  const auto steady = steady_state(bist, modal({1.0, 0.0, 0.0, 0.0}));

  bool clusters_match = bprobe.cluster_centers.size() >= 2 && steady.has_value();
  if (clusters_match) {
    // every cluster center must coincide with +steady or -steady
    for (const auto& center : bprobe.cluster_centers) {
      double dp = 0.0, dm = 0.0;
      for (int j = 0; j < 4; ++j) {
        const double s = steady->coeffs[static_cast<std::size_t>(j)];
        dp += (center[static_cast<std::size_t>(j)] - s) *
              (center[static_cast<std::size_t>(j)] - s);
        dm += (center[static_cast<std::size_t>(j)] + s) *
              (center[static_cast<std::size_t>(j)] + s);
      }
      if (std::min(std::sqrt(dp), std::sqrt(dm)) > 1e-4) clusters_match = false;
    }
  }
  Outcome out;
  out.pass = dprobe.box_diameter <= 1e-6 && clusters_match;
  out.detail = fmt("damped diameter %.2e (tol 1e-6); bistable clusters %.0f "
                   "matching steady states to 1e-4",
                   dprobe.box_diameter,
                   static_cast<double>(bprobe.cluster_centers.size()));
  return out;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome result;
  };
  std::vector<Entry> entries;
  entries.push_back({"memory equivalence (history vs convolution)", criterion1()});
  entries.push_back({"lift continuity bound, 100 random histories", criterion2()});
  entries.push_back({"linear decay oracle", criterion3()});
  entries.push_back({"2x2 reduction oracle (exponential kernel)", criterion4()});
  entries.push_back({"Dafermos vs direct reference, nonlinear", criterion5()});
  const auto campaign = run_campaign();
  entries.push_back({"discrete dissipation campaign", criterion6(campaign)});
  entries.push_back({"decay envelope + absorbing ball campaign", criterion7(campaign)});
  entries.push_back({"two-trajectory separation envelope", criterion8()});
  entries.push_back({"temporal self-convergence", criterion9()});
  entries.push_back({"attractor probes (collapse + bistable)", criterion10()});

  int failures = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const bool pass = entries[i].result.pass;
    if (!pass) ++failures;
    std::printf("[%2zu] %s  %-45s  %s\n", i + 1, pass ? "PASS" : "FAIL",
                entries[i].name, entries[i].result.detail.c_str());
  }
  std::printf("acceptance: %zu/%zu criteria passed\n", entries.size() - failures,
              entries.size());
  return failures == 0 ? 0 : 1;
}
