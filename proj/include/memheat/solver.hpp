#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "memheat/history.hpp"
#include "memheat/kernel.hpp"
#include "memheat/spectral.hpp"

namespace memheat {

/// z(t) = (u(t), eta^t) plus the simulation clock.
struct SystemState {
  double t = 0.0;
  SpectralField u;
  HistoryField eta;
};

enum class Scheme { imex, rk4_explicit };

/// Full problem description for a run. Immutable while solving.
struct ProblemConfig {
  SpatialBasis basis;
  MemoryKernel kernel;
  std::shared_ptr<const WeightedQuadrature> rule;
  std::optional<Nonlinearity> f;  // empty = linear problem (f = 0)
  NonlocalCoefficient a;
  SpectralField forcing;  // modal g, time-independent
  double gamma = 0.0;
  double dt = 0.0;
  double horizon = 0.0;
  Scheme scheme = Scheme::imex;
  Exec exec = default_exec();

  double f0() const { return f ? f->f0() : 0.0; }
  double a0_const() const { return f ? f->a0() : 0.0; }
  /// K0 = 2 a0 |Omega| + 2 |g|^2 / (m lambda1).
  double k0_dissipation() const;
};

/// Stored run at full step resolution. Increments are the intra-step
/// integrals of b (what the history advance consumed); they make restarts
/// and the weighted-tail recursions exact at the scheme's order.
struct Trajectory {
  int n_modes = 0;
  double dt = 0.0;
  std::vector<double> times;       // size K+1
  std::vector<double> coeffs;      // (K+1) x n
  std::vector<double> increments;  // K x n
  std::vector<double> v_norm_sq;   // size K+1

  std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
  std::span<const double> modal(std::size_t k) const {
    return {coeffs.data() + k * static_cast<std::size_t>(n_modes),
            static_cast<std::size_t>(n_modes)};
  }
  SpectralField field(std::size_t k) const;
};

/// Per-step scalar diagnostics emitted by solve().
struct DiagnosticsRecord {
  double t = 0.0;
  double energy = 0.0;     // ||z||^2_H = |u|^2 + ||eta||^2_mu
  double u_h_sq = 0.0;     // |u|^2
  double u_v_sq = 0.0;     // ||u||^2_V
  double eta_mu_sq = 0.0;  // ||eta||^2_mu
  double lp2p = 0.0;       // |u|_{2p}^{2p} (0 for linear runs)
  double lv2 = 0.0;        // ||u_t||^2_{L_V^2}
  double x_norm = 0.0;     // |u|^2 + lv2
  double dissipation_residual = 0.0;
  double residual_allowance = 0.0;
  double mem_force_max = 0.0;  // max_j |F_j|
};

struct SolveResult {
  Trajectory trajectory;
  SystemState final_state;
  std::vector<DiagnosticsRecord> records;
  double phi_lv2 = 0.0;  // ||phi||^2_{L_V^2}
};

/// Thrown when a step produces a non-finite state or the energy jumps by more
/// than 1e6x in one step. Carries the last finite state when the failing
/// solver had one.
class SolverDivergence : public std::runtime_error {
 public:
  SolverDivergence(const std::string& what, double t, std::size_t step,
                   std::shared_ptr<const SystemState> last = nullptr)
      : std::runtime_error(what), t_fail(t), step_fail(step),
        last_state(std::move(last)) {}
  double t_fail;
  std::size_t step_fail;
  std::shared_ptr<const SystemState> last_state;
};

/// Modal right-hand side db/dt = -lambda a(l(u)) b + F(eta) - P_n f(u) + g.
SpectralField rhs(const SystemState& state, const ProblemConfig& cfg);

/// One linearly implicit Euler step: the stiff diagonal -lambda_j a b_j is
/// implicit with a frozen at l(u^k); memory force, nonlinearity and forcing
/// explicit; history advanced with the trapezoidal intra-step increment.
/// The explicit terms impose the usual heuristic bound dt <~ 2/(d0 + memory
/// force growth); the implicit diagonal itself is unconditionally stable.
SystemState step_imex(const SystemState& state, const ProblemConfig& cfg);

/// Classical RK4 on the method-of-lines form of the coupled system (the
/// history transport term uses an unlimited cubic slope reconstruction).
/// Validation scheme; conditionally stable.
SystemState step_rk4(const SystemState& state, const ProblemConfig& cfg);

/// Integrate to cfg.horizon from u0 and the lifted history of phi.
SolveResult solve(const ProblemConfig& cfg, const SpectralField& u0,
                  const PastTrajectory& phi);

/// Independent oracle: integrates the original convolution form (no Dafermos
/// variable) with explicit RK2 and a trapezoidal memory sum over the stored
/// steps; the t<0 tail uses the closed form where available, otherwise
/// adaptive quadrature.
Trajectory solve_reference(const ProblemConfig& cfg, const SpectralField& u0,
                           const PastTrajectory& phi,
                           std::size_t max_state_bytes = 200'000'000);

/// Past trajectory for a restart at the end of `traj`: the stored window
/// plus the original (pure exponential-mix) phi behind it.
PastTrajectory restart_past(const PastTrajectory& phi, const Trajectory& traj);

/// Damped fixed-point iteration for equilibria of the no-memory Galerkin
/// system  lambda_j a(l(u)) b_j + [f(u)]_j = g_j. Returns the limit point
/// (or empty when the iteration fails to settle below `tol`).
std::optional<SpectralField> steady_state(const ProblemConfig& cfg,
                                          const SpectralField& start,
                                          double tol = 1e-12,
                                          int max_iter = 200000);

}  // namespace memheat
