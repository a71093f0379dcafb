#pragma once

#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "memheat/exec.hpp"
#include "memheat/kernel.hpp"
#include "memheat/spectral.hpp"

namespace memheat {

/// One exponential term amp * e^{rate * r} of a past trajectory (r <= 0).
struct ExpTerm {
  double amp = 0.0;
  double rate = 0.0;
};

/// Past trajectory phi : (-inf, 0] -> modal space. Representation is a
/// per-mode exponential mix, optionally preceded by a uniformly sampled
/// window on [-t_window, 0] (the exponential part then applies for
/// r <= -t_window, with its clock starting there). The sampled window is
/// what a restart uses to feed a stored trajectory back in as history.
class PastTrajectory {
 public:
  /// Pure exponential mix; terms[j] lists the terms of mode j.
  static PastTrajectory exp_mix(std::vector<std::vector<ExpTerm>> terms);
  /// Sampled window of `steps+1` rows at spacing dt (row k holds the modal
  /// values at r = -t_window + k dt), extended for r < -t_window by the
  /// exponential mix `tail` (may be empty = zero extension).
  static PastTrajectory sampled(std::vector<double> rows, int n_modes,
                                double dt,
                                std::vector<std::vector<ExpTerm>> tail = {});

  int n_modes() const { return n_modes_; }
  double t_window() const { return t_window_; }
  bool has_window() const { return t_window_ > 0.0; }
  const std::vector<std::vector<ExpTerm>>& exp_terms() const { return terms_; }

  /// phi_j(r), r <= 0.
  double eval(int j, double r) const;
  /// int_{-s}^0 phi_j(r) dr (the lift integrand), s >= 0.
  double lift_integral(int j, double s) const;
  /// int_{-inf}^0 e^{gamma r} phi_j(r)^2 dr.
  double weighted_sq_integral(int j, double gamma) const;
  /// Smallest exponential rate present (for L_V^2 admissibility checks).
  double min_rate() const;

 private:
  int n_modes_ = 0;
  std::vector<std::vector<ExpTerm>> terms_;
  double t_window_ = 0.0;
  double dt_ = 0.0;
  int n_rows_ = 0;
  std::vector<double> rows_;      // (n_rows x n_modes), row 0 at r=-t_window
  std::vector<double> cum_;       // cum_[k*n+j] = int_{-k dt}^0 phi_j
};

/// ||phi||^2_{L_V^2} = sum_j lambda_j int_{-inf}^0 e^{gamma r} phi_j^2 dr.
double lv2_norm_sq(const PastTrajectory& phi, double gamma,
                   const SpatialBasis& basis);

/// Discrete Dafermos variable: modal coefficients of eta^t at the quadrature
/// nodes, e[j][i] ~ eta_j(s_i), together with the transported slope field
/// d[j][i] ~ (d/ds) eta_j(s_i) = u_j(t - s_i). Carrying the slopes makes the
/// characteristic shift a two-field Hermite transport whose fronts move at
/// the exact speed even when dt is far below the local node spacing.
/// Rows (modes) are independent; the parallel kernels split over them.
struct HistoryField {
  std::shared_ptr<const WeightedQuadrature> rule;
  int n_modes = 0;
  std::vector<double> values;  // row-major, n_modes x rule->size()
  std::vector<double> slopes;  // same layout

  int n_nodes() const { return rule ? static_cast<int>(rule->size()) : 0; }
  double& at(int j, int i) {
    return values[static_cast<std::size_t>(j) * rule->size() + static_cast<std::size_t>(i)];
  }
  double at(int j, int i) const {
    return values[static_cast<std::size_t>(j) * rule->size() + static_cast<std::size_t>(i)];
  }
  double& slope_at(int j, int i) {
    return slopes[static_cast<std::size_t>(j) * rule->size() + static_cast<std::size_t>(i)];
  }
  double slope_at(int j, int i) const {
    return slopes[static_cast<std::size_t>(j) * rule->size() + static_cast<std::size_t>(i)];
  }
  std::span<const double> row(int j) const {
    return {values.data() + static_cast<std::size_t>(j) * rule->size(), rule->size()};
  }
};

/// The lift (J phi)(s) = int_{-s}^0 phi(r) dr evaluated at the rule nodes.
/// When `gamma` is finite, closed-form trajectories with a rate <= -gamma/2
/// are rejected (not in L_V^2).
HistoryField lift(const PastTrajectory& phi, std::shared_ptr<const WeightedQuadrature> rule,
                  const SpatialBasis& basis,
                  double gamma = std::numeric_limits<double>::quiet_NaN());

HistoryField zero_history(std::shared_ptr<const WeightedQuadrature> rule,
                          const SpatialBasis& basis);

/// Galerkin memory force F_j = -lambda_j sum_i w_i e[j][i]; enters the modal
/// ODE additively on the right-hand side.
SpectralField memory_force(const HistoryField& eta, const SpatialBasis& basis,
                           Exec exec = default_exec());

/// ||eta||^2_mu = sum_j lambda_j sum_i w_i e[j][i]^2.
double history_norm_mu(const HistoryField& eta, const SpatialBasis& basis);

/// Node-to-cell mapping of the characteristic shift for a fixed (rule, dt);
/// reusable across steps.
struct AdvancePlan {
  double dt = 0.0;
  std::vector<int> cell;       // extended-grid cell of s_i - dt; -1 = refill
  std::vector<double> target;  // s_i - dt
};

AdvancePlan make_advance_plan(const WeightedQuadrature& rule, double dt);

/// Exact-characteristic time advance over dt: nodes with s_i > dt pick up the
/// shifted field (cubic Hermite built from the transported values and slopes,
/// boundary value eta(0)=0 with boundary slope u(t)) plus the step increment
/// int_t^{t+dt} u; nodes with s_i <= dt are refilled from the definition of
/// eta. `u_increment[j]` is the intra-step integral of b_j; `u_end` the field
/// at t+dt.
HistoryField advance(const HistoryField& eta, std::span<const double> u_increment,
                     double dt, const SpectralField& u_end,
                     Exec exec = default_exec());

/// Same advance with a precomputed plan (the per-step hot path).
HistoryField advance(const HistoryField& eta, const AdvancePlan& plan,
                     std::span<const double> u_increment,
                     const SpectralField& u_end, Exec exec = default_exec());

/// Max over modes of the relative gap between the quadrature side
/// sum_i w_i e[j][i] of the lifted history and the direct convolution
/// int_{-inf}^0 k(-r) phi_j(r) dr (adaptive quadrature).
double equivalence_residual(const HistoryField& eta_from_lift,
                            const PastTrajectory& phi, const MemoryKernel& kernel,
                            const SpatialBasis& basis);

}  // namespace memheat
