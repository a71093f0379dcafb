#pragma once

#include <optional>
#include <string>
#include <vector>

#include "memheat/solver.hpp"

namespace memheat {

/// Constants of the decay envelope and the two-trajectory separation bound:
///   ||S(t)(u0,phi)||^2_X <= K1 ||(u0,phi)||^2_X e^{-gamma t} + K2,
/// with K1 = (1 + 2/m) max(1, K_mu) + 1 and K2 = (1 + 2/m) K0 / gamma (both
/// follow the energy-estimate chain; the underlying lemma only asserts
/// existence), and K5 = ((gamma+delta)^2 + 1)/m.
struct EnvelopeConstants {
  double k0 = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double k5 = 0.0;
  double k_mu = 0.0;
  double gamma = 0.0;
};

EnvelopeConstants envelope_constants(double m, double k_mu, double k0,
                                     double gamma, double delta);

EnvelopeConstants envelope_constants(const ProblemConfig& cfg);

/// ||S(t)(u0,phi)||^2_X recomputed directly from the stored trajectory by
/// per-interval exponential-weighted quadrature (cross-check for the running
/// recursion maintained inside solve()).
double x_norm_direct(const Trajectory& traj, double phi_lv2, double gamma,
                     std::size_t k);

struct EnvelopeReport {
  bool pass = false;
  double min_margin = 0.0;      // min over samples of bound - x_norm
  double worst_t = 0.0;
  double tolerance = 0.0;       // tol_rel * (K2 + E0)
  double max_ratio = 0.0;       // max x_norm / bound (tightness probe)
  std::string to_json() const;
};

/// Margin check of x_norm(t) against K1 E0 e^{-gamma t} + K2 over a run.
EnvelopeReport envelope_check(const std::vector<DiagnosticsRecord>& records,
                              const EnvelopeConstants& c, double e0,
                              double tol_rel = 1e-3);

enum class AbsorbStatus { entered, inconclusive, never_entered };

struct AbsorbingReport {
  AbsorbStatus status = AbsorbStatus::inconclusive;
  double entry_time = 0.0;
  double predicted_entry = 0.0;  // t* = ln(K1 E0 / K2)/gamma (0 if E0 <= 2 K2)
  bool stays_inside = false;     // x_norm <= 2 K2 (1+tol) after entry
  double radius_sq = 0.0;        // 2 K2
  std::string to_json() const;
};

/// First entry of the run into the absorbing ball ||.||^2_X <= 2 K2 and
/// whether it persists there afterwards.
AbsorbingReport absorbing_entry(const std::vector<DiagnosticsRecord>& records,
                                const EnvelopeConstants& c, double e0,
                                double tol = 1e-3);

struct SeparationResult {
  std::vector<double> times;
  std::vector<double> separation;  // ||u_t^A - u_t^B||^2_{L_V^2}
  double initial_separation = 0.0; // |du0|^2 + ||dphi||^2
  double fitted_rate = 0.0;        // exponential fit over the second half
  double max_bound_ratio = 0.0;    // max separation / (K5 e^{-gamma t} E_sep)
  bool bound_holds = false;        // ratio <= 1 + tol everywhere
};

/// Two-trajectory separation series via the weighted-tail recursion applied
/// to the difference, checked against K5 e^{-gamma t} (initial separation).
SeparationResult separation_decay(const Trajectory& a, const Trajectory& b,
                                  double dphi_lv2, const ProblemConfig& cfg,
                                  double k5, double tol = 1e-3);

struct AttractorProbe {
  int n_trajectories = 0;
  double box_diameter = 0.0;            // terminal modal bounding-box diagonal
  double max_pair_distance = 0.0;       // max pairwise |u_A - u_B| at the end
  std::vector<std::vector<double>> cluster_centers;  // modal coefficients
  std::vector<int> cluster_sizes;
  double min_energy = 0.0, max_energy = 0.0;  // post-transient range
  std::string to_json() const;
};

/// Empirical omega-limit statistics for an ensemble of runs: discard
/// [0, t_transient], then cluster terminal states (link radius `link_eps`).
AttractorProbe attractor_probe(const std::vector<SolveResult>& runs,
                               double t_transient, double link_eps = 1e-3);

}  // namespace memheat
