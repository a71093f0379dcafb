#pragma once

#include <string>
#include <vector>

#include "memheat/solver.hpp"

namespace memheat {

inline constexpr int kFormatVersion = 1;

/// Trajectory CSV: t, b_1..b_n, |u|, ||u||_V, ||eta||_mu, energy, lv2,
/// dissipation_residual. One row per `stride` steps (last row always kept).
void write_trajectory_csv(const std::string& path, const SolveResult& run,
                          int stride = 1);

/// History snapshot CSV: s_i, omega_i, e_1..e_n.
void write_history_csv(const std::string& path, const HistoryField& eta);

/// JSON report file: {"format_version": N, "report": <inner>}.
void write_json_report(const std::string& path, const std::string& inner_json);

/// Campaign summary CSV: one row per run.
struct CampaignRow {
  std::string config_hash;
  double e0 = 0.0;
  double entry_time = -1.0;  // -1 = not entered / not applicable
  double min_envelope_margin = 0.0;
  double fitted_separation_rate = 0.0;  // 0 when not measured
};
void write_campaign_csv(const std::string& path,
                        const std::vector<CampaignRow>& rows);

/// Versioned little-endian checkpoint: header, kernel parameters, rule
/// arrays, then b and e. See README for the byte layout.
struct Checkpoint {
  double t = 0.0;
  double gamma = 0.0;
  MemoryKernel kernel = MemoryKernel::exponential(1.0, 1.0);
  std::shared_ptr<const WeightedQuadrature> rule;
  SpectralField u;
  HistoryField eta;
};

void write_checkpoint(const std::string& path, const SystemState& state,
                      const MemoryKernel& kernel, double gamma);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace memheat
