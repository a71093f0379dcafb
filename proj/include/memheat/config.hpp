#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "memheat/history.hpp"
#include "memheat/solver.hpp"

namespace memheat {

/// Declarative run description, mirrored one-to-one from the config file.
/// Section/key grammar (strict; unknown keys are errors):
///   [domain]  length, n_modes, n_collocation?, forcing?
///   [kernel]  spec, n_nodes?, s_max?, gamma_safety?, gamma?
///   [f]       coeffs?            (descending powers; section optional)
///   [a]       kind, value | (base, slope, m, m_tilde, l_weight)
///   [initial] u0?, phi<j>?..., phi_csv?
///   [time]    dt, T, scheme?, sample_stride?
///   [output]  dir?, prefix?
struct RunConfig {
  double length = 1.0;
  int n_modes = 1;
  std::optional<int> n_collocation;
  std::vector<double> forcing;

  std::string kernel_spec = "exp(1,1)";
  int n_nodes = 128;
  std::optional<double> s_max;
  double gamma_safety = 0.5;
  std::optional<double> gamma_override;

  std::vector<double> f_coeffs;  // empty = linear problem

  std::string a_kind = "constant";
  double a_value = 1.0;
  double a_base = 1.0, a_slope = 0.0, a_m = 1.0, a_m_tilde = 1.0;
  std::vector<double> l_weight;

  std::vector<double> u0;
  std::vector<std::vector<ExpTerm>> phi_terms;  // per mode
  std::string phi_csv;

  double dt = 1e-3;
  double horizon = 1.0;
  std::string scheme = "imex";
  int sample_stride = 1;

  std::string out_dir = "out";
  std::string out_prefix = "run";

  /// Canonical text form; parsing it back reproduces this config exactly.
  std::string echo() const;
  /// FNV-1a hash of the canonical form.
  std::string hash() const;
};

struct ParseOutcome {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;  // all of them, not fail-fast
  bool ok() const { return errors.empty() && config.has_value(); }
};

/// Parse + validate a config file. Collects every error it can find.
ParseOutcome parse_config_text(const std::string& text);
ParseOutcome parse_config(const std::string& path);

/// Materialized problem: everything solve() needs.
struct BuiltProblem {
  ProblemConfig problem;
  SpectralField u0;
  PastTrajectory phi;
  double gamma_requested = 0.0;  // after override, before validation
};

/// Build the runtime objects from a validated config. Throws on constraint
/// violations that only surface at build time.
BuiltProblem build_problem(const RunConfig& cfg);

}  // namespace memheat
