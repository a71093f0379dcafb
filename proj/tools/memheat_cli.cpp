// Batch front end: config parsing, subcommand dispatch, file emission.
// Exit codes: 0 ok, 1 scientific check failed, 2 config/usage error,
// 3 solver divergence.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "memheat/config.hpp"
#include "memheat/diagnostics.hpp"
#include "memheat/io.hpp"

namespace fs = std::filesystem;
using namespace memheat;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  double dt_override = 0.0;
  double horizon_override = 0.0;
  bool allow_unverified = false;
  bool serial = false;
  std::uint64_t seed = 1;
};

int fail_config(const ParseOutcome& parsed) {
  std::cerr << "config errors (" << parsed.errors.size() << "):\n";
  for (const std::string& e : parsed.errors) std::cerr << "  - " << e << "\n";
  return 2;
}

RunConfig apply_overrides(RunConfig cfg, const CommonOpts& opt) {
  if (opt.dt_override > 0.0) cfg.dt = opt.dt_override;
  if (opt.horizon_override > 0.0) cfg.horizon = opt.horizon_override;
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  return cfg;
}

std::vector<double> hypothesis_grid(const MemoryKernel& kernel, double s_max) {
  std::vector<double> grid;
  const int count = 256;
  const double lo = std::log(1e-4 * s_max), hi = std::log(s_max);
  for (int i = 0; i < count; ++i)
    grid.push_back(std::exp(lo + (hi - lo) * i / (count - 1)));
  (void)kernel;
  return grid;
}

// Refuse hypothesis-violating kernels unless explicitly allowed.
bool gate_hypotheses(const BuiltProblem& built, bool allow_unverified) {
  const double s_max = built.problem.rule->s_max;
  const auto grid = hypothesis_grid(built.problem.kernel, s_max);
  const auto at_delta =
      validate_hypotheses(built.problem.kernel, grid, built.problem.kernel.delta());
  const auto at_gamma =
      validate_hypotheses(built.problem.kernel, grid, built.gamma_requested);
  const bool ok = at_delta.h1_nonneg && at_delta.h1_monotone &&
                  at_delta.h1_integrable && at_delta.h2_pass && at_gamma.h2_pass &&
                  built.gamma_requested < built.problem.kernel.delta();
  if (!ok) {
    std::cerr << "warning: kernel fails the validated hypotheses at gamma="
              << built.gamma_requested << "\n  at delta: " << at_delta.to_json()
              << "\n  at gamma: " << at_gamma.to_json() << "\n";
    if (!allow_unverified) {
      std::cerr << "refusing to run (pass --allow-unverified to override)\n";
      return false;
    }
  }
  return true;
}

int cmd_validate_kernel(const CommonOpts& opt, const std::string& json_out) {
  ParseOutcome parsed = parse_config(opt.config_path);
  if (!parsed.ok()) return fail_config(parsed);
  const RunConfig cfg = apply_overrides(*parsed.config, opt);
  BuiltProblem built = build_problem(cfg);
  const double s_max = built.problem.rule->s_max;
  const auto grid = hypothesis_grid(built.problem.kernel, s_max);
  const auto rep =
      validate_hypotheses(built.problem.kernel, grid, built.problem.kernel.delta());
  std::cout << rep.to_json() << "\n";
  if (!json_out.empty()) write_json_report(json_out, rep.to_json());
  const bool pass =
      rep.h1_nonneg && rep.h1_monotone && rep.h1_integrable && rep.h2_pass;
  return pass ? 0 : 1;
}

int cmd_simulate(const CommonOpts& opt) {
  ParseOutcome parsed = parse_config(opt.config_path);
  if (!parsed.ok()) return fail_config(parsed);
  const RunConfig cfg = apply_overrides(*parsed.config, opt);
  BuiltProblem built = build_problem(cfg);
  if (!gate_hypotheses(built, opt.allow_unverified)) return 1;
  fs::create_directories(cfg.out_dir);
  try {
    SolveResult run = solve(built.problem, built.u0, built.phi);
    const std::string base = cfg.out_dir + "/" + cfg.out_prefix;
    write_trajectory_csv(base + "_trajectory.csv", run, cfg.sample_stride);
    write_history_csv(base + "_history.csv", run.final_state.eta);
    write_checkpoint(base + "_final.ckpt", run.final_state, built.problem.kernel,
                     built.problem.gamma);
    std::cout << "steps=" << run.trajectory.steps()
              << " final_energy=" << run.records.back().energy << " wrote "
              << base << "_{trajectory.csv,history.csv,final.ckpt}\n";
    return 0;
  } catch (const SolverDivergence& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
}

int cmd_compare_oracle(const CommonOpts& opt, double tol) {
  ParseOutcome parsed = parse_config(opt.config_path);
  if (!parsed.ok()) return fail_config(parsed);
  const RunConfig cfg = apply_overrides(*parsed.config, opt);
  BuiltProblem built = build_problem(cfg);
  if (!gate_hypotheses(built, opt.allow_unverified)) return 1;
  SolveResult run = solve(built.problem, built.u0, built.phi);
  Trajectory ref = solve_reference(built.problem, built.u0, built.phi);
  double max_dev = 0.0;
  double t_at = 0.0;
  const std::size_t steps = std::min(run.trajectory.steps(), ref.steps());
  for (std::size_t k = 0; k <= steps; ++k) {
    double d = 0.0;
    for (int j = 0; j < ref.n_modes; ++j) {
      const double diff = run.trajectory.modal(k)[static_cast<std::size_t>(j)] -
                          ref.modal(k)[static_cast<std::size_t>(j)];
      d += diff * diff;
    }
    if (std::sqrt(d) > max_dev) {
      max_dev = std::sqrt(d);
      t_at = ref.times[k];
    }
  }
  std::cout << "max deviation " << max_dev << " at t=" << t_at
            << " (tolerance " << tol << ")\n";
  return max_dev <= tol ? 0 : 1;
}

int cmd_decay_report(const CommonOpts& opt, const std::string& json_out) {
  ParseOutcome parsed = parse_config(opt.config_path);
  if (!parsed.ok()) return fail_config(parsed);
  const RunConfig cfg = apply_overrides(*parsed.config, opt);
  BuiltProblem built = build_problem(cfg);
  if (!gate_hypotheses(built, opt.allow_unverified)) return 1;
  SolveResult run = solve(built.problem, built.u0, built.phi);
  const EnvelopeConstants c = envelope_constants(built.problem);
  const double e0 = built.u0.h_norm_sq() + run.phi_lv2;
  const EnvelopeReport env = envelope_check(run.records, c, e0);
  const AbsorbingReport abs = absorbing_entry(run.records, c, e0);

  std::printf("%-26s %s\n", "envelope", env.pass ? "PASS" : "FAIL");
  std::printf("%-26s % .6e\n", "min margin", env.min_margin);
  std::printf("%-26s % .6e\n", "margin tolerance", env.tolerance);
  std::printf("%-26s % .6e\n", "observed/bound max", env.max_ratio);
  std::printf("%-26s %.6g\n", "K1", c.k1);
  std::printf("%-26s %.6g\n", "K2", c.k2);
  std::printf("%-26s %.6g\n", "E0", e0);
  std::printf("%-26s %s\n", "absorbing status",
              abs.status == AbsorbStatus::entered
                  ? "entered"
                  : (abs.status == AbsorbStatus::inconclusive ? "inconclusive"
                                                              : "never-entered"));
  if (abs.status == AbsorbStatus::entered) {
    std::printf("%-26s %.6g\n", "entry time", abs.entry_time);
    std::printf("%-26s %.6g\n", "predicted entry", abs.predicted_entry);
  }
  if (!json_out.empty())
    write_json_report(json_out, "{\"envelope\": " + env.to_json() +
                                    ", \"absorbing\": " + abs.to_json() + "}");
  bool ok = env.pass;
  if (abs.status == AbsorbStatus::never_entered) ok = false;
  if (abs.status == AbsorbStatus::entered && e0 > 2.0 * c.k2 &&
      abs.entry_time > 1.1 * abs.predicted_entry)
    ok = false;
  return ok ? 0 : 1;
}

int cmd_separation(const CommonOpts& opt, int pairs, const std::string& csv_out) {
  ParseOutcome parsed = parse_config(opt.config_path);
  if (!parsed.ok()) return fail_config(parsed);
  const RunConfig cfg = apply_overrides(*parsed.config, opt);
  BuiltProblem built = build_problem(cfg);
  if (!gate_hypotheses(built, opt.allow_unverified)) return 1;
  const EnvelopeConstants c = envelope_constants(built.problem);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<CampaignRow> rows;
  bool ok = true;
  for (int pair = 0; pair < pairs; ++pair) {
    SpectralField ua = built.u0, ub = built.u0;
    for (std::size_t j = 0; j < ua.size(); ++j) {
      const double bump = 0.5 * unif(rng) / (1.0 + static_cast<double>(j));
      ub.coeffs[j] += bump;
    }
    SolveResult ra = solve(built.problem, ua, built.phi);
    SolveResult rb = solve(built.problem, ub, built.phi);
    SeparationResult sep =
        separation_decay(ra.trajectory, rb.trajectory, 0.0, built.problem, c.k5);
    CampaignRow row;
    row.config_hash = cfg.hash();
    row.e0 = sep.initial_separation;
    row.min_envelope_margin = 1.0 - sep.max_bound_ratio;
    row.fitted_separation_rate = sep.fitted_rate;
    rows.push_back(row);
    std::printf("pair %2d  initial %.3e  rate %.4f  bound ratio %.3f  %s\n", pair,
                sep.initial_separation, sep.fitted_rate, sep.max_bound_ratio,
                sep.bound_holds ? "ok" : "VIOLATION");
    if (!sep.bound_holds || sep.fitted_rate < 0.9 * built.problem.gamma) ok = false;
  }
  if (!csv_out.empty()) write_campaign_csv(csv_out, rows);
  return ok ? 0 : 1;
}

int cmd_attractor(const CommonOpts& opt, int ensemble, double transient,
                  const std::string& json_out) {
  ParseOutcome parsed = parse_config(opt.config_path);
  if (!parsed.ok()) return fail_config(parsed);
  const RunConfig cfg = apply_overrides(*parsed.config, opt);
  BuiltProblem built = build_problem(cfg);
  if (!gate_hypotheses(built, opt.allow_unverified)) return 1;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<SpectralField> starts;
  for (int i = 0; i < ensemble; ++i) {
    SpectralField u = built.u0;
    for (std::size_t j = 0; j < u.size(); ++j)
      u.coeffs[j] += unif(rng) / (1.0 + static_cast<double>(j * j));
    starts.push_back(std::move(u));
  }
  std::vector<SolveResult> runs(starts.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < static_cast<int>(starts.size()); ++i) {
    ProblemConfig local = built.problem;
    local.exec = Exec::serial;  // parallelism is over ensemble members
    runs[static_cast<std::size_t>(i)] =
        solve(local, starts[static_cast<std::size_t>(i)], built.phi);
  }
  AttractorProbe probe = attractor_probe(runs, transient);
  std::cout << probe.to_json() << "\n";
  if (!json_out.empty()) write_json_report(json_out, probe.to_json());
  return 0;
}

// Replace (or insert) `key = value` inside `[section]` of a config text.
std::string patch_config(std::string text, const std::string& section,
                         const std::string& key, const std::string& value) {
  std::istringstream is(text);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  std::string cur;
  bool replaced = false;
  int section_end = -1;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string t = lines[i];
    const auto h = t.find('#');
    if (h != std::string::npos) t = t.substr(0, h);
    const auto b = t.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    if (t[b] == '[') {
      const auto e = t.find(']');
      cur = t.substr(b + 1, e - b - 1);
      continue;
    }
    if (cur == section) {
      section_end = static_cast<int>(i);
      const auto eq = t.find('=');
      if (eq != std::string::npos) {
        std::string k = t.substr(0, eq);
        k.erase(0, k.find_first_not_of(" \t"));
        k.erase(k.find_last_not_of(" \t") + 1);
        if (k == key) {
          lines[i] = key + " = " + value;
          replaced = true;
        }
      }
    }
  }
  if (!replaced) {
    if (section_end >= 0) {
      lines.insert(lines.begin() + section_end + 1, key + " = " + value);
    } else {
      lines.push_back("[" + section + "]");
      lines.push_back(key + " = " + value);
    }
  }
  std::string out;
  for (const std::string& l : lines) out += l + "\n";
  return out;
}

int cmd_sweep(const CommonOpts& opt, const std::vector<std::string>& sets) {
  std::ifstream in(opt.config_path);
  if (!in) {
    std::cerr << "cannot open config '" << opt.config_path << "'\n";
    return 2;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string base_text = ss.str();

  struct Axis {
    std::string section, key;
    std::vector<std::string> values;
  };
  std::vector<Axis> axes;
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    const auto dot = s.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      std::cerr << "--set expects section.key=v1,v2,...  got '" << s << "'\n";
      return 2;
    }
    Axis ax;
    ax.section = s.substr(0, dot);
    ax.key = s.substr(dot + 1, eq - dot - 1);
    std::string vals = s.substr(eq + 1);
    std::istringstream vs(vals);
    std::string v;
    while (std::getline(vs, v, ',')) ax.values.push_back(v);
    if (ax.values.empty()) {
      std::cerr << "--set '" << s << "' has no values\n";
      return 2;
    }
    axes.push_back(std::move(ax));
  }
  std::size_t total = 1;
  for (const Axis& ax : axes) total *= ax.values.size();
  const std::string dir = opt.out_dir.empty() ? "sweep_out" : opt.out_dir;
  fs::create_directories(dir);

  std::vector<int> status(total, 0);
  std::vector<CampaignRow> rows(total);
#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < static_cast<int>(total); ++idx) {
    std::string text = base_text;
    std::size_t rem = static_cast<std::size_t>(idx);
    for (const Axis& ax : axes) {
      const std::string v = ax.values[rem % ax.values.size()];
      rem /= ax.values.size();
      text = patch_config(text, ax.section, ax.key, v);
    }
    ParseOutcome parsed = parse_config_text(text);
    if (!parsed.ok()) {
      status[static_cast<std::size_t>(idx)] = 2;
      continue;
    }
    try {
      RunConfig cfg = *parsed.config;
      BuiltProblem built = build_problem(cfg);
      ProblemConfig local = built.problem;
      local.exec = Exec::serial;
      SolveResult run = solve(local, built.u0, built.phi);
      const EnvelopeConstants c = envelope_constants(local);
      const double e0 = built.u0.h_norm_sq() + run.phi_lv2;
      const EnvelopeReport env = envelope_check(run.records, c, e0);
      const AbsorbingReport abs = absorbing_entry(run.records, c, e0);
      CampaignRow row;
      row.config_hash = cfg.hash();
      row.e0 = e0;
      row.entry_time = abs.status == AbsorbStatus::entered ? abs.entry_time : -1.0;
      row.min_envelope_margin = env.min_margin;
      rows[static_cast<std::size_t>(idx)] = row;
      write_trajectory_csv(dir + "/run_" + std::to_string(idx) + ".csv", run,
                           cfg.sample_stride);
      if (!env.pass) status[static_cast<std::size_t>(idx)] = 1;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "run %d failed: %s\n", idx, e.what());
      status[static_cast<std::size_t>(idx)] = 3;
    }
  }
  write_campaign_csv(dir + "/summary.csv", rows);
  int worst = 0;
  for (int s : status) worst = std::max(worst, s);
  std::cout << "sweep: " << total << " runs, summary in " << dir
            << "/summary.csv\n";
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral Galerkin simulator for semilinear heat flow with "
               "fading memory and non-local diffusion"};
  app.require_subcommand(1);

  CommonOpts opt;
  std::string json_out, csv_out;
  double tol = 1e-3;
  int pairs = 20, ensemble = 16;
  double transient = 5.0;
  std::vector<std::string> sets;

  auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    if (needs_config)
      cmd->add_option("config", opt.config_path, "config file")->required();
    cmd->add_option("--dt", opt.dt_override, "override time.dt");
    cmd->add_option("--T", opt.horizon_override, "override time.T");
    cmd->add_option("--out", opt.out_dir, "output directory override");
    cmd->add_option("--seed", opt.seed, "RNG seed for randomized commands");
    cmd->add_flag("--allow-unverified", opt.allow_unverified,
                  "run even if kernel hypotheses fail");
    cmd->add_flag("--serial", opt.serial, "disable the OpenMP kernels");
  };

  CLI::App* validate = app.add_subcommand("validate-kernel",
                                          "check kernel hypotheses, emit JSON");
  add_common(validate);
  validate->add_option("--json", json_out, "also write the JSON report here");

  CLI::App* simulate = app.add_subcommand("simulate", "run and write CSV/checkpoint");
  add_common(simulate);

  CLI::App* compare = app.add_subcommand(
      "compare-oracle", "cross-validate against the direct convolution solver");
  add_common(compare);
  compare->add_option("--tol", tol, "max H-norm deviation allowed");

  CLI::App* decay = app.add_subcommand("decay-report",
                                       "decay envelope and absorbing-ball report");
  add_common(decay);
  decay->add_option("--json", json_out, "also write the JSON report here");

  CLI::App* sep = app.add_subcommand("separation",
                                     "two-trajectory separation campaign");
  add_common(sep);
  sep->add_option("--pairs", pairs, "number of trajectory pairs");
  sep->add_option("--csv", csv_out, "campaign summary CSV path");

  CLI::App* att = app.add_subcommand("attractor-probe",
                                     "ensemble omega-limit statistics");
  add_common(att);
  att->add_option("--ensemble", ensemble, "ensemble size");
  att->add_option("--transient", transient, "discard records before this time");
  att->add_option("--json", json_out, "also write the JSON report here");

  CLI::App* sweep = app.add_subcommand("sweep", "cross parameter lists, run all");
  add_common(sweep);
  sweep->add_option("--set", sets, "section.key=v1,v2,... (repeatable)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (opt.serial) set_default_exec(Exec::serial);

  try {
    if (app.got_subcommand(validate)) return cmd_validate_kernel(opt, json_out);
    if (app.got_subcommand(simulate)) return cmd_simulate(opt);
    if (app.got_subcommand(compare)) return cmd_compare_oracle(opt, tol);
    if (app.got_subcommand(decay)) return cmd_decay_report(opt, json_out);
    if (app.got_subcommand(sep)) return cmd_separation(opt, pairs, csv_out);
    if (app.got_subcommand(att)) return cmd_attractor(opt, ensemble, transient, json_out);
    if (app.got_subcommand(sweep)) return cmd_sweep(opt, sets);
  } catch (const SolverDivergence& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
