#include "memheat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "memheat/numerics.hpp"

namespace memheat {

double ProblemConfig::k0_dissipation() const {
  double g_sq = forcing.h_norm_sq();
  return 2.0 * a0_const() * basis.length() +
         2.0 * g_sq / (a.m() * basis.lambda1());
}

SpectralField Trajectory::field(std::size_t k) const {
  SpectralField u;
  auto row = modal(k);
  u.coeffs.assign(row.begin(), row.end());
  return u;
}

SpectralField rhs(const SystemState& state, const ProblemConfig& cfg) {
  const int n = cfg.basis.n_modes();
  const double a_val = cfg.a.value(state.u);
  SpectralField force = memory_force(state.eta, cfg.basis, cfg.exec);
  SpectralField fg;
  if (cfg.f)
    fg = nonlinear_galerkin(state.u, *cfg.f, cfg.basis, cfg.exec);
  else
    fg.coeffs.assign(static_cast<std::size_t>(n), 0.0);
  SpectralField out;
  out.coeffs.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const std::size_t sj = static_cast<std::size_t>(j);
    const double gj = sj < cfg.forcing.size() ? cfg.forcing[sj] : 0.0;
    out[sj] = -cfg.basis.lambda(j + 1) * a_val * state.u[sj] + force[sj] -
              fg[sj] + gj;
  }
  return out;
}

namespace {

struct StepPieces {
  SpectralField u_new;
  std::vector<double> increments;
  double a_val = 0.0;
};

StepPieces imex_update(const SpectralField& u, const SpectralField& force,
                       const SpectralField& fgal, const ProblemConfig& cfg) {
  const int n = cfg.basis.n_modes();
  const double dt = cfg.dt;
  StepPieces out;
  out.a_val = cfg.a.value(u);
  out.u_new.coeffs.resize(static_cast<std::size_t>(n));
  out.increments.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const std::size_t sj = static_cast<std::size_t>(j);
    const double gj = sj < cfg.forcing.size() ? cfg.forcing[sj] : 0.0;
    const double expl = force[sj] - fgal[sj] + gj;
    const double bj =
        (u[sj] + dt * expl) / (1.0 + dt * cfg.basis.lambda(j + 1) * out.a_val);
    out.u_new[sj] = bj;
    out.increments[sj] = 0.5 * dt * (u[sj] + bj);
  }
  return out;
}

SpectralField galerkin_or_zero(const SpectralField& u, const ProblemConfig& cfg) {
  if (cfg.f) return nonlinear_galerkin(u, *cfg.f, cfg.basis, cfg.exec);
  SpectralField z;
  z.coeffs.assign(u.size(), 0.0);
  return z;
}

}  // namespace

SystemState step_imex(const SystemState& state, const ProblemConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("step_imex: dt must be positive");
  SpectralField force = memory_force(state.eta, cfg.basis, cfg.exec);
  SpectralField fgal = galerkin_or_zero(state.u, cfg);
  StepPieces p = imex_update(state.u, force, fgal, cfg);
  SystemState next;
  next.t = state.t + cfg.dt;
  next.u = p.u_new;
  next.eta = advance(state.eta, p.increments, cfg.dt, p.u_new, cfg.exec);
  return next;
}

// ---------------------------------------------------------------------------
// RK4 (method of lines) validation scheme
// ---------------------------------------------------------------------------

namespace {

struct Mol {
  const ProblemConfig& cfg;
  std::vector<double> x_ext;  // {0, s_1, ..., s_N}

  explicit Mol(const ProblemConfig& c) : cfg(c) {
    const auto& nodes = c.rule->nodes;
    x_ext.resize(nodes.size() + 1);
    x_ext[0] = 0.0;
    std::copy(nodes.begin(), nodes.end(), x_ext.begin() + 1);
  }

  // y = (b, eta rows); dy = (db, deta rows)
  void operator()(const std::vector<double>& y, std::vector<double>& dy) const {
    const int n = cfg.basis.n_modes();
    const int ns = static_cast<int>(cfg.rule->size());
    SpectralField u;
    u.coeffs.assign(y.begin(), y.begin() + n);
    HistoryField eta;
    eta.rule = cfg.rule;
    eta.n_modes = n;
    eta.values.assign(y.begin() + n, y.end());
    SystemState s;
    s.u = u;
    s.eta = std::move(eta);
    SpectralField db = rhs(s, cfg);
    std::copy(db.coeffs.begin(), db.coeffs.end(), dy.begin());
    const int total = n;
    if (cfg.exec == Exec::openmp) {
#pragma omp parallel
      {
        std::vector<double> y_ext(static_cast<std::size_t>(ns) + 1);
        std::vector<double> d_ext(static_cast<std::size_t>(ns) + 1);
#pragma omp for schedule(static)
        for (int j = 0; j < total; ++j)
          transport_row(y, dy, j, ns, n, y_ext, d_ext);
      }
    } else {
      std::vector<double> y_ext(static_cast<std::size_t>(ns) + 1);
      std::vector<double> d_ext(static_cast<std::size_t>(ns) + 1);
      for (int j = 0; j < total; ++j) transport_row(y, dy, j, ns, n, y_ext, d_ext);
    }
  }

  void transport_row(const std::vector<double>& y, std::vector<double>& dy,
                     int j, int ns, int n, std::vector<double>& y_ext,
                     std::vector<double>& d_ext) const {
    const double uj = y[static_cast<std::size_t>(j)];
    const double* row = y.data() + n + static_cast<std::size_t>(j) * ns;
    double* drow = dy.data() + n + static_cast<std::size_t>(j) * ns;
    y_ext[0] = 0.0;
    for (int i = 0; i < ns; ++i) y_ext[static_cast<std::size_t>(i) + 1] = row[i];
    num::central_slopes(x_ext, y_ext, d_ext);
    for (int i = 0; i < ns; ++i)
      drow[i] = uj - d_ext[static_cast<std::size_t>(i) + 1];
  }
};

}  // namespace

SystemState step_rk4(const SystemState& state, const ProblemConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
  const int n = cfg.basis.n_modes();
  const int ns = static_cast<int>(cfg.rule->size());
  const std::size_t dim = static_cast<std::size_t>(n) * (1 + ns);
  Mol mol(cfg);
  std::vector<double> y(dim), k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  std::copy(state.u.coeffs.begin(), state.u.coeffs.end(), y.begin());
  std::copy(state.eta.values.begin(), state.eta.values.end(), y.begin() + n);
  const double dt = cfg.dt;
  mol(y, k1);
  for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  mol(tmp, k2);
  for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  mol(tmp, k3);
  for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + dt * k3[i];
  mol(tmp, k4);
  SystemState next;
  next.t = state.t + dt;
  next.u.coeffs.resize(static_cast<std::size_t>(n));
  next.eta.rule = cfg.rule;
  next.eta.n_modes = n;
  next.eta.values.resize(static_cast<std::size_t>(n) * ns);
  for (std::size_t i = 0; i < dim; ++i) {
    const double v =
        y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (i < static_cast<std::size_t>(n))
      next.u.coeffs[i] = v;
    else
      next.eta.values[i - static_cast<std::size_t>(n)] = v;
  }
  // keep the slope field coherent for downstream consumers of the state
  next.eta.slopes.resize(next.eta.values.size());
  {
    std::vector<double> y_ext(static_cast<std::size_t>(ns) + 1);
    std::vector<double> d_ext(static_cast<std::size_t>(ns) + 1);
    for (int j = 0; j < n; ++j) {
      y_ext[0] = 0.0;
      for (int i = 0; i < ns; ++i)
        y_ext[static_cast<std::size_t>(i) + 1] = next.eta.at(j, i);
      num::central_slopes(mol.x_ext, y_ext, d_ext);
      for (int i = 0; i < ns; ++i)
        next.eta.slope_at(j, i) = d_ext[static_cast<std::size_t>(i) + 1];
    }
  }
  return next;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

SolveResult solve(const ProblemConfig& cfg, const SpectralField& u0,
                  const PastTrajectory& phi) {
  const int n = cfg.basis.n_modes();
  if (static_cast<int>(u0.size()) != n)
    throw std::invalid_argument("solve: u0 size mismatch");
  if (!(cfg.dt > 0.0) || cfg.horizon < 0.0)
    throw std::invalid_argument("solve: need dt > 0 and horizon >= 0");
  if (!cfg.rule) throw std::invalid_argument("solve: missing quadrature rule");
  if (cfg.f && cfg.basis.n_collocation() < cfg.f->p() * n + 1)
    throw std::invalid_argument("solve: collocation grid too small for f");

  const double dt = cfg.dt;
  const std::size_t steps = static_cast<std::size_t>(std::llround(cfg.horizon / dt));

  SolveResult res;
  res.phi_lv2 = lv2_norm_sq(phi, cfg.gamma, cfg.basis);

  SystemState state;
  state.t = 0.0;
  state.u = u0;
  state.eta = lift(phi, cfg.rule, cfg.basis, cfg.gamma);

  Trajectory& traj = res.trajectory;
  traj.n_modes = n;
  traj.dt = dt;
  traj.times.reserve(steps + 1);
  traj.coeffs.reserve((steps + 1) * static_cast<std::size_t>(n));
  traj.increments.reserve(steps * static_cast<std::size_t>(n));
  traj.v_norm_sq.reserve(steps + 1);

  const double k0c = cfg.k0_dissipation();
  const double m_low = cfg.a.m();
  const double f0 = cfg.f0();
  const double decay = std::exp(-cfg.gamma * dt);
  const double half_decay = std::exp(-0.5 * cfg.gamma * dt);

  auto snapshot = [&](const SystemState& s) {
    traj.times.push_back(s.t);
    traj.coeffs.insert(traj.coeffs.end(), s.u.coeffs.begin(), s.u.coeffs.end());
    traj.v_norm_sq.push_back(cfg.basis.v_norm_sq(s.u));
  };

  const AdvancePlan plan = make_advance_plan(*cfg.rule, dt);

  // Forces at the current state; reused by both the step and the residual of
  // the step that produced the state.
  SpectralField force = memory_force(state.eta, cfg.basis, cfg.exec);
  SpectralField fgal = galerkin_or_zero(state.u, cfg);
  double a_here = cfg.a.value(state.u);

  auto make_record = [&](const SystemState& s, const SpectralField& F,
                         double I_run) {
    DiagnosticsRecord r;
    r.t = s.t;
    r.u_h_sq = s.u.h_norm_sq();
    r.u_v_sq = cfg.basis.v_norm_sq(s.u);
    r.eta_mu_sq = history_norm_mu(s.eta, cfg.basis);
    r.energy = r.u_h_sq + r.eta_mu_sq;
    r.lp2p = cfg.f ? lp2p_norm(s.u, *cfg.f, cfg.basis) : 0.0;
    r.lv2 = std::exp(-cfg.gamma * s.t) * res.phi_lv2 + I_run;
    r.x_norm = r.u_h_sq + r.lv2;
    for (double fj : F.coeffs) r.mem_force_max = std::max(r.mem_force_max, std::fabs(fj));
    return r;
  };

  double I_run = 0.0;
  snapshot(state);
  DiagnosticsRecord rec0 = make_record(state, force, I_run);
  rec0.residual_allowance = 10.0 * cfg.rule->tol * (1.0 + rec0.energy);
  res.records.push_back(rec0);
  const double e_guard = 1e6 * std::max(1.0, rec0.energy);

  for (std::size_t k = 0; k < steps; ++k) {
    SystemState next;
    std::vector<double> inc;
    if (cfg.scheme == Scheme::imex) {
      StepPieces p = imex_update(state.u, force, fgal, cfg);
      next.t = (static_cast<double>(k) + 1.0) * dt;
      next.u = p.u_new;
      next.eta = advance(state.eta, plan, p.increments, p.u_new, cfg.exec);
      inc = std::move(p.increments);
    } else {
      next = step_rk4(state, cfg);
      next.t = (static_cast<double>(k) + 1.0) * dt;
      inc.resize(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j)
        inc[static_cast<std::size_t>(j)] =
            0.5 * dt *
            (state.u[static_cast<std::size_t>(j)] + next.u[static_cast<std::size_t>(j)]);
    }

    bool finite = true;
    for (double v : next.u.coeffs)
      if (!std::isfinite(v)) finite = false;
    const double e_next =
        finite ? next.u.h_norm_sq() + history_norm_mu(next.eta, cfg.basis) : 0.0;
    if (!finite || e_next > e_guard) {
      std::ostringstream os;
      os << "solver diverged at step " << (k + 1) << " (t=" << next.t
         << "): " << (finite ? "energy grew by more than 1e6x" : "non-finite state")
         << "; reduce dt (current dt=" << dt << ")";
      throw SolverDivergence(os.str(), next.t, k + 1,
                             std::make_shared<SystemState>(std::move(state)));
    }

    traj.increments.insert(traj.increments.end(), inc.begin(), inc.end());
    snapshot(next);

    // forces at the new state (consumed by the next step and this residual)
    SpectralField force_next = memory_force(next.eta, cfg.basis, cfg.exec);
    SpectralField fgal_next = galerkin_or_zero(next.u, cfg);
    const double a_next = cfg.a.value(next.u);

    const double v_prev = traj.v_norm_sq[k];
    const double v_here = traj.v_norm_sq[k + 1];
    I_run = decay * I_run + dt * half_decay * 0.5 * (v_prev + v_here);

    DiagnosticsRecord r = make_record(next, force_next, I_run);
    const double e_prev = res.records.back().energy;
    r.dissipation_residual = (r.energy - e_prev) / dt + cfg.gamma * r.energy +
                             0.5 * m_low * r.u_v_sq + f0 * r.lp2p - k0c;
    // O(dt) consistency allowance from measured one-step changes plus the
    // quadrature scale of the rule.
    double dF = 0.0, dfg = 0.0, du = 0.0, b1 = 0.0;
    for (int j = 0; j < n; ++j) {
      const std::size_t sj = static_cast<std::size_t>(j);
      dF += (force_next[sj] - force[sj]) * (force_next[sj] - force[sj]);
      dfg += (fgal_next[sj] - fgal[sj]) * (fgal_next[sj] - fgal[sj]);
      du += (next.u[sj] - state.u[sj]) * (next.u[sj] - state.u[sj]);
      b1 += next.u[sj] * next.u[sj];
    }
    dF = std::sqrt(dF);
    dfg = std::sqrt(dfg);
    du = std::sqrt(du);
    b1 = std::sqrt(b1);
    const double scale = 1.0 + std::max(e_prev, r.energy) + r.u_v_sq + r.lp2p + k0c;
    r.residual_allowance = 10.0 * cfg.rule->tol * scale +
                           2.0 * (dF + dfg) * b1 +
                           2.0 * std::fabs(a_next - a_here) * r.u_v_sq +
                           du * du / dt + 8.0 * dt * scale;
    res.records.push_back(r);

    state = std::move(next);
    force = std::move(force_next);
    fgal = std::move(fgal_next);
    a_here = a_next;
  }

  res.final_state = std::move(state);
  return res;
}

// ---------------------------------------------------------------------------
// Direct convolution reference
// ---------------------------------------------------------------------------

namespace {

// Closed-form t<0 tail for the exponential kernel and a pure exponential-mix
// phi; otherwise adaptive quadrature of k(t+sigma) phi(-sigma).
class TailTerm {
 public:
  TailTerm(const ProblemConfig& cfg, const PastTrajectory& phi)
      : cfg_(cfg), phi_(phi) {
    closed_ = cfg.kernel.family() == KernelFamily::exponential && !phi.has_window();
    if (closed_) {
      const double c = cfg.kernel.amplitude();
      const double delta = cfg.kernel.delta();
      amp_.resize(static_cast<std::size_t>(phi.n_modes()), 0.0);
      for (int j = 0; j < phi.n_modes(); ++j)
        for (const ExpTerm& t : phi.exp_terms()[static_cast<std::size_t>(j)]) {
          if (!(delta + t.rate > 0.0))
            throw std::invalid_argument("solve_reference: tail integral diverges");
          amp_[static_cast<std::size_t>(j)] += t.amp * (c / delta) / (delta + t.rate);
        }
    }
  }

  double operator()(int j, double t) const {
    if (closed_) return amp_[static_cast<std::size_t>(j)] * std::exp(-cfg_.kernel.delta() * t);
    const auto f = [&](double sigma) {
      return cfg_.kernel.k_of(t + sigma) * phi_.eval(j, -sigma);
    };
    return num::integrate_decaying(f, 0.0, 0.5 * cfg_.kernel.delta(), 1e-10).value;
  }

 private:
  const ProblemConfig& cfg_;
  const PastTrajectory& phi_;
  bool closed_ = false;
  std::vector<double> amp_;
};

}  // namespace

Trajectory solve_reference(const ProblemConfig& cfg, const SpectralField& u0,
                           const PastTrajectory& phi,
                           std::size_t max_state_bytes) {
  const int n = cfg.basis.n_modes();
  if (static_cast<int>(u0.size()) != n)
    throw std::invalid_argument("solve_reference: u0 size mismatch");
  const double dt = cfg.dt;
  const std::size_t steps = static_cast<std::size_t>(std::llround(cfg.horizon / dt));
  const std::size_t bytes = (steps + 2) * static_cast<std::size_t>(n) * sizeof(double);
  if (bytes > max_state_bytes)
    throw std::invalid_argument(
        "solve_reference: stored history would exceed the footprint guard");

  TailTerm tail(cfg, phi);
  Trajectory traj;
  traj.n_modes = n;
  traj.dt = dt;
  traj.times.resize(steps + 1);
  traj.coeffs.assign((steps + 2) * static_cast<std::size_t>(n), 0.0);  // +1 scratch row
  traj.v_norm_sq.resize(steps + 1);
  traj.increments.resize(steps * static_cast<std::size_t>(n));

  std::copy(u0.coeffs.begin(), u0.coeffs.end(), traj.coeffs.begin());
  traj.times[0] = 0.0;
  traj.v_norm_sq[0] = cfg.basis.v_norm_sq(u0);

  // Kernel values on the uniform lag grid, shared by every convolution.
  std::vector<double> k_lag(steps + 2);
  for (std::size_t q = 0; q < k_lag.size(); ++q)
    k_lag[q] = cfg.kernel.k_of(static_cast<double>(q) * dt);

  // Trapezoidal memory sum over rows [0..m] at time index m, per mode.
  auto convolution = [&](int j, std::size_t m) {
    const double* col = traj.coeffs.data() + j;
    double acc = 0.5 * (k_lag[m] * col[0] +
                        k_lag[0] * col[m * static_cast<std::size_t>(n)]);
    for (std::size_t i = 1; i < m; ++i)
      acc += k_lag[m - i] * col[i * static_cast<std::size_t>(n)];
    return acc * dt;
  };

  SpectralField u = u0;
  std::vector<double> mem(static_cast<std::size_t>(n));
  std::vector<double> k1(static_cast<std::size_t>(n)), k2(static_cast<std::size_t>(n));

  auto eval_rhs = [&](const SpectralField& field, std::size_t m, double t,
                      std::vector<double>& out) {
    const double a_val = cfg.a.value(field);
    SpectralField fg;
    if (cfg.f)
      fg = nonlinear_galerkin(field, *cfg.f, cfg.basis, cfg.exec);
    else
      fg.coeffs.assign(static_cast<std::size_t>(n), 0.0);
    // a single trajectory advances sequentially; ensembles parallelize
    // across runs instead (see the concurrency notes in the README)
    for (int j = 0; j < n; ++j)
      mem[static_cast<std::size_t>(j)] = tail(j, t) + convolution(j, m);
    for (int j = 0; j < n; ++j) {
      const std::size_t sj = static_cast<std::size_t>(j);
      const double gj = sj < cfg.forcing.size() ? cfg.forcing[sj] : 0.0;
      out[sj] = -cfg.basis.lambda(j + 1) * (a_val * field[sj] + mem[sj]) -
                fg[sj] + gj;
    }
  };

  for (std::size_t m = 0; m < steps; ++m) {
    const double t = static_cast<double>(m) * dt;
    eval_rhs(u, m, t, k1);
    SpectralField pred;
    pred.coeffs.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      pred[static_cast<std::size_t>(j)] =
          u[static_cast<std::size_t>(j)] + dt * k1[static_cast<std::size_t>(j)];
    // Stage 2 sees the predictor as the provisional new row.
    std::copy(pred.coeffs.begin(), pred.coeffs.end(),
              traj.coeffs.begin() + (m + 1) * static_cast<std::size_t>(n));
    eval_rhs(pred, m + 1, t + dt, k2);
    SpectralField next;
    next.coeffs.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      const std::size_t sj = static_cast<std::size_t>(j);
      next[sj] = u[sj] + 0.5 * dt * (k1[sj] + k2[sj]);
      traj.increments[m * static_cast<std::size_t>(n) + sj] =
          0.5 * dt * (u[sj] + next[sj]);
    }
    std::copy(next.coeffs.begin(), next.coeffs.end(),
              traj.coeffs.begin() + (m + 1) * static_cast<std::size_t>(n));
    for (double v : next.coeffs)
      if (!std::isfinite(v))
        throw SolverDivergence("solve_reference: non-finite state", t + dt, m + 1);
    traj.times[m + 1] = t + dt;
    traj.v_norm_sq[m + 1] = cfg.basis.v_norm_sq(next);
    u = std::move(next);
  }
  traj.coeffs.resize((steps + 1) * static_cast<std::size_t>(n));
  return traj;
}

PastTrajectory restart_past(const PastTrajectory& phi, const Trajectory& traj) {
  if (phi.has_window())
    throw std::invalid_argument("restart_past: original phi must be a pure exponential mix");
  std::vector<double> rows(traj.coeffs.begin(), traj.coeffs.end());
  return PastTrajectory::sampled(std::move(rows), traj.n_modes, traj.dt,
                                 phi.exp_terms());
}

std::optional<SpectralField> steady_state(const ProblemConfig& cfg,
                                          const SpectralField& start,
                                          double tol, int max_iter) {
  const int n = cfg.basis.n_modes();
  SpectralField b = start;
  const double lam_n = cfg.basis.lambda(n);
  const double d0 = cfg.f ? cfg.f->d0() : 0.0;
  const double tau = 1.0 / (lam_n * cfg.a.m_tilde() + d0 + 1.0);
  for (int it = 0; it < max_iter; ++it) {
    const double a_val = cfg.a.value(b);
    SpectralField fg = galerkin_or_zero(b, cfg);
    double norm = 0.0;
    for (int j = 0; j < n; ++j) {
      const std::size_t sj = static_cast<std::size_t>(j);
      const double gj = sj < cfg.forcing.size() ? cfg.forcing[sj] : 0.0;
      const double res = cfg.basis.lambda(j + 1) * a_val * b[sj] + fg[sj] - gj;
      b[sj] -= tau * res;
      norm += res * res;
    }
    if (std::sqrt(norm) < tol) return b;
  }
  return std::nullopt;
}

}  // namespace memheat
