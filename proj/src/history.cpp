#include "memheat/history.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "memheat/numerics.hpp"

namespace memheat {

namespace {

constexpr double kGl4X[2] = {0.3399810435848563, 0.8611363115940526};
constexpr double kGl4W[2] = {0.6521451548625461, 0.3478548451374538};

double exp_window_integral(double beta, double span) {
  // int_{-span}^0 e^{beta r} dr
  if (beta == 0.0) return span;
  return -std::expm1(-beta * span) / beta;
}

}  // namespace

PastTrajectory PastTrajectory::exp_mix(std::vector<std::vector<ExpTerm>> terms) {
  PastTrajectory p;
  p.n_modes_ = static_cast<int>(terms.size());
  p.terms_ = std::move(terms);
  return p;
}

PastTrajectory PastTrajectory::sampled(std::vector<double> rows, int n_modes,
                                       double dt,
                                       std::vector<std::vector<ExpTerm>> tail) {
  if (n_modes < 1) throw std::invalid_argument("past trajectory: n_modes >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("past trajectory: dt > 0");
  if (rows.size() % static_cast<std::size_t>(n_modes) != 0 ||
      rows.size() < 2 * static_cast<std::size_t>(n_modes))
    throw std::invalid_argument("past trajectory: need >= 2 sample rows");
  PastTrajectory p;
  p.n_modes_ = n_modes;
  p.rows_ = std::move(rows);
  p.dt_ = dt;
  p.n_rows_ = static_cast<int>(p.rows_.size() / static_cast<std::size_t>(n_modes));
  p.t_window_ = dt * (p.n_rows_ - 1);
  if (tail.empty())
    p.terms_.assign(static_cast<std::size_t>(n_modes), {});
  else {
    if (static_cast<int>(tail.size()) != n_modes)
      throw std::invalid_argument("past trajectory: tail mode count mismatch");
    p.terms_ = std::move(tail);
  }
  // cumulative integral from the right end (r=0), trapezoid on the samples
  p.cum_.assign(static_cast<std::size_t>(p.n_rows_) * n_modes, 0.0);
  for (int k = 1; k < p.n_rows_; ++k) {
    const int right = p.n_rows_ - k;      // row index of interval's right edge
    for (int j = 0; j < n_modes; ++j) {
      const double fa = p.rows_[static_cast<std::size_t>(right - 1) * n_modes + j];
      const double fb = p.rows_[static_cast<std::size_t>(right) * n_modes + j];
      p.cum_[static_cast<std::size_t>(k) * n_modes + j] =
          p.cum_[static_cast<std::size_t>(k - 1) * n_modes + j] + 0.5 * dt * (fa + fb);
    }
  }
  return p;
}

double PastTrajectory::eval(int j, double r) const {
  if (r > 0.0) r = 0.0;
  if (t_window_ > 0.0 && r >= -t_window_) {
    const double k = (r + t_window_) / dt_;
    int k0 = static_cast<int>(std::floor(k));
    k0 = std::clamp(k0, 0, n_rows_ - 2);
    const double frac = k - k0;
    const double a = rows_[static_cast<std::size_t>(k0) * n_modes_ + j];
    const double b = rows_[static_cast<std::size_t>(k0 + 1) * n_modes_ + j];
    return a + frac * (b - a);
  }
  const double rho = r + t_window_;  // <= 0
  double acc = 0.0;
  for (const ExpTerm& t : terms_[static_cast<std::size_t>(j)])
    acc += t.amp * std::exp(t.rate * rho);
  return acc;
}

double PastTrajectory::lift_integral(int j, double s) const {
  if (!(s >= 0.0)) throw std::domain_error("lift_integral: s >= 0");
  double acc = 0.0;
  double remaining = s;
  if (t_window_ > 0.0) {
    const double swin = std::min(s, t_window_);
    const double k = swin / dt_;
    int k0 = static_cast<int>(std::floor(k));
    k0 = std::clamp(k0, 0, n_rows_ - 1);
    acc += cum_[static_cast<std::size_t>(k0) * n_modes_ + j];
    const double ell = swin - k0 * dt_;
    if (ell > 0.0 && k0 < n_rows_ - 1) {
      const double f_right = eval(j, -k0 * dt_);
      const double f_at = eval(j, -swin);
      acc += 0.5 * ell * (f_at + f_right);
    }
    remaining = s - t_window_;
  }
  if (remaining > 0.0) {
    for (const ExpTerm& t : terms_[static_cast<std::size_t>(j)])
      acc += t.amp * exp_window_integral(t.rate, remaining);
  }
  return acc;
}

double PastTrajectory::weighted_sq_integral(int j, double gamma) const {
  if (!(gamma > 0.0)) throw std::invalid_argument("weighted_sq_integral: gamma > 0");
  double acc = 0.0;
  if (t_window_ > 0.0) {
    for (int k = 0; k + 1 < n_rows_; ++k) {
      const double ra = -t_window_ + k * dt_;
      const double mid = ra + 0.5 * dt_;
      for (int q = 0; q < 2; ++q) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          const double r = mid + sgn * 0.5 * dt_ * kGl4X[q];
          const double v = eval(j, r);
          acc += 0.5 * dt_ * kGl4W[q] * std::exp(gamma * r) * v * v;
        }
      }
    }
  }
  const auto& ts = terms_[static_cast<std::size_t>(j)];
  double tail = 0.0;
  for (const ExpTerm& a : ts)
    for (const ExpTerm& b : ts) {
      const double rate = gamma + a.rate + b.rate;
      if (!(rate > 0.0))
        throw std::invalid_argument(
            "past trajectory: exponential tail not in L_V^2 at this gamma");
      tail += a.amp * b.amp / rate;
    }
  acc += std::exp(-gamma * t_window_) * tail;
  return acc;
}

double PastTrajectory::min_rate() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& mode : terms_)
    for (const ExpTerm& t : mode)
      if (t.amp != 0.0) m = std::min(m, t.rate);
  return m;
}

double lv2_norm_sq(const PastTrajectory& phi, double gamma,
                   const SpatialBasis& basis) {
  if (phi.n_modes() != basis.n_modes())
    throw std::invalid_argument("lv2_norm_sq: mode count mismatch");
  double acc = 0.0;
  for (int j = 0; j < basis.n_modes(); ++j)
    acc += basis.lambda(j + 1) * phi.weighted_sq_integral(j, gamma);
  return acc;
}

HistoryField lift(const PastTrajectory& phi,
                  std::shared_ptr<const WeightedQuadrature> rule,
                  const SpatialBasis& basis, double gamma) {
  if (!rule) throw std::invalid_argument("lift: missing rule");
  if (phi.n_modes() != basis.n_modes())
    throw std::invalid_argument("lift: mode count mismatch");
  if (std::isfinite(gamma) && phi.min_rate() <= -0.5 * gamma)
    throw std::invalid_argument(
        "lift: trajectory has a rate <= -gamma/2, not in L_V^2");
  HistoryField eta;
  eta.rule = std::move(rule);
  eta.n_modes = basis.n_modes();
  eta.values.resize(static_cast<std::size_t>(eta.n_modes) * eta.rule->size());
  eta.slopes.resize(eta.values.size());
  for (int j = 0; j < eta.n_modes; ++j)
    for (std::size_t i = 0; i < eta.rule->size(); ++i) {
      const double s = eta.rule->nodes[i];
      eta.at(j, static_cast<int>(i)) = phi.lift_integral(j, s);
      eta.slope_at(j, static_cast<int>(i)) = phi.eval(j, -s);
    }
  return eta;
}

HistoryField zero_history(std::shared_ptr<const WeightedQuadrature> rule,
                          const SpatialBasis& basis) {
  if (!rule) throw std::invalid_argument("zero_history: missing rule");
  HistoryField eta;
  eta.rule = std::move(rule);
  eta.n_modes = basis.n_modes();
  eta.values.assign(static_cast<std::size_t>(eta.n_modes) * eta.rule->size(), 0.0);
  eta.slopes.assign(eta.values.size(), 0.0);
  return eta;
}

SpectralField memory_force(const HistoryField& eta, const SpatialBasis& basis,
                           Exec exec) {
  if (eta.n_modes != basis.n_modes())
    throw std::invalid_argument("memory_force: mode count mismatch");
  const int n = eta.n_modes;
  const int ns = eta.n_nodes();
  SpectralField out;
  out.coeffs.resize(static_cast<std::size_t>(n));
  const double* w = eta.rule->weights.data();
  if (exec == Exec::openmp) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
      const double* row = eta.values.data() + static_cast<std::size_t>(j) * ns;
      double acc = 0.0;
      for (int i = 0; i < ns; ++i) acc += w[i] * row[i];
      out[static_cast<std::size_t>(j)] = -basis.lambda(j + 1) * acc;
    }
  } else {
    for (int j = 0; j < n; ++j) {
      const double* row = eta.values.data() + static_cast<std::size_t>(j) * ns;
      double acc = 0.0;
      for (int i = 0; i < ns; ++i) acc += w[i] * row[i];
      out[static_cast<std::size_t>(j)] = -basis.lambda(j + 1) * acc;
    }
  }
  return out;
}

double history_norm_mu(const HistoryField& eta, const SpatialBasis& basis) {
  if (eta.n_modes != basis.n_modes())
    throw std::invalid_argument("history_norm_mu: mode count mismatch");
  const int ns = eta.n_nodes();
  const double* w = eta.rule->weights.data();
  double acc = 0.0;
  for (int j = 0; j < eta.n_modes; ++j) {
    const double* row = eta.values.data() + static_cast<std::size_t>(j) * ns;
    double s = 0.0;
    for (int i = 0; i < ns; ++i) s += w[i] * row[i] * row[i];
    acc += basis.lambda(j + 1) * s;
  }
  return acc;
}

AdvancePlan make_advance_plan(const WeightedQuadrature& rule, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("advance plan: dt must be positive");
  const std::size_t ns = rule.size();
  AdvancePlan plan;
  plan.dt = dt;
  plan.cell.resize(ns);
  plan.target.resize(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    const double tgt = rule.nodes[i] - dt;
    plan.target[i] = tgt;
    if (tgt <= 0.0) {
      plan.cell[i] = -1;
      continue;
    }
    // extended grid x = {0, s_0, s_1, ...}; find cell with x[c] <= tgt < x[c+1]
    auto it = std::upper_bound(rule.nodes.begin(), rule.nodes.end(), tgt);
    plan.cell[i] = static_cast<int>(it - rule.nodes.begin());  // 0 => cell [0, s_0)
  }
  return plan;
}

namespace {

void advance_row(const WeightedQuadrature& rule, const AdvancePlan& plan,
                 const double* old_row, const double* old_slope, double inc,
                 double dt, double b_end, double* new_row, double* new_slope,
                 std::vector<double>& x_ext, std::vector<double>& y_ext,
                 std::vector<double>& d_ext) {
  const int ns = static_cast<int>(rule.size());
  const double b_start = 2.0 * inc / dt - b_end;
  // Extended grid with the exact boundary pair eta(0)=0, eta_s(0)=u(t).
  y_ext[0] = 0.0;
  d_ext[0] = b_start;
  for (int i = 0; i < ns; ++i) {
    y_ext[static_cast<std::size_t>(i) + 1] = old_row[i];
    d_ext[static_cast<std::size_t>(i) + 1] = old_slope[i];
  }
  const double step_slope = (b_end - b_start) / dt;
  for (int i = 0; i < ns; ++i) {
    const double s = rule.nodes[static_cast<std::size_t>(i)];
    if (plan.cell[static_cast<std::size_t>(i)] < 0) {
      // s_i <= dt: rebuild from the definition with b linear on the step
      new_row[i] = s * b_end - 0.5 * s * s * step_slope;
      new_slope[i] = b_end - s * step_slope;
      continue;
    }
    const int c = plan.cell[static_cast<std::size_t>(i)];
    const double x = plan.target[static_cast<std::size_t>(i)];
    const double x0 = x_ext[static_cast<std::size_t>(c)];
    const double x1 = x_ext[static_cast<std::size_t>(c) + 1];
    const double y0 = y_ext[static_cast<std::size_t>(c)];
    const double y1 = y_ext[static_cast<std::size_t>(c) + 1];
    const double d0 = d_ext[static_cast<std::size_t>(c)];
    const double d1 = d_ext[static_cast<std::size_t>(c) + 1];
    new_row[i] = num::hermite_eval(x0, x1, y0, y1, d0, d1, x) + inc;
    new_slope[i] = num::hermite_deriv(x0, x1, y0, y1, d0, d1, x);
  }
}

}  // namespace

HistoryField advance(const HistoryField& eta, std::span<const double> u_increment,
                     double dt, const SpectralField& u_end, Exec exec) {
  return advance(eta, make_advance_plan(*eta.rule, dt), u_increment, u_end, exec);
}

HistoryField advance(const HistoryField& eta, const AdvancePlan& plan,
                     std::span<const double> u_increment,
                     const SpectralField& u_end, Exec exec) {
  const double dt = plan.dt;
  if (!(dt > 0.0)) throw std::invalid_argument("advance: dt must be positive");
  if (static_cast<int>(u_increment.size()) != eta.n_modes ||
      static_cast<int>(u_end.size()) != eta.n_modes)
    throw std::invalid_argument("advance: increment/mode mismatch");
  if (plan.cell.size() != eta.rule->size())
    throw std::invalid_argument("advance: plan built for a different rule");
  const int n = eta.n_modes;
  const int ns = eta.n_nodes();

  HistoryField out;
  out.rule = eta.rule;
  out.n_modes = n;
  out.values.resize(eta.values.size());
  out.slopes.resize(eta.values.size());

  std::vector<double> x_ext(static_cast<std::size_t>(ns) + 1);
  x_ext[0] = 0.0;
  for (int i = 0; i < ns; ++i)
    x_ext[static_cast<std::size_t>(i) + 1] = eta.rule->nodes[static_cast<std::size_t>(i)];

  if (exec == Exec::openmp) {
#pragma omp parallel
    {
      std::vector<double> y_ext(static_cast<std::size_t>(ns) + 1);
      std::vector<double> d_ext(static_cast<std::size_t>(ns) + 1);
#pragma omp for schedule(static)
      for (int j = 0; j < n; ++j)
        advance_row(*eta.rule, plan,
                    eta.values.data() + static_cast<std::size_t>(j) * ns,
                    eta.slopes.data() + static_cast<std::size_t>(j) * ns,
                    u_increment[static_cast<std::size_t>(j)], dt,
                    u_end[static_cast<std::size_t>(j)],
                    out.values.data() + static_cast<std::size_t>(j) * ns,
                    out.slopes.data() + static_cast<std::size_t>(j) * ns, x_ext,
                    y_ext, d_ext);
    }
  } else {
    std::vector<double> y_ext(static_cast<std::size_t>(ns) + 1);
    std::vector<double> d_ext(static_cast<std::size_t>(ns) + 1);
    for (int j = 0; j < n; ++j)
      advance_row(*eta.rule, plan,
                  eta.values.data() + static_cast<std::size_t>(j) * ns,
                  eta.slopes.data() + static_cast<std::size_t>(j) * ns,
                  u_increment[static_cast<std::size_t>(j)], dt,
                  u_end[static_cast<std::size_t>(j)],
                  out.values.data() + static_cast<std::size_t>(j) * ns,
                  out.slopes.data() + static_cast<std::size_t>(j) * ns, x_ext,
                  y_ext, d_ext);
  }
  return out;
}

double equivalence_residual(const HistoryField& eta_from_lift,
                            const PastTrajectory& phi, const MemoryKernel& kernel,
                            const SpatialBasis& basis) {
  if (eta_from_lift.n_modes != basis.n_modes() ||
      phi.n_modes() != basis.n_modes())
    throw std::invalid_argument("equivalence_residual: mode count mismatch");
  const int ns = eta_from_lift.n_nodes();
  const double* w = eta_from_lift.rule->weights.data();
  double worst = 0.0;
  for (int j = 0; j < eta_from_lift.n_modes; ++j) {
    const double* row = eta_from_lift.values.data() + static_cast<std::size_t>(j) * ns;
    double lhs = 0.0;
    for (int i = 0; i < ns; ++i) lhs += w[i] * row[i];
    const auto integrand = [&](double sigma) {
      return kernel.k_of(sigma) * phi.eval(j, -sigma);
    };
    const double rhs =
        num::integrate_decaying(integrand, 0.0, 0.5 * kernel.delta(), 1e-12).value;
    const double denom = std::max(std::fabs(rhs), 1e-300);
    double rel = std::fabs(lhs - rhs) / denom;
    if (rhs == 0.0 && lhs == 0.0) rel = 0.0;
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace memheat
