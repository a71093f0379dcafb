#include "memheat/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace memheat {

EnvelopeConstants envelope_constants(double m, double k_mu, double k0,
                                     double gamma, double delta) {
  if (!(m > 0.0 && k_mu > 0.0 && gamma > 0.0 && delta > 0.0) || k0 < 0.0)
    throw std::invalid_argument("envelope_constants: inputs must be positive");
  if (!(gamma < delta))
    throw std::invalid_argument("envelope_constants: requires gamma < delta");
  EnvelopeConstants c;
  c.k0 = k0;
  c.k_mu = k_mu;
  c.gamma = gamma;
  c.k1 = (1.0 + 2.0 / m) * std::max(1.0, k_mu) + 1.0;
  c.k2 = (1.0 + 2.0 / m) * k0 / gamma;
  c.k5 = ((gamma + delta) * (gamma + delta) + 1.0) / m;
  return c;
}

EnvelopeConstants envelope_constants(const ProblemConfig& cfg) {
  const double k_mu = k_mu_bound(cfg.kernel, cfg.gamma);
  return envelope_constants(cfg.a.m(), k_mu, cfg.k0_dissipation(), cfg.gamma,
                            cfg.kernel.delta());
}

double x_norm_direct(const Trajectory& traj, double phi_lv2, double gamma,
                     std::size_t k) {
  if (k >= traj.times.size()) throw std::invalid_argument("x_norm_direct: index");
  const double t = traj.times[k];
  // int_0^t e^{-gamma (t-s)} ||u(s)||^2 ds with ||u||^2 piecewise linear and
  // the exponential integrated exactly on every step.
  double integral = 0.0;
  const double g = gamma;
  for (std::size_t i = 0; i < k; ++i) {
    const double s0 = traj.times[i], s1 = traj.times[i + 1];
    const double h = s1 - s0;
    const double v0 = traj.v_norm_sq[i], v1 = traj.v_norm_sq[i + 1];
    // int_{s0}^{s1} e^{-g (t-s)} (v0 + (v1-v0)(s-s0)/h) ds
    const double e1 = std::exp(-g * (t - s1));
    const double e0 = std::exp(-g * (t - s0));
    if (g * h < 1e-8) {
      integral += 0.5 * h * (v0 * e0 + v1 * e1);
    } else {
      const double slope = (v1 - v0) / h;
      integral += (v1 * e1 - v0 * e0) / g - slope * (e1 - e0) / (g * g);
    }
  }
  double u_sq = 0.0;
  for (double b : traj.modal(k)) u_sq += b * b;
  return u_sq + std::exp(-g * t) * phi_lv2 + integral;
}

std::string EnvelopeReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"pass\": " << (pass ? "true" : "false")
     << ", \"min_margin\": " << min_margin << ", \"worst_t\": " << worst_t
     << ", \"tolerance\": " << tolerance << ", \"max_ratio\": " << max_ratio
     << "}";
  return os.str();
}

EnvelopeReport envelope_check(const std::vector<DiagnosticsRecord>& records,
                              const EnvelopeConstants& c, double e0,
                              double tol_rel) {
  EnvelopeReport rep;
  rep.tolerance = tol_rel * (c.k2 + e0);
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (const DiagnosticsRecord& r : records) {
    const double bound = c.k1 * e0 * std::exp(-c.gamma * r.t) + c.k2;
    const double margin = bound - r.x_norm;
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.worst_t = r.t;
    }
    if (bound > 0.0) rep.max_ratio = std::max(rep.max_ratio, r.x_norm / bound);
  }
  rep.pass = rep.min_margin >= -rep.tolerance;
  return rep;
}

std::string AbsorbingReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  const char* st = status == AbsorbStatus::entered
                       ? "entered"
                       : (status == AbsorbStatus::inconclusive ? "inconclusive"
                                                               : "never_entered");
  os << "{\"status\": \"" << st << "\", \"entry_time\": " << entry_time
     << ", \"predicted_entry\": " << predicted_entry
     << ", \"stays_inside\": " << (stays_inside ? "true" : "false")
     << ", \"radius_sq\": " << radius_sq << "}";
  return os.str();
}

AbsorbingReport absorbing_entry(const std::vector<DiagnosticsRecord>& records,
                                const EnvelopeConstants& c, double e0,
                                double tol) {
  AbsorbingReport rep;
  rep.radius_sq = 2.0 * c.k2;
  if (!(c.k2 > 0.0)) {
    rep.status = AbsorbStatus::inconclusive;  // degenerate zero-radius ball
    return rep;
  }
  rep.predicted_entry =
      e0 > 2.0 * c.k2 ? std::log(c.k1 * e0 / c.k2) / c.gamma : 0.0;
  bool entered = false;
  bool stays = true;
  for (const DiagnosticsRecord& r : records) {
    if (!entered && r.x_norm <= rep.radius_sq) {
      entered = true;
      rep.entry_time = r.t;
    } else if (entered && r.x_norm > rep.radius_sq * (1.0 + tol)) {
      stays = false;
    }
  }
  if (entered) {
    rep.status = AbsorbStatus::entered;
    rep.stays_inside = stays;
  } else {
    const double horizon = records.empty() ? 0.0 : records.back().t;
    rep.status = horizon >= rep.predicted_entry ? AbsorbStatus::never_entered
                                                : AbsorbStatus::inconclusive;
  }
  return rep;
}

SeparationResult separation_decay(const Trajectory& a, const Trajectory& b,
                                  double dphi_lv2, const ProblemConfig& cfg,
                                  double k5, double tol) {
  if (a.n_modes != b.n_modes || a.times.size() != b.times.size() ||
      a.dt != b.dt)
    throw std::invalid_argument("separation_decay: trajectories not comparable");
  const int n = a.n_modes;
  const std::size_t count = a.times.size();
  SeparationResult res;
  res.times = a.times;
  res.separation.resize(count);

  double du0 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double d = a.modal(0)[static_cast<std::size_t>(j)] -
                     b.modal(0)[static_cast<std::size_t>(j)];
    du0 += d * d;
  }
  res.initial_separation = du0 + dphi_lv2;

  const double g = cfg.gamma;
  const double dt = a.dt;
  const double decay = std::exp(-g * dt);
  const double half = std::exp(-0.5 * g * dt);
  double I = 0.0;
  double v_prev = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    double v = 0.0;
    for (int j = 0; j < n; ++j) {
      const double d = a.modal(k)[static_cast<std::size_t>(j)] -
                       b.modal(k)[static_cast<std::size_t>(j)];
      v += cfg.basis.lambda(j + 1) * d * d;
    }
    if (k > 0) I = decay * I + dt * half * 0.5 * (v_prev + v);
    v_prev = v;
    res.separation[k] = std::exp(-g * a.times[k]) * dphi_lv2 + I;
  }

  res.max_bound_ratio = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double bound =
        k5 * std::exp(-g * a.times[k]) * res.initial_separation;
    if (bound > 0.0)
      res.max_bound_ratio = std::max(res.max_bound_ratio, res.separation[k] / bound);
  }
  res.bound_holds = res.max_bound_ratio <= 1.0 + tol;

  // Exponential rate fit (least squares on log) over the second half.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t k = count / 2; k < count; ++k) {
    if (res.separation[k] <= 0.0) continue;
    const double x = a.times[k];
    const double y = std::log(res.separation[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m >= 2 && (m * sxx - sx * sx) > 0.0)
    res.fitted_rate = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
  return res;
}

std::string AttractorProbe::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"n_trajectories\": " << n_trajectories
     << ", \"box_diameter\": " << box_diameter
     << ", \"max_pair_distance\": " << max_pair_distance
     << ", \"min_energy\": " << min_energy << ", \"max_energy\": " << max_energy
     << ", \"clusters\": [";
  for (std::size_t c = 0; c < cluster_centers.size(); ++c) {
    if (c) os << ", ";
    os << "{\"size\": " << cluster_sizes[c] << ", \"center\": [";
    for (std::size_t j = 0; j < cluster_centers[c].size(); ++j) {
      if (j) os << ", ";
      os << cluster_centers[c][j];
    }
    os << "]}";
  }
  os << "]}";
  return os.str();
}

AttractorProbe attractor_probe(const std::vector<SolveResult>& runs,
                               double t_transient, double link_eps) {
  if (runs.empty()) throw std::invalid_argument("attractor_probe: empty ensemble");
  AttractorProbe probe;
  probe.n_trajectories = static_cast<int>(runs.size());
  const int n = runs.front().trajectory.n_modes;

  probe.min_energy = std::numeric_limits<double>::infinity();
  probe.max_energy = 0.0;
  std::vector<double> lo(static_cast<std::size_t>(n),
                         std::numeric_limits<double>::infinity());
  std::vector<double> hi(static_cast<std::size_t>(n),
                         -std::numeric_limits<double>::infinity());
  std::vector<std::vector<double>> finals;
  for (const SolveResult& run : runs) {
    for (const DiagnosticsRecord& r : run.records) {
      if (r.t < t_transient) continue;
      probe.min_energy = std::min(probe.min_energy, r.energy);
      probe.max_energy = std::max(probe.max_energy, r.energy);
    }
    const auto last = run.trajectory.modal(run.trajectory.steps());
    finals.emplace_back(last.begin(), last.end());
    for (int j = 0; j < n; ++j) {
      lo[static_cast<std::size_t>(j)] =
          std::min(lo[static_cast<std::size_t>(j)], last[static_cast<std::size_t>(j)]);
      hi[static_cast<std::size_t>(j)] =
          std::max(hi[static_cast<std::size_t>(j)], last[static_cast<std::size_t>(j)]);
    }
  }
  double diag = 0.0;
  for (int j = 0; j < n; ++j) {
    const double d = hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)];
    diag += d * d;
  }
  probe.box_diameter = std::sqrt(diag);

  auto dist = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double d = x[static_cast<std::size_t>(j)] - y[static_cast<std::size_t>(j)];
      acc += d * d;
    }
    return std::sqrt(acc);
  };
  for (std::size_t i = 0; i < finals.size(); ++i)
    for (std::size_t j = i + 1; j < finals.size(); ++j)
      probe.max_pair_distance =
          std::max(probe.max_pair_distance, dist(finals[i], finals[j]));

  // Single-link clustering of terminal states.
  std::vector<int> parent(finals.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
    return i;
  };
  for (std::size_t i = 0; i < finals.size(); ++i)
    for (std::size_t j = i + 1; j < finals.size(); ++j)
      if (dist(finals[i], finals[j]) <= link_eps)
        parent[static_cast<std::size_t>(find(static_cast<int>(j)))] =
            find(static_cast<int>(i));
  std::vector<int> roots;
  for (std::size_t i = 0; i < finals.size(); ++i) {
    const int r = find(static_cast<int>(i));
    if (std::find(roots.begin(), roots.end(), r) == roots.end())
      roots.push_back(r);
  }
  for (int r : roots) {
    std::vector<double> center(static_cast<std::size_t>(n), 0.0);
    int count = 0;
    for (std::size_t i = 0; i < finals.size(); ++i)
      if (find(static_cast<int>(i)) == r) {
        for (int j = 0; j < n; ++j)
          center[static_cast<std::size_t>(j)] += finals[i][static_cast<std::size_t>(j)];
        ++count;
      }
    for (double& v : center) v /= count;
    probe.cluster_centers.push_back(std::move(center));
    probe.cluster_sizes.push_back(count);
  }
  return probe;
}

}  // namespace memheat
