#include "memheat/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "memheat/numerics.hpp"

namespace memheat {

namespace {

// 10-point Gauss-Legendre on [-1,1].
constexpr double kGlX[5] = {0.1488743389816312, 0.4333953941292472,
                            0.6794095682990244, 0.8650633666889845,
                            0.9739065285171717};
constexpr double kGlW[5] = {0.2955242247147529, 0.2692667193099963,
                            0.2190863625159820, 0.1494513491505806,
                            0.0666713443086881};

}  // namespace

MemoryKernel MemoryKernel::exponential(double c, double delta) {
  if (!(c > 0.0)) throw std::invalid_argument("kernel: c must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("kernel: delta must be positive");
  return MemoryKernel(KernelFamily::exponential, c, delta, 0.0);
}

MemoryKernel MemoryKernel::singular(double delta, double alpha) {
  if (!(delta > 0.0)) throw std::invalid_argument("kernel: delta must be positive");
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw std::invalid_argument("kernel: alpha must lie in [0,1)");
  return MemoryKernel(KernelFamily::singular_exp, 1.0, delta, alpha);
}

double MemoryKernel::mu(double s) const {
  if (family_ == KernelFamily::singular_exp && alpha_ > 0.0 && s <= 0.0)
    throw std::domain_error("kernel: mu(s) of the singular family needs s > 0");
  if (s < 0.0) throw std::domain_error("kernel: mu needs s >= 0");
  return c_ * std::exp(-delta_ * s) * (alpha_ > 0.0 ? std::pow(s, -alpha_) : 1.0);
}

double MemoryKernel::mu_prime(double s) const {
  if (family_ == KernelFamily::singular_exp && alpha_ > 0.0 && s <= 0.0)
    throw std::domain_error("kernel: mu'(s) of the singular family needs s > 0");
  if (s < 0.0) throw std::domain_error("kernel: mu' needs s >= 0");
  if (alpha_ > 0.0) return -mu(s) * (delta_ + alpha_ / s);
  return -delta_ * mu(s);
}

double MemoryKernel::k_of(double t) const {
  if (t < 0.0) throw std::domain_error("kernel: k(t) needs t >= 0");
  if (alpha_ == 0.0) return (c_ / delta_) * std::exp(-delta_ * t);
  // int_t^inf e^{-delta s} s^{-alpha} ds = delta^{alpha-1} Gamma(1-alpha, delta t)
  return c_ * std::pow(delta_, alpha_ - 1.0) * num::upper_gamma(1.0 - alpha_, delta_ * t);
}

double MemoryKernel::k0() const { return k_of(0.0); }

double MemoryKernel::moment(int m, double a, double b) const {
  if (m < 0 || m > 3) throw std::invalid_argument("kernel: moment order 0..3");
  if (!(a >= 0.0 && b > a)) throw std::invalid_argument("kernel: bad moment cell");
  // int_a^b s^{m-alpha} e^{-delta s} ds in terms of regularized gammas of
  // order g = m+1-alpha. Difference of P in the series regime, of Q in the
  // tail, so adjacent-cell cancellation never eats the result.
  const double g = static_cast<double>(m) + 1.0 - alpha_;
  const double xa = delta_ * a;
  const double xb = delta_ * b;
  double diff;
  if (xa >= g + 1.0)
    diff = num::gamma_q(g, xa) - num::gamma_q(g, xb);
  else
    diff = num::gamma_p(g, xb) - num::gamma_p(g, xa);
  return c_ * std::pow(delta_, alpha_ - m - 1.0) * std::tgamma(g) * diff;
}

std::string MemoryKernel::spec_string() const {
  std::ostringstream os;
  os.precision(17);
  if (family_ == KernelFamily::exponential)
    os << "exp(" << c_ << "," << delta_ << ")";
  else
    os << "singular(" << delta_ << "," << alpha_ << ")";
  return os.str();
}

MemoryKernel parse_kernel_spec(const std::string& spec) {
  std::string s;
  for (char ch : spec)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  auto lp = s.find('(');
  auto rp = s.rfind(')');
  if (lp == std::string::npos || rp == std::string::npos || rp < lp)
    throw std::invalid_argument("kernel spec: expected name(p1,p2)");
  const std::string name = s.substr(0, lp);
  const std::string args = s.substr(lp + 1, rp - lp - 1);
  auto comma = args.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("kernel spec: expected two parameters");
  double p1 = 0.0, p2 = 0.0;
  try {
    p1 = std::stod(args.substr(0, comma));
    p2 = std::stod(args.substr(comma + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("kernel spec: non-numeric parameter in '" + spec + "'");
  }
  if (name == "exp") return MemoryKernel::exponential(p1, p2);
  if (name == "singular") return MemoryKernel::singular(p1, p2);
  throw std::invalid_argument("kernel spec: unknown family '" + name + "'");
}

std::string HypothesisReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"h1_nonneg\": " << (h1_nonneg ? "true" : "false")
     << ", \"h1_monotone\": " << (h1_monotone ? "true" : "false")
     << ", \"h1_integrable\": " << (h1_integrable ? "true" : "false")
     << ", \"h2_pass\": " << (h2_pass ? "true" : "false")
     << ", \"h2_margin\": " << h2_margin << "}";
  return os.str();
}

HypothesisReport validate_hypotheses(const MemoryKernel& kernel,
                                     std::span<const double> grid,
                                     double delta_test) {
  if (grid.empty()) throw std::invalid_argument("validate_hypotheses: empty grid");
  if (!(delta_test > 0.0))
    throw std::invalid_argument("validate_hypotheses: delta_test must be positive");
  HypothesisReport rep;
  rep.h1_nonneg = true;
  rep.h1_monotone = true;
  double margin = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (double s : grid) {
    if (!(s > 0.0)) throw std::invalid_argument("validate_hypotheses: grid point <= 0");
    const double m = kernel.mu(s);
    const double mp = kernel.mu_prime(s);
    if (m < 0.0) rep.h1_nonneg = false;
    if (mp > 0.0) rep.h1_monotone = false;
    margin = std::min(margin, -mp - delta_test * m);
    scale = std::max(scale, delta_test * m);
  }
  rep.h1_integrable = std::isfinite(kernel.k0());
  rep.h2_margin = margin;
  rep.h2_pass = margin >= -1e-14 * scale;
  return rep;
}

double WeightedQuadrature::apply(std::span<const double> g) const {
  if (g.size() != nodes.size())
    throw std::invalid_argument("quadrature: sample count mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += weights[i] * g[i];
  return acc;
}

namespace {

// Shifted moments about the cell midpoint: mt[k] = int_a^b (s-mid)^k mu ds.
void cell_moments(const MemoryKernel& kernel, double a, double b,
                  double mt[4]) {
  const double mid = 0.5 * (a + b);
  if (a == 0.0) {
    // First cell carries the singularity: exact raw moments, then a binomial
    // shift (h ~ s here, no cancellation).
    double raw[4];
    for (int m = 0; m < 4; ++m) raw[m] = kernel.moment(m, a, b);
    mt[0] = raw[0];
    mt[1] = raw[1] - mid * raw[0];
    mt[2] = raw[2] - 2.0 * mid * raw[1] + mid * mid * raw[0];
    mt[3] = raw[3] - 3.0 * mid * raw[2] + 3.0 * mid * mid * raw[1] -
            mid * mid * mid * raw[0];
    return;
  }
  // Interior cell: mu is smooth, 10-point Gauss-Legendre is exact to
  // roundoff at the grading ratios used here.
  const double half = 0.5 * (b - a);
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (int q = 0; q < 5; ++q) {
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      const double t = sgn * half * kGlX[q];
      const double w = kGlW[q] * half;
      const double f = kernel.mu(mid + t);
      double tp = 1.0;
      for (int m = 0; m < 4; ++m) {
        acc[m] += w * f * tp;
        tp *= t;
      }
    }
  }
  for (int m = 0; m < 4; ++m) mt[m] = acc[m];
}

}  // namespace

WeightedQuadrature build_quadrature(const MemoryKernel& kernel, int n_nodes,
                                    double s_max) {
  if (n_nodes < 2) throw std::invalid_argument("build_quadrature: n_nodes >= 2");
  if (n_nodes % 2 != 0)
    throw std::invalid_argument("build_quadrature: n_nodes must be even (two nodes per cell)");
  if (!(s_max > 0.0)) throw std::invalid_argument("build_quadrature: s_max > 0");

  const int n_cells = n_nodes / 2;
  std::vector<double> bounds(static_cast<std::size_t>(n_cells) + 1);
  bounds[0] = 0.0;
  if (n_cells == 1) {
    bounds[1] = s_max;
  } else {
    const double s1 = 1e-4 * s_max;
    const double ratio = std::pow(s_max / s1, 1.0 / (n_cells - 1));
    double c = s1;
    for (int i = 1; i <= n_cells; ++i) {
      bounds[static_cast<std::size_t>(i)] = c;
      c *= ratio;
    }
    bounds[static_cast<std::size_t>(n_cells)] = s_max;
  }

  WeightedQuadrature rule;
  rule.s_max = s_max;
  rule.nodes.reserve(static_cast<std::size_t>(n_nodes));
  rule.weights.reserve(static_cast<std::size_t>(n_nodes));
  double err_est = 0.0;
  for (int i = 0; i < n_cells; ++i) {
    const double a = bounds[static_cast<std::size_t>(i)];
    const double b = bounds[static_cast<std::size_t>(i) + 1];
    const double mid = 0.5 * (a + b);
    double mt[4];
    cell_moments(kernel, a, b, mt);
    // Two-point Gauss rule for the cell measure: monic quadratic orthogonal
    // to {1, t}, roots are the nodes.
    const double det = mt[1] * mt[1] - mt[0] * mt[2];
    const double beta = (mt[0] * mt[3] - mt[1] * mt[2]) / det;
    const double gam = (mt[2] * mt[2] - mt[1] * mt[3]) / det;
    double disc = beta * beta - 4.0 * gam;
    if (disc < 0.0) disc = 0.0;
    const double q = -0.5 * (beta + std::copysign(std::sqrt(disc), beta));
    double t1 = (q != 0.0) ? q : -0.5 * beta;
    double t2 = (q != 0.0) ? gam / q : -0.5 * beta;
    if (t1 > t2) std::swap(t1, t2);
    double w2 = (mt[1] - t1 * mt[0]) / (t2 - t1);
    double w1 = mt[0] - w2;
    if (!(w1 >= 0.0) || !(w2 >= 0.0) || !(t2 > t1))
      throw std::runtime_error("build_quadrature: degenerate cell rule");
    rule.nodes.push_back(mid + t1);
    rule.weights.push_back(w1);
    rule.nodes.push_back(mid + t2);
    rule.weights.push_back(w2);
    const double half = 0.5 * (b - a);
    err_est += mt[0] * half * half * half * half / 135.0;
  }
  rule.weights.back() += kernel.k_of(s_max);
  double mass = 0.0;
  for (double w : rule.weights) mass += w;
  rule.mass = mass;
  rule.tol = std::max(1e-14, err_est / kernel.k0());
  for (std::size_t i = 1; i < rule.nodes.size(); ++i)
    if (!(rule.nodes[i] > rule.nodes[i - 1]))
      throw std::runtime_error("build_quadrature: nodes not increasing");
  return rule;
}

double default_s_max(const MemoryKernel& kernel) { return 40.0 / kernel.delta(); }

double gamma_select(double m, double lambda1, double delta, double safety) {
  if (!(m > 0.0 && lambda1 > 0.0 && delta > 0.0))
    throw std::invalid_argument("gamma_select: inputs must be positive");
  if (!(safety > 0.0 && safety < 1.0))
    throw std::invalid_argument("gamma_select: safety must lie strictly in (0,1)");
  return safety * std::min(m * lambda1, delta);
}

double k_mu_bound(const MemoryKernel& kernel, double gamma) {
  const double delta = kernel.delta();
  if (!(gamma > 0.0 && gamma < delta))
    throw std::invalid_argument("k_mu_bound: requires 0 < gamma < delta");
  const double int01 = kernel.k0() - kernel.k_of(1.0);
  const double d = gamma - delta;
  return std::exp(gamma) * int01 + kernel.mu(1.0) * std::exp(delta) / (d * d);
}

}  // namespace memheat
