#pragma once

#include <span>
#include <string>
#include <vector>

namespace memheat {

enum class KernelFamily { exponential, singular_exp };

/// Memory kernel mu(s) of the fading-memory term, together with its induced
/// flux kernel k(t) = int_t^inf mu(s) ds.
///
/// Families:
///   exponential   mu(s) = c e^{-delta s}
///   singular_exp  mu(s) = e^{-delta s} s^{-alpha},  alpha in (0,1)
///
/// Both satisfy mu >= 0 and mu' <= 0 with mu' + delta mu <= 0 (exponential
/// domination with rate delta). Objects are immutable after construction.
class MemoryKernel {
 public:
  static MemoryKernel exponential(double c, double delta);
  static MemoryKernel singular(double delta, double alpha);

  KernelFamily family() const { return family_; }
  double delta() const { return delta_; }
  double alpha() const { return alpha_; }
  double amplitude() const { return c_; }

  /// mu(s); s must be > 0 for the singular family.
  double mu(double s) const;
  /// mu'(s), closed form.
  double mu_prime(double s) const;
  /// k(t) = int_t^inf mu, t >= 0. Closed form (incomplete gamma for the
  /// singular family).
  double k_of(double t) const;
  /// k(0); total mass of the measure mu(s) ds.
  double k0() const;
  /// int_a^b s^m mu(s) ds for m in {0,1,2,3}, via incomplete-gamma
  /// differences. Valid for 0 <= a < b; the singular endpoint a=0 is fine.
  double moment(int m, double a, double b) const;

  /// Kernel spec string, `exp(c,delta)` or `singular(delta,alpha)`.
  std::string spec_string() const;

 private:
  MemoryKernel(KernelFamily f, double c, double delta, double alpha)
      : family_(f), c_(c), delta_(delta), alpha_(alpha) {}
  KernelFamily family_;
  double c_;
  double delta_;
  double alpha_;
};

/// Parse a kernel spec string (see MemoryKernel::spec_string).
MemoryKernel parse_kernel_spec(const std::string& spec);

/// Hypothesis report for (h1)-(h2): non-negativity, monotonicity, finite
/// mass, and exponential domination mu' + delta_test mu <= 0 on a sample
/// grid. h2_margin is min_s [-mu'(s) - delta_test mu(s)].
struct HypothesisReport {
  bool h1_nonneg = false;
  bool h1_monotone = false;
  bool h1_integrable = false;
  bool h2_pass = false;
  double h2_margin = 0.0;
  std::string to_json() const;
};

HypothesisReport validate_hypotheses(const MemoryKernel& kernel,
                                     std::span<const double> grid,
                                     double delta_test);

/// Discrete realization of the measure mu(s) ds on (0, s_max], plus the tail
/// mass k(s_max) folded into the last weight. Nodes are strictly increasing;
/// weights are non-negative and sum to k(0) up to roundoff.
struct WeightedQuadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
  double mass = 0.0;
  double s_max = 0.0;
  double tol = 0.0;  // accuracy estimate for smooth integrands

  std::size_t size() const { return nodes.size(); }
  /// sum_i w_i g(s_i) for samples g at the nodes.
  double apply(std::span<const double> g) const;
};

/// Product-integration rule for int_0^inf mu(s) g(s) ds: geometric cells
/// clustered at s=0 (first boundary ~1e-4 s_max), two mu-weighted Gauss
/// points per cell built from exact cell moments. The singularity is
/// absorbed by the moments; mu is never evaluated at s=0.
/// `n_nodes` must be even and >= 2; cells = n_nodes/2.
WeightedQuadrature build_quadrature(const MemoryKernel& kernel, int n_nodes,
                                    double s_max);

/// Default truncation horizon 40/delta (tail mass below 1e-12 of k(0)).
double default_s_max(const MemoryKernel& kernel);

/// gamma = safety * min(m lambda1, delta), safety in (0,1) strictly.
double gamma_select(double m, double lambda1, double delta, double safety);

/// K_mu = e^gamma int_0^1 mu(s) ds + mu(1) e^delta (gamma-delta)^{-2},
/// the continuity constant of the history lift. Requires 0 < gamma < delta.
double k_mu_bound(const MemoryKernel& kernel, double gamma);

}  // namespace memheat
