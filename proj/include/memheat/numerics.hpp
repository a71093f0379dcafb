#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace memheat::num {

// ---------------------------------------------------------------------------
// Incomplete gamma functions
// ---------------------------------------------------------------------------

/// Regularized lower incomplete gamma P(a,x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a,x) = 1 - P(a,x).
double gamma_q(double a, double x);

/// Upper incomplete gamma integral Gamma(a,x) = int_x^inf t^{a-1} e^{-t} dt.
double upper_gamma(double a, double x);

// ---------------------------------------------------------------------------
// Adaptive quadrature (Gauss-Kronrod 15/7)
// ---------------------------------------------------------------------------

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
};

/// Adaptive integration of f over the finite interval [a,b].
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-12, double abs_tol = 1e-300,
                     int max_depth = 48);

/// Integration of a decaying integrand over [a, inf). `rate` is a lower bound
/// on the asymptotic exponential decay rate, used to truncate the domain.
QuadResult integrate_decaying(const std::function<double(double)>& f, double a,
                              double rate, double rel_tol = 1e-12);

// ---------------------------------------------------------------------------
// Monotone cubic interpolation (Fritsch-Carlson limited)
// ---------------------------------------------------------------------------

/// Hermite slopes for data (x_i, y_i) on a strictly increasing grid.
/// Preliminary slopes are weighted three-point estimates; the Fritsch-Carlson
/// limiter clamps them so the interpolant cannot overshoot on monotone data.
void fc_slopes(std::span<const double> x, std::span<const double> y,
               std::span<double> d);

/// Unlimited three-point slopes on a nonuniform grid (second order); the
/// method-of-lines transport path uses these where overshoot control is not
/// wanted in the derivative itself.
void central_slopes(std::span<const double> x, std::span<const double> y,
                    std::span<double> d);

/// Cubic Hermite evaluation on cell [x0,x1] with values y0,y1, slopes d0,d1.
double hermite_eval(double x0, double x1, double y0, double y1, double d0,
                    double d1, double x);

/// Derivative of the same Hermite cubic.
double hermite_deriv(double x0, double x1, double y0, double y1, double d0,
                     double d1, double x);

// ---------------------------------------------------------------------------
// Polynomials (coefficients in ascending powers)
// ---------------------------------------------------------------------------

struct Polynomial {
  std::vector<double> c;  // c[k] multiplies u^k

  double operator()(double u) const {
    double r = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) r = r * u + c[k];
    return r;
  }
  Polynomial derivative() const {
    Polynomial d;
    if (c.size() <= 1) {
      d.c = {0.0};
      return d;
    }
    d.c.resize(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k)
      d.c[k - 1] = static_cast<double>(k) * c[k];
    return d;
  }
  int degree() const {
    for (std::size_t k = c.size(); k-- > 0;)
      if (c[k] != 0.0) return static_cast<int>(k);
    return -1;
  }
};

/// Upper bound on the magnitude of all real roots (Cauchy bound).
double root_bound(const Polynomial& p);

/// All real roots in [-bound, bound], found by sign-change bisection on a
/// dense grid. Intended for the low-degree polynomials of this project.
std::vector<double> real_roots(const Polynomial& p, double bound);

/// Maximum of a scalar function over [lo,hi]: dense scan plus golden-section
/// refinement of the best bracket.
double scan_maximum(const std::function<double(double)>& f, double lo,
                    double hi, int samples = 4096);

}  // namespace memheat::num
