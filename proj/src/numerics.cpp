#include "memheat/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace memheat::num {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Series expansion of P(a,x), valid for x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x) (modified Lentz), valid for x >= a+1.
double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("gamma_p: a must be positive");
  if (x < 0.0) throw std::domain_error("gamma_p: x must be non-negative");
  if (x == 0.0) return 0.0;
  return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("gamma_q: a must be positive");
  if (x < 0.0) throw std::domain_error("gamma_q: x must be non-negative");
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double upper_gamma(double a, double x) { return gamma_q(a, x) * std::tgamma(a); }

// ---------------------------------------------------------------------------
// Gauss-Kronrod 15/7
// ---------------------------------------------------------------------------

namespace {

// Nodes/weights for GK15 on [-1,1]; even symmetry, node 0 included.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkEstimate {
  double value;
  double error;
};

GkEstimate gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double fsum = f(c - dx) + f(c + dx);
    res_k += kWgk[j] * fsum;
    if (j % 2 == 1) res_g += kWg[j / 2] * fsum;
  }
  res_g *= h;
  res_k *= h;
  return {res_k, std::pow(200.0 * std::fabs(res_k - res_g), 1.5)};
}

void gk_adaptive(const std::function<double(double)>& f, double a, double b,
                 double tol, int depth, int max_depth, QuadResult& out) {
  GkEstimate e = gk15(f, a, b);
  if (depth >= max_depth || e.error <= tol || !std::isfinite(e.error)) {
    out.value += e.value;
    out.abs_error += e.error;
    return;
  }
  const double c = 0.5 * (a + b);
  ++out.subdivisions;
  gk_adaptive(f, a, c, 0.5 * tol, depth + 1, max_depth, out);
  gk_adaptive(f, c, b, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, int max_depth) {
  if (!(b > a)) {
    if (b == a) return {};
    throw std::invalid_argument("integrate: requires b >= a");
  }
  GkEstimate first = gk15(f, a, b);
  double tol = std::max(abs_tol, std::fabs(first.value) * rel_tol);
  if (tol <= 0.0 || !std::isfinite(tol)) tol = abs_tol;
  QuadResult out;
  gk_adaptive(f, a, b, tol, 0, max_depth, out);
  return out;
}

QuadResult integrate_decaying(const std::function<double(double)>& f, double a,
                              double rate, double rel_tol) {
  if (rate <= 0.0)
    throw std::invalid_argument("integrate_decaying: rate must be positive");
  const double cut = a + 64.0 / rate;
  // Split near `a` so singular endpoint behaviour is isolated in short cells.
  QuadResult total;
  const double mid = std::min(a + 1.0 / rate, cut);
  QuadResult head = integrate(f, a, mid, rel_tol);
  QuadResult tail = integrate(f, mid, cut, rel_tol);
  total.value = head.value + tail.value;
  total.abs_error = head.abs_error + tail.abs_error;
  total.subdivisions = head.subdivisions + tail.subdivisions;
  return total;
}

// ---------------------------------------------------------------------------
// Fritsch-Carlson monotone cubic
// ---------------------------------------------------------------------------

namespace {

// Derivative at x[i] of the cubic through four consecutive points starting at
// index `lo` (Newton divided differences).
double stencil4_slope(std::span<const double> x, std::span<const double> y,
                      std::size_t lo, std::size_t i) {
  const double x0 = x[lo], x1 = x[lo + 1], x2 = x[lo + 2], x3 = x[lo + 3];
  const double f01 = (y[lo + 1] - y[lo]) / (x1 - x0);
  const double f12 = (y[lo + 2] - y[lo + 1]) / (x2 - x1);
  const double f23 = (y[lo + 3] - y[lo + 2]) / (x3 - x2);
  const double f012 = (f12 - f01) / (x2 - x0);
  const double f123 = (f23 - f12) / (x3 - x1);
  const double f0123 = (f123 - f012) / (x3 - x0);
  const double t = x[i];
  // d/dt [f01 (t-x0) + f012 (t-x0)(t-x1) + f0123 (t-x0)(t-x1)(t-x2)]
  return f01 + f012 * ((t - x0) + (t - x1)) +
         f0123 * ((t - x1) * (t - x2) + (t - x0) * (t - x2) +
                  (t - x0) * (t - x1));
}

}  // namespace

void fc_slopes(std::span<const double> x, std::span<const double> y,
               std::span<double> d) {
  const std::size_t n = x.size();
  if (n != y.size() || n != d.size() || n < 2)
    throw std::invalid_argument("fc_slopes: inconsistent sizes");
  std::vector<double> h(n - 1), s(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    if (!(h[i] > 0.0)) throw std::invalid_argument("fc_slopes: grid not increasing");
    s[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    d[0] = d[1] = s[0];
    return;
  }
  if (n == 3) {
    d[0] = ((2.0 * h[0] + h[1]) * s[0] - h[0] * s[1]) / (h[0] + h[1]);
    d[1] = (h[1] * s[0] + h[0] * s[1]) / (h[0] + h[1]);
    d[2] = ((2.0 * h[1] + h[0]) * s[1] - h[1] * s[0]) / (h[0] + h[1]);
  } else {
    // Third-order preliminary slopes from four-point stencils; the limiter
    // below restores monotonicity where the data demands it.
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t lo = (i < 2) ? 0 : i - 2;
      if (lo + 3 >= n) lo = n - 4;
      d[i] = stencil4_slope(x, y, lo, i);
    }
  }

  // Fritsch-Carlson limiter.
  auto clamp_end = [](double& de, double sec) {
    if (de * sec <= 0.0)
      de = 0.0;
    else if (std::fabs(de) > 3.0 * std::fabs(sec))
      de = 3.0 * sec;
  };
  clamp_end(d[0], s[0]);
  clamp_end(d[n - 1], s[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (s[i - 1] * s[i] <= 0.0) {
      d[i] = 0.0;
      continue;
    }
    const double lim = 3.0 * std::min(std::fabs(s[i - 1]), std::fabs(s[i]));
    if (std::fabs(d[i]) > lim) d[i] = std::copysign(lim, s[i]);
    if (d[i] * s[i] < 0.0) d[i] = 0.0;
  }
}

void central_slopes(std::span<const double> x, std::span<const double> y,
                    std::span<double> d) {
  const std::size_t n = x.size();
  if (n != y.size() || n != d.size() || n < 2)
    throw std::invalid_argument("central_slopes: inconsistent sizes");
  std::vector<double> h(n - 1), s(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    s[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    d[0] = d[1] = s[0];
    return;
  }
  d[0] = ((2.0 * h[0] + h[1]) * s[0] - h[0] * s[1]) / (h[0] + h[1]);
  d[n - 1] = ((2.0 * h[n - 2] + h[n - 3]) * s[n - 2] - h[n - 2] * s[n - 3]) /
             (h[n - 2] + h[n - 3]);
  for (std::size_t i = 1; i + 1 < n; ++i)
    d[i] = (h[i] * s[i - 1] + h[i - 1] * s[i]) / (h[i - 1] + h[i]);
}

double hermite_eval(double x0, double x1, double y0, double y1, double d0,
                    double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return y0 * (2.0 * t3 - 3.0 * t2 + 1.0) + y1 * (-2.0 * t3 + 3.0 * t2) +
         h * (d0 * (t3 - 2.0 * t2 + t) + d1 * (t3 - t2));
}

double hermite_deriv(double x0, double x1, double y0, double y1, double d0,
                     double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  return (y0 * (6.0 * t2 - 6.0 * t) + y1 * (-6.0 * t2 + 6.0 * t)) / h +
         d0 * (3.0 * t2 - 4.0 * t + 1.0) + d1 * (3.0 * t2 - 2.0 * t);
}

// ---------------------------------------------------------------------------
// Polynomial helpers
// ---------------------------------------------------------------------------

double root_bound(const Polynomial& p) {
  const int deg = p.degree();
  if (deg <= 0) return 1.0;
  const double lead = std::fabs(p.c[static_cast<std::size_t>(deg)]);
  double m = 0.0;
  for (int k = 0; k < deg; ++k)
    m = std::max(m, std::fabs(p.c[static_cast<std::size_t>(k)]) / lead);
  return 1.0 + m;
}

std::vector<double> real_roots(const Polynomial& p, double bound) {
  std::vector<double> roots;
  const int deg = p.degree();
  if (deg <= 0) return roots;
  const int grid = std::max(2048, 256 * deg);
  double prev_x = -bound;
  double prev_f = p(prev_x);
  for (int i = 1; i <= grid; ++i) {
    const double x = -bound + 2.0 * bound * static_cast<double>(i) / grid;
    const double fx = p(x);
    if (prev_f == 0.0) roots.push_back(prev_x);
    if (prev_f * fx < 0.0) {
      double lo = prev_x, hi = x, flo = prev_f;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = p(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (flo * fm < 0.0)
          hi = mid;
        else {
          lo = mid;
          flo = fm;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_x = x;
    prev_f = fx;
  }
  if (prev_f == 0.0) roots.push_back(prev_x);
  return roots;
}

double scan_maximum(const std::function<double(double)>& f, double lo,
                    double hi, int samples) {
  double best = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i <= samples; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / samples;
    const double v = f(x);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  const double h = (hi - lo) / samples;
  double a = lo + h * std::max(0, best_i - 1);
  double b = lo + h * std::min(samples, best_i + 1);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * (1.0 + std::fabs(a)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return std::max(best, std::max(f1, f2));
}

}  // namespace memheat::num
