#include "memheat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace memheat {

double SpectralField::h_norm_sq() const {
  double acc = 0.0;
  for (double b : coeffs) acc += b * b;
  return acc;
}

SpatialBasis::SpatialBasis(double length, int n_modes, int n_collocation)
    : length_(length), n_(n_modes), nc_(n_collocation) {
  if (!(length > 0.0)) throw std::invalid_argument("basis: length must be positive");
  if (n_modes < 1) throw std::invalid_argument("basis: need n_modes >= 1");
  if (2 * n_collocation < 3 * n_modes)
    throw std::invalid_argument("basis: need n_collocation >= 3 n_modes / 2");
  h_ = length_ / (nc_ + 1);
  eigenvalues_.resize(static_cast<std::size_t>(n_));
  const double pi = std::numbers::pi;
  for (int j = 1; j <= n_; ++j)
    eigenvalues_[static_cast<std::size_t>(j - 1)] = (j * pi / length_) * (j * pi / length_);
  sine_.resize(static_cast<std::size_t>(nc_) * static_cast<std::size_t>(n_));
  for (int i = 0; i < nc_; ++i) {
    const double x = grid_x(i);
    for (int j = 1; j <= n_; ++j)
      sine_[static_cast<std::size_t>(i) * n_ + (j - 1)] = std::sin(j * pi * x / length_);
  }
}

void SpatialBasis::to_nodal(std::span<const double> modal,
                            std::span<double> nodal, Exec exec) const {
  if (modal.size() != static_cast<std::size_t>(n_) ||
      nodal.size() != static_cast<std::size_t>(nc_))
    throw std::invalid_argument("basis: transform size mismatch");
  const double amp = std::sqrt(2.0 / length_);
  if (exec == Exec::openmp) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nc_; ++i) {
      double acc = 0.0;
      const double* row = &sine_[static_cast<std::size_t>(i) * n_];
      for (int j = 0; j < n_; ++j) acc += modal[static_cast<std::size_t>(j)] * row[j];
      nodal[static_cast<std::size_t>(i)] = amp * acc;
    }
  } else {
    for (int i = 0; i < nc_; ++i) {
      double acc = 0.0;
      const double* row = &sine_[static_cast<std::size_t>(i) * n_];
      for (int j = 0; j < n_; ++j) acc += modal[static_cast<std::size_t>(j)] * row[j];
      nodal[static_cast<std::size_t>(i)] = amp * acc;
    }
  }
}

void SpatialBasis::to_modal(std::span<const double> nodal,
                            std::span<double> modal, Exec exec) const {
  if (modal.size() != static_cast<std::size_t>(n_) ||
      nodal.size() != static_cast<std::size_t>(nc_))
    throw std::invalid_argument("basis: transform size mismatch");
  const double amp = std::sqrt(2.0 / length_) * h_;
  if (exec == Exec::openmp) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n_; ++j) {
      double acc = 0.0;
      for (int i = 0; i < nc_; ++i)
        acc += nodal[static_cast<std::size_t>(i)] * sine_[static_cast<std::size_t>(i) * n_ + j];
      modal[static_cast<std::size_t>(j)] = amp * acc;
    }
  } else {
    for (int j = 0; j < n_; ++j) {
      double acc = 0.0;
      for (int i = 0; i < nc_; ++i)
        acc += nodal[static_cast<std::size_t>(i)] * sine_[static_cast<std::size_t>(i) * n_ + j];
      modal[static_cast<std::size_t>(j)] = amp * acc;
    }
  }
}

double SpatialBasis::quad(std::span<const double> nodal) const {
  double acc = 0.0;
  for (double v : nodal) acc += v;
  return acc * h_;
}

double SpatialBasis::v_norm_sq(const SpectralField& u) const {
  double acc = 0.0;
  for (int j = 0; j < n_; ++j)
    acc += eigenvalues_[static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(j)] *
           u[static_cast<std::size_t>(j)];
  return acc;
}

SpectralField project(const std::function<double(double)>& f,
                      const SpatialBasis& basis) {
  std::vector<double> nodal(static_cast<std::size_t>(basis.n_collocation()));
  for (int i = 0; i < basis.n_collocation(); ++i)
    nodal[static_cast<std::size_t>(i)] = f(basis.grid_x(i));
  SpectralField out;
  out.coeffs.resize(static_cast<std::size_t>(basis.n_modes()));
  basis.to_modal(nodal, out.coeffs);
  return out;
}

Nonlinearity::Nonlinearity(std::vector<double> coeffs_desc)
    : coeffs_desc_(std::move(coeffs_desc)) {
  if (coeffs_desc_.empty() || coeffs_desc_.size() % 2 != 0)
    throw std::invalid_argument("nonlinearity: need an odd degree (even coefficient count)");
  if (!(coeffs_desc_.front() > 0.0))
    throw std::invalid_argument("nonlinearity: leading coefficient must be positive");
  const int deg = static_cast<int>(coeffs_desc_.size()) - 1;
  p_ = (deg + 1) / 2;
  poly_.c.assign(coeffs_desc_.rbegin(), coeffs_desc_.rend());
  dpoly_ = poly_.derivative();
  f0_ = coeffs_desc_.front();

  const double bound =
      std::max({num::root_bound(poly_), num::root_bound(dpoly_), 2.0});

  // a0 = sup_u [ f0 u^{2p} / 2 - f(u) u ], clipped at zero.
  const auto gap = [this](double u) {
    const double u2p = std::pow(u, 2 * p_);
    return 0.5 * f0_ * u2p - poly_(u) * u;
  };
  a0_ = std::max(0.0, num::scan_maximum(gap, -bound, bound)) + 1e-9;
  if (a0_ <= 2e-9 && gap(0.0) <= 0.0) {
    // keep exact zero for the benign cases (e.g. pure odd powers)
    if (num::scan_maximum(gap, -bound, bound) <= 0.0) a0_ = 0.0;
  }

  // d0 = -2 inf f', clipped at zero.
  const auto neg_deriv = [this](double u) { return -dpoly_(u); };
  const double sup_neg = num::scan_maximum(neg_deriv, -bound, bound);
  d0_ = sup_neg > 0.0 ? 2.0 * sup_neg + 1e-9 : 0.0;

  // M: largest |root| of f' (f' > 0 beyond it since the leading term wins).
  big_m_ = 0.0;
  for (double r : num::real_roots(dpoly_, bound))
    big_m_ = std::max(big_m_, std::fabs(r));
  if (big_m_ > 0.0) big_m_ += 1e-9;
}

SpectralField nonlinear_galerkin(const SpectralField& u, const Nonlinearity& f,
                                 const SpatialBasis& basis, Exec exec) {
  if (static_cast<int>(u.size()) != basis.n_modes())
    throw std::invalid_argument("nonlinear_galerkin: field/basis mismatch");
  if (basis.n_collocation() < f.p() * basis.n_modes() + 1)
    throw std::invalid_argument(
        "nonlinear_galerkin: collocation grid too small for this degree "
        "(need n_collocation >= p*n_modes+1)");
  const int nc = basis.n_collocation();
  std::vector<double> nodal(static_cast<std::size_t>(nc));
  basis.to_nodal(u.coeffs, nodal, exec);
  if (exec == Exec::openmp) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nc; ++i)
      nodal[static_cast<std::size_t>(i)] = f(nodal[static_cast<std::size_t>(i)]);
  } else {
    for (int i = 0; i < nc; ++i)
      nodal[static_cast<std::size_t>(i)] = f(nodal[static_cast<std::size_t>(i)]);
  }
  SpectralField out;
  out.coeffs.resize(u.size());
  basis.to_modal(nodal, out.coeffs, exec);
  return out;
}

double lp2p_norm(const SpectralField& u, const Nonlinearity& f,
                 const SpatialBasis& basis) {
  if (basis.n_collocation() < f.p() * basis.n_modes() + 1)
    throw std::invalid_argument("lp2p_norm: collocation grid too small");
  std::vector<double> nodal(static_cast<std::size_t>(basis.n_collocation()));
  basis.to_nodal(u.coeffs, nodal);
  for (double& v : nodal) v = std::pow(v, 2 * f.p());
  return basis.quad(nodal);
}

double f_pairing(const SpectralField& u, const Nonlinearity& f,
                 const SpatialBasis& basis) {
  std::vector<double> nodal(static_cast<std::size_t>(basis.n_collocation()));
  basis.to_nodal(u.coeffs, nodal);
  for (double& v : nodal) v = f(v) * v;
  return basis.quad(nodal);
}

NonlocalCoefficient NonlocalCoefficient::constant(double value) {
  if (!(value > 0.0))
    throw std::invalid_argument("nonlocal: constant value must be positive");
  NonlocalCoefficient a;
  a.kind_ = NonlocalKind::constant;
  a.base_ = value;
  a.m_ = a.m_tilde_ = value;
  return a;
}

NonlocalCoefficient NonlocalCoefficient::clamped_affine(
    double base, double slope, double m, double m_tilde,
    std::vector<double> l_weight) {
  if (!(m > 0.0)) throw std::invalid_argument("nonlocal: m must be positive");
  if (!(m_tilde >= m)) throw std::invalid_argument("nonlocal: m_tilde >= m required");
  NonlocalCoefficient a;
  a.kind_ = NonlocalKind::clamped_affine;
  a.base_ = base;
  a.slope_ = slope;
  a.m_ = m;
  a.m_tilde_ = m_tilde;
  a.l_weight_ = std::move(l_weight);
  return a;
}

double NonlocalCoefficient::l_value(const SpectralField& u) const {
  double acc = 0.0;
  const std::size_t n = std::min(l_weight_.size(), u.size());
  for (std::size_t j = 0; j < n; ++j) acc += l_weight_[j] * u[j];
  return acc;
}

double NonlocalCoefficient::value_of_l(double l) const {
  if (kind_ == NonlocalKind::constant) return base_;
  return std::clamp(base_ + slope_ * l, m_, m_tilde_);
}

double NonlocalCoefficient::value(const SpectralField& u) const {
  if (kind_ == NonlocalKind::constant) return base_;
  return value_of_l(l_value(u));
}

}  // namespace memheat
