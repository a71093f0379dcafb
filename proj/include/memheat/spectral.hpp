#pragma once

#include <functional>
#include <span>
#include <vector>

#include "memheat/exec.hpp"
#include "memheat/numerics.hpp"

namespace memheat {

/// Modal coefficients of u in the Dirichlet eigenbasis of -Laplace on (0,L).
struct SpectralField {
  std::vector<double> coeffs;

  std::size_t size() const { return coeffs.size(); }
  double& operator[](std::size_t j) { return coeffs[j]; }
  double operator[](std::size_t j) const { return coeffs[j]; }
  /// |u|^2 (L^2 norm squared, orthonormal basis).
  double h_norm_sq() const;
};

/// Dirichlet eigenbasis w_j(x) = sqrt(2/L) sin(j pi x / L) on (0,L) with
/// eigenvalues lambda_j = (j pi / L)^2, plus an interior collocation grid
/// carrying the discrete sine transform used for nonlinear terms.
///
/// The transform pair is exact (to roundoff) for band-limited data, and the
/// grid quadrature integrates products up to total sine degree
/// 2 (n_collocation + 1) - 1 exactly.
class SpatialBasis {
 public:
  SpatialBasis(double length, int n_modes, int n_collocation);

  double length() const { return length_; }
  int n_modes() const { return n_; }
  int n_collocation() const { return nc_; }
  double lambda(int j) const { return eigenvalues_[static_cast<std::size_t>(j - 1)]; }
  double lambda1() const { return eigenvalues_.front(); }
  std::span<const double> eigenvalues() const { return eigenvalues_; }
  double grid_x(int i) const { return h_ * (i + 1); }
  double grid_h() const { return h_; }

  /// Modal -> point values on the collocation grid.
  void to_nodal(std::span<const double> modal, std::span<double> nodal,
                Exec exec = Exec::serial) const;
  /// L^2 projection of grid samples onto the retained modes.
  void to_modal(std::span<const double> nodal, std::span<double> modal,
                Exec exec = Exec::serial) const;
  /// Grid quadrature of sampled data over (0,L) (trapezoid; endpoints vanish).
  double quad(std::span<const double> nodal) const;

  /// V-norm squared ||u||^2 = sum lambda_j b_j^2.
  double v_norm_sq(const SpectralField& u) const;

 private:
  double length_;
  int n_;
  int nc_;
  double h_;
  std::vector<double> eigenvalues_;
  std::vector<double> sine_;  // sine_[i*n_ + j] = sin((j+1) pi x_i / L)
};

/// L^2 projection of a closure, sampled on the collocation grid.
SpectralField project(const std::function<double(double)>& f,
                      const SpatialBasis& basis);

/// Odd-degree polynomial nonlinearity f with positive leading coefficient,
/// plus the structural constants used by the energy estimates:
///   f0  leading coefficient,
///   a0  smallest constant with f(u) u >= f0 u^{2p}/2 - a0,
///   d0  smallest constant with f'(u) >= -d0/2,
///   M   smallest radius with f' > 0 outside [-M, M].
/// Constants are found numerically and rounded outward by 1e-9 so the
/// inequality checks they feed stay sound.
class Nonlinearity {
 public:
  /// `coeffs_desc` in descending powers: [f_0, f_1, ..., f_{2p-1}] with the
  /// paper's indexing (f_0 multiplies u^{2p-1}, f_{2p-1} is the constant).
  explicit Nonlinearity(std::vector<double> coeffs_desc);

  double operator()(double u) const { return poly_(u); }
  double derivative(double u) const { return dpoly_(u); }
  int p() const { return p_; }
  int degree() const { return 2 * p_ - 1; }
  double f0() const { return f0_; }
  double a0() const { return a0_; }
  double d0() const { return d0_; }
  double monotonicity_radius() const { return big_m_; }
  std::span<const double> coeffs_desc() const { return coeffs_desc_; }

 private:
  std::vector<double> coeffs_desc_;
  num::Polynomial poly_;   // ascending powers
  num::Polynomial dpoly_;
  int p_ = 0;
  double f0_ = 0.0, a0_ = 0.0, d0_ = 0.0, big_m_ = 0.0;
};

/// Galerkin image of f(u): inverse transform, pointwise f, forward transform.
/// Requires n_collocation >= p * n_modes + 1 so no aliased harmonic can fold
/// back into the retained modes. Odd-power terms of f are alias-exact on the
/// padded grid; even-power terms (constant included) carry the collocation
/// quadrature error O(n_collocation^-2).
SpectralField nonlinear_galerkin(const SpectralField& u, const Nonlinearity& f,
                                 const SpatialBasis& basis,
                                 Exec exec = default_exec());

/// |u|_{2p}^{2p} = int u^{2p} dx by grid quadrature (exact under the same
/// padding condition).
double lp2p_norm(const SpectralField& u, const Nonlinearity& f,
                 const SpatialBasis& basis);

/// (f(u), u) by grid quadrature.
double f_pairing(const SpectralField& u, const Nonlinearity& f,
                 const SpatialBasis& basis);

enum class NonlocalKind { constant, clamped_affine };

/// Kirchhoff-type diffusion coefficient a(l(u)) with declared bounds
/// 0 < m <= a <= m_tilde and l(u) = sum_j b_j g_j for a modal weight g.
class NonlocalCoefficient {
 public:
  static NonlocalCoefficient constant(double value);
  static NonlocalCoefficient clamped_affine(double base, double slope, double m,
                                            double m_tilde,
                                            std::vector<double> l_weight);

  NonlocalKind kind() const { return kind_; }
  double m() const { return m_; }
  double m_tilde() const { return m_tilde_; }
  double lipschitz() const { return kind_ == NonlocalKind::constant ? 0.0 : std::abs(slope_); }
  double base() const { return base_; }
  double slope() const { return slope_; }
  std::span<const double> l_weight() const { return l_weight_; }

  double l_value(const SpectralField& u) const;
  double value(const SpectralField& u) const;
  double value_of_l(double l) const;

 private:
  NonlocalKind kind_ = NonlocalKind::constant;
  double base_ = 1.0, slope_ = 0.0, m_ = 1.0, m_tilde_ = 1.0;
  std::vector<double> l_weight_;
};

}  // namespace memheat
