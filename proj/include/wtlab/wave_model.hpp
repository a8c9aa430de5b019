#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wtlab/grid.hpp"

namespace wtlab {

/// Isotropic dispersion law omega(|k|).
class DispersionLaw {
 public:
  enum class Kind { kPowerLaw, kDeepWaterGravity };

  /// omega = c * |k|^alpha.
  static DispersionLaw power_law(double c, double alpha) {
    if (!(c > 0.0)) throw std::invalid_argument("dispersion prefactor must be positive");
    if (!(alpha > 0.0)) throw std::invalid_argument("dispersion exponent must be positive");
    return DispersionLaw(Kind::kPowerLaw, c, alpha);
  }
  /// omega = sqrt(g * |k|).
  static DispersionLaw deep_water_gravity(double g) {
    if (!(g > 0.0)) throw std::invalid_argument("gravity must be positive");
    return DispersionLaw(Kind::kDeepWaterGravity, g, 0.5);
  }

  Kind kind() const { return kind_; }
  double gravity() const { return c_; }
  double prefactor() const { return c_; }
  double exponent() const { return alpha_; }

  double omega(double kappa) const {
    kappa = std::abs(kappa);
    if (kind_ == Kind::kDeepWaterGravity) return std::sqrt(c_ * kappa);
    return c_ * std::pow(kappa, alpha_);
  }
  double omega(const Eigen::Vector2d& k) const { return omega(k.norm()); }

  /// d omega / d|k|, used for resonant-manifold Jacobians.
  double omega_derivative(double kappa) const {
    kappa = std::abs(kappa);
    if (kappa == 0.0) return std::numeric_limits<double>::infinity();
    if (kind_ == Kind::kDeepWaterGravity) return 0.5 * std::sqrt(c_ / kappa);
    return c_ * alpha_ * std::pow(kappa, alpha_ - 1.0);
  }

  /// omega over an array of |k| values.
  template <typename Derived>
  Eigen::ArrayXd omega(const Eigen::ArrayBase<Derived>& kappa) const {
    Eigen::ArrayXd out(kappa.size());
    for (Eigen::Index i = 0; i < kappa.size(); ++i) out[i] = omega(double(kappa[i]));
    return out;
  }

 private:
  DispersionLaw(Kind kind, double c, double alpha) : kind_(kind), c_(c), alpha_(alpha) {}
  Kind kind_;
  double c_;
  double alpha_;
};

/// Four-wave coupling W(k, k1; k2, k3).
///
/// Both families are symmetric under k<->k1, k2<->k3 and under exchanging
/// the pairs, which the conservation diagnostics rely on.
class InteractionModel {
 public:
  enum class Kind { kConstant, kProductPower };

  static InteractionModel constant(double w0) { return InteractionModel(Kind::kConstant, w0, 0.0); }
  /// W = w0 * (|k||k1||k2||k3|)^(beta/4).
  static InteractionModel product_power(double w0, double beta) {
    return InteractionModel(Kind::kProductPower, w0, beta);
  }

  Kind kind() const { return kind_; }
  double w0() const { return w0_; }
  double beta() const { return beta_; }

  // Products are grouped per pair so the k<->k1, k2<->k3 and pair
  // exchange symmetries hold bitwise.
  double coupling(const Eigen::Vector2d& k, const Eigen::Vector2d& k1, const Eigen::Vector2d& k2,
                  const Eigen::Vector2d& k3) const {
    if (kind_ == Kind::kConstant) return w0_;
    return w0_ * std::pow((k.norm() * k1.norm()) * (k2.norm() * k3.norm()), 0.25 * beta_);
  }
  double coupling(double kappa, double kappa1, double kappa2, double kappa3) const {
    if (kind_ == Kind::kConstant) return w0_;
    return w0_ * std::pow((std::abs(kappa) * std::abs(kappa1)) *
                              (std::abs(kappa2) * std::abs(kappa3)),
                          0.25 * beta_);
  }

  /// Per-mode factor f with W = w0 * f(k) f(k1) f(k2) f(k3); lets the hot
  /// quadruple loops avoid pow() calls.
  double mode_factor(double kappa) const {
    if (kind_ == Kind::kConstant) return 1.0;
    return std::pow(std::abs(kappa), 0.25 * beta_);
  }

 private:
  InteractionModel(Kind kind, double w0, double beta) : kind_(kind), w0_(w0), beta_(beta) {}
  Kind kind_;
  double w0_;
  double beta_;
};

/// Wave-breaking intensity estimate s_nl(k) = omega(k) / (eps * W * k^2).
class CutoffModel {
 public:
  CutoffModel(double epsilon, double w_ref, DispersionLaw law)
      : epsilon_(epsilon), w_ref_(w_ref), law_(law) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("nonlinearity epsilon must be positive");
    if (w_ref == 0.0) throw std::invalid_argument("reference coupling must be nonzero");
  }

  double epsilon() const { return epsilon_; }
  double reference_coupling() const { return w_ref_; }

  double critical_intensity(double kappa) const {
    kappa = std::abs(kappa);
    if (kappa == 0.0) throw std::domain_error("breaking cutoff undefined at k = 0");
    return law_.omega(kappa) / (epsilon_ * w_ref_ * kappa * kappa);
  }

 private:
  double epsilon_;
  double w_ref_;
  DispersionLaw law_;
};

/// Gravity-wave cascade scalings: breakdown wavenumbers and the
/// dimensionless tail-area parameters.
class CascadeScaling {
 public:
  enum class Direction { kDirect, kInverse };

  CascadeScaling(double gravity, double energy_flux, double action_flux, Direction direction)
      : g_(gravity), p_(energy_flux), q_(action_flux), direction_(direction) {
    if (!(gravity > 0.0)) throw std::invalid_argument("gravity must be positive");
    if (energy_flux < 0.0 || action_flux < 0.0) throw std::invalid_argument("fluxes must be non-negative");
  }

  Direction direction() const { return direction_; }
  double gravity() const { return g_; }
  double energy_flux() const { return p_; }
  double action_flux() const { return q_; }

  /// Scale where the PDF tail disappears; +inf signals zero flux.
  double breakdown_wavenumber() const {
    if (direction_ == Direction::kDirect) {
      if (p_ == 0.0) return std::numeric_limits<double>::infinity();
      return g_ * g_ * g_ / (p_ * p_);
    }
    if (q_ == 0.0) return std::numeric_limits<double>::infinity();
    return g_ / q_;
  }

  /// Dimensionless tail-area parameter; equals 1 at the breakdown scale.
  double tail_area_parameter(double k) const {
    if (direction_ == Direction::kDirect) return std::pow(p_, 2.0 / 3.0) * std::cbrt(k) / g_;
    return q_ * k / g_;
  }

 private:
  double g_;
  double p_;
  double q_;
  Direction direction_;
};

/// Bundle of everything the dynamical and kinetic machinery needs.
struct WaveModel {
  SpectralGrid grid;
  DispersionLaw dispersion;
  InteractionModel interaction;
  double epsilon = 0.1;

  /// omega of every mode, grid order.
  Eigen::ArrayXd mode_frequencies() const { return dispersion.omega(grid.wavenumbers()); }

  /// Plain average of omega over all modes (the k = 0 mode contributes 0).
  double mean_frequency() const { return mode_frequencies().mean(); }
};

}  // namespace wtlab
