#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

#include "wtlab/collision.hpp"

namespace wtlab {

/// Kinetic right-hand side dn_k/dt = eta_k - gamma_k n_k.
inline Eigen::ArrayXd kinetic_rhs(const CollisionRates& rates, const Spectrum& spectrum) {
  if (rates.eta.size() != spectrum.n.size() || rates.gamma.size() != spectrum.n.size())
    throw std::invalid_argument("rates and spectrum sizes differ");
  return rates.eta - rates.gamma * spectrum.n;
}

struct SpectrumTrajectory {
  Eigen::ArrayXd times;
  std::vector<Eigen::ArrayXd> n;
  long clipped_steps = 0;  // steps on which negative actions were clipped to 0
};

struct KineticEvolveOptions {
  double dt = 1e-3;
  double t_end = 1.0;
  int sample_stride = 1;
  GammaConvention convention = GammaConvention::kEquilibriumConsistent;
  double averaging_time = 0.0;  // 0 -> window rule
  double stability_limit = 0.1; // guard on dt * max gamma
};

/// Self-consistent RK4 evolution of the kinetic equation; the collision
/// rates are recomputed from the running spectrum at every stage.
SpectrumTrajectory evolve_spectrum(const WaveModel& model, const Spectrum& initial,
                                   const KineticEvolveOptions& opts);

/// One-point moments M^(0)..M^(pmax) per mode, row p holds M^(p).
struct MomentVector {
  Eigen::ArrayXXd m;  // (pmax+1) x modes

  static MomentVector gaussian(const Eigen::ArrayXd& n, int pmax);
  int pmax() const { return static_cast<int>(m.rows()) - 1; }
  Eigen::Index modes() const { return m.cols(); }
};

/// dM^(p)/dt = -p gamma M^(p) + p^2 eta M^(p-1); p = 0 is constant.
Eigen::ArrayXd moment_rhs(int p, const MomentVector& moments, const CollisionRates& rates);

/// Externally supplied (eta, gamma) time series: constant or piecewise
/// linear in t.  The per-mode hierarchy is linear given these rates.
class RateSchedule {
 public:
  static RateSchedule constant(CollisionRates rates);
  static RateSchedule piecewise_linear(std::vector<double> times, std::vector<CollisionRates> rates);

  void eval(double t, Eigen::ArrayXd& eta, Eigen::ArrayXd& gamma) const;
  Eigen::Index modes() const;

 private:
  std::vector<double> times_;
  std::vector<CollisionRates> rates_;
};

struct MomentTrajectory {
  Eigen::ArrayXd times;
  std::vector<MomentVector> moments;
};

/// RK4 over the triangular hierarchy, ascending in p; M^(0) stays 1.
MomentTrajectory evolve_moments(const MomentVector& initial, const RateSchedule& rates, double dt,
                                double t_end, int sample_stride = 1,
                                double stability_limit = 0.1);

/// Steady generating function Z = 1/(1 - lambda n); requires lambda n < 1.
double steady_generating_function(double lambda, double n);

/// Sup-norm residual of Zdot = lambda eta Z + (lambda^2 eta - lambda gamma) Z_lambda
/// on a lambda grid, Z_lambda by centered differences (interior points).
double generating_function_residual(const Eigen::ArrayXd& lambda, const Eigen::ArrayXd& z,
                                    const Eigen::ArrayXd& zdot, double eta, double gamma);

}  // namespace wtlab
