#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "wtlab/wave_model.hpp"

namespace wtlab {

/// Per-mode wave action n_k >= 0 on a grid.
struct Spectrum {
  Eigen::ArrayXd n;

  static Spectrum constant(Eigen::Index modes, double value) {
    if (value < 0.0) throw std::invalid_argument("wave action must be non-negative");
    return {Eigen::ArrayXd::Constant(modes, value)};
  }
  static Spectrum from_profile(const SpectralGrid& grid, const std::function<double(double)>& n_of_k) {
    Spectrum s{Eigen::ArrayXd(grid.mode_count())};
    for (Eigen::Index m = 0; m < grid.mode_count(); ++m) s.n[m] = n_of_k(grid.wavenumber(m));
    if ((s.n < 0.0).any()) throw std::invalid_argument("wave action must be non-negative");
    return s;
  }
};

/// Finite-averaging-time frequency kernel K_T(x) = |Delta(x)|^2 / (2 pi T)
/// with Delta(x) = (e^{ixT} - 1)/(ix).  Unit mass as T -> infinity.
class BroadenedKernel {
 public:
  explicit BroadenedKernel(double averaging_time) : t_(averaging_time) {
    if (!(averaging_time > 0.0)) throw std::invalid_argument("averaging time must be positive");
  }

  double averaging_time() const { return t_; }

  double operator()(double mismatch) const {
    const double x = 0.5 * mismatch * t_;
    // sin^2(x)/x^2 via a series switch to stay smooth through x = 0.
    double sinc2;
    if (std::abs(x) < 1e-4) {
      const double x2 = x * x;
      sinc2 = 1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 45.0;
    } else {
      const double s = std::sin(x) / x;
      sinc2 = s * s;
    }
    return t_ / (2.0 * std::numbers::pi) * sinc2;
  }

 private:
  double t_;
};

/// Intermediate-time window 2 pi / omega_max << T << 1/(omega_min eps^2).
struct AveragingWindow {
  double lower = 0.0;
  double upper = 0.0;
  double chosen = 0.0;  // geometric mean of the bounds
};

/// Window rule evaluated on a model's nonzero frequencies.
AveragingWindow default_averaging_window(const WaveModel& model);

enum class GammaConvention {
  kEquilibriumConsistent,  // 4 pi, delta(omega^{k1}_{23}), n1 n2 + n1 n3 - n2 n3
  kPaperLiteral,           // 8 pi, delta(omega^{k3}_{12}), n1 (n2 + n3) - n2 n3
};

std::string to_string(GammaConvention convention);

enum class RateProvenance { kDiscreteSum, kContinuumQuadrature };

/// Collision coefficients per mode; eta feeds action in, gamma damps.
struct CollisionRates {
  Eigen::ArrayXd eta;    // amplitude^2 / time
  Eigen::ArrayXd gamma;  // 1 / time
  GammaConvention convention = GammaConvention::kEquilibriumConsistent;
  RateProvenance provenance = RateProvenance::kDiscreteSum;
  double averaging_time = 0.0;  // discrete route only
};

/// Broadened-delta sums over all grid quadruples k + k1 = k2 + k3.
/// Summation order is fixed (lexicographic in (k1, k2)) so results are
/// bitwise reproducible; evaluation is independent per output mode.
CollisionRates collision_rates_discrete(const WaveModel& model, const Spectrum& spectrum,
                                        const BroadenedKernel& kernel,
                                        GammaConvention convention = GammaConvention::kEquilibriumConsistent);

/// Continuum quadrature over the 1D resonant manifold.
///
/// The manifold has saddle points (trivial-pairing line crossings) where
/// the exact-delta line integral diverges logarithmically; the physical
/// regularization is the finite averaging time, and roots contribute
/// f / sqrt(J^2 + 1.768 c2 / T) with c2 the local mismatch curvature,
/// which reproduces both the resolved-root 1/|J| limit and the exact
/// broadened tangent-lobe integral.
struct QuadratureSpec {
  int outer_nodes = 2048;        // k1 panels
  int scan_nodes = 1024;         // root bracketing resolution in k2
  double root_tolerance = 1e-12; // relative to the k-window
  double jacobian_floor = 1e-8;  // relative to the frequency scale
  double k_max = 0.0;            // 0 -> use the grid range
  double averaging_time = 0.0;   // saddle regularization; 0 -> window rule
};

struct QuadratureDiagnostics {
  long near_singular_roots = 0;
  long root_count = 0;
};

/// eta_k by resolving delta(omega-mismatch) with root finding along k2.
/// Isotropic spectra and 1D grids only; k2 and k3 are windowed to the
/// grid's k-range so the discrete and continuum routes see the same
/// partner modes.
double eta_continuum(const WaveModel& model, double k, const std::function<double(double)>& n_of_k,
                     const QuadratureSpec& quad, QuadratureDiagnostics* diag = nullptr);

double gamma_continuum(const WaveModel& model, double k, const std::function<double(double)>& n_of_k,
                       const QuadratureSpec& quad,
                       GammaConvention convention = GammaConvention::kEquilibriumConsistent,
                       QuadratureDiagnostics* diag = nullptr);

}  // namespace wtlab
