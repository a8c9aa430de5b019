#pragma once

#include <Eigen/Core>

#include <limits>
#include <stdexcept>
#include <vector>

namespace wtlab {

/// Cell-centered probability density of the wave intensity s = |a|^2.
struct AmplitudePdf {
  Eigen::ArrayXd edges;      // cells+1 ascending, edges[0] = 0
  Eigen::ArrayXd density;    // one value per cell
  double cutoff = std::numeric_limits<double>::infinity();  // s_nl
  Eigen::ArrayXd face_flux;  // diagnostic, one value per edge

  Eigen::Index cells() const { return density.size(); }
  Eigen::ArrayXd centers() const {
    return 0.5 * (edges.head(cells()) + edges.tail(cells()));
  }
  Eigen::ArrayXd widths() const { return edges.tail(cells()) - edges.head(cells()); }
  double mass() const { return (density * widths()).sum(); }
  double moment(int p) const { return (density * widths() * centers().pow(double(p))).sum(); }
  void normalize() { density /= mass(); }
  /// L1 distance against a density sampled at the cell centers.
  double l1_distance(const Eigen::ArrayXd& other_density) const {
    return ((density - other_density).abs() * widths()).sum();
  }
};

/// Geometrically graded cell edges on [0, s_max]; the first interior edge
/// sits at first_cell and spacing grows by a fixed ratio, resolving both
/// the core s ~ n and the tail decades.
Eigen::ArrayXd geometric_intensity_edges(int cells, double s_max, double first_cell);

/// Rayleigh intensity density (1/n) exp(-s/n).
double rayleigh_pdf(double s, double n);

/// Rayleigh sampled at cell centers on the given edges, normalized.
/// This sampling is the exact discrete fixed point of evolve_pdf when
/// gamma/eta = 1/n.
AmplitudePdf rayleigh_cell_centered(const Eigen::ArrayXd& edges, double n);

/// Largest stable evolve_pdf step for this grid (the 0.25 CFL guard).
double pdf_cfl_limit(const AmplitudePdf& pdf, double gamma, double eta);

/// Rayleigh density over an array of intensities.
template <typename Derived>
Eigen::ArrayXd rayleigh_pdf(const Eigen::ArrayBase<Derived>& s, double n) {
  if (!(n > 0.0)) throw std::invalid_argument("mean intensity must be positive");
  return (-s.derived().array() / n).exp() / n;
}

/// Parameters of a steady finite-flux solution of
/// -s (gamma P + eta dP/ds) = F; requires gamma/eta = 1/n.
struct FluxSolution {
  double n;
  double eta;
  double gamma;
  double flux;                 // F, <= 0 for tail-enhancing solutions
  double homogeneous = 0.0;    // C

  FluxSolution(double n_, double eta_, double gamma_, double flux_, double homogeneous_ = 0.0)
      : n(n_), eta(eta_), gamma(gamma_), flux(flux_), homogeneous(homogeneous_) {
    if (!(n > 0.0) || !(eta > 0.0)) throw std::invalid_argument("need n > 0 and eta > 0");
    if (std::abs(gamma * n / eta - 1.0) > 1e-9)
      throw std::invalid_argument("steady flux solution requires gamma/eta = 1/n");
  }
};

/// P(s) = C e^{-s/n} - (F/eta) Ei(s/n) e^{-s/n}; s > 0 when F != 0.
double steady_pdf_finite_flux(double s, const FluxSolution& sol);

/// Large-s expansion -(F/eta) sum_{j=1..order} (j-1)! n^j / s^j
/// (first term -F/(s gamma)).  Warns are left to callers; s >= 5n required.
double tail_series(double s, double n, double gamma, double flux, int order);

/// Pointwise probability flux F = -s (gamma P + eta dP/ds).
inline double flux_of(double p, double dpds, double s, double gamma, double eta) {
  return -s * (gamma * p + eta * dpds);
}

enum class PdfBoundary { kZeroFlux, kBreakingCutoff };

struct PdfEvolveOptions {
  double dt = 1e-4;
  double t_end = 1.0;
  int sample_stride = 100;
  PdfBoundary boundary = PdfBoundary::kZeroFlux;
  /// Breaking recycling rate for the cutoff boundary; < 0 selects the
  /// default eta / (4 s_nl).
  double breaking_rate = -1.0;
  double negative_tolerance = 1e-12;
};

struct PdfTrajectory {
  Eigen::ArrayXd times;
  std::vector<Eigen::ArrayXd> density;
  AmplitudePdf final;
  Eigen::ArrayXd mass;     // at sample times
  double sink_total = 0.0;
  double source_total = 0.0;
  double min_density = 0.0;
};

/// Conservative finite-volume evolution of dP/dt + dF/ds = 0.
///
/// Face values use exponential-fitted (steady-preserving) weights with a
/// central two-point difference for dP/ds, so the Rayleigh profile
/// sampled at cell centers is an exact discrete fixed point.  With the
/// breaking cutoff the ceiling is sealed, mass recycles into the top
/// cell at the breaking rate and a probability-proportional sink keeps
/// the normalization exact.
PdfTrajectory evolve_pdf(const AmplitudePdf& initial, double gamma, double eta,
                         const PdfEvolveOptions& opts);

struct CutoffSteadyDiagnostics {
  double sink_total = 0.0;
  double source_total = 0.0;
  double balance_error = 0.0;  // |sink - source| / sink
  bool tail_window_warning = false;  // s_nl < 5 n
};

/// Steady cutoff problem dF/ds = -lambda P with a breaking source at
/// s_nl, solved as a tridiagonal boundary-value problem and normalized.
/// sink_rate < 0 selects the default gamma n / (4 s_nl).
AmplitudePdf steady_pdf_with_cutoff(const Eigen::ArrayXd& edges, double n, double gamma, double eta,
                                    double s_nl, double sink_rate = -1.0,
                                    CutoffSteadyDiagnostics* diag = nullptr);

/// Sup-norm deviation from constancy of the flux divergence generated by
/// the two typographic readings of the printed cutoff solution.  Both
/// come out far from constant; reported in run manifests.
struct CutoffReadingResiduals {
  double ei_of_shifted_argument = 0.0;  // Ei(s/n - log s)
  double ei_minus_log = 0.0;            // Ei(s/n) - log s
};
CutoffReadingResiduals cutoff_closed_form_residuals(double n, double gamma, double eta, double s_nl);

}  // namespace wtlab
