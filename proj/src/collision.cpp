#include "wtlab/collision.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace wtlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

AveragingWindow default_averaging_window(const WaveModel& model) {
  const Eigen::ArrayXd omega = model.mode_frequencies();
  double omega_min = std::numeric_limits<double>::infinity();
  double omega_max = 0.0;
  for (Eigen::Index m = 0; m < omega.size(); ++m) {
    if (omega[m] > 0.0) omega_min = std::min(omega_min, omega[m]);
    omega_max = std::max(omega_max, omega[m]);
  }
  if (!(omega_max > 0.0) || !std::isfinite(omega_min))
    throw std::invalid_argument("averaging window needs at least one mode with omega > 0");
  AveragingWindow w;
  w.lower = 2.0 * kPi / omega_max;
  w.upper = 1.0 / (omega_min * model.epsilon * model.epsilon);
  w.chosen = std::sqrt(w.lower * w.upper);
  return w;
}

std::string to_string(GammaConvention convention) {
  return convention == GammaConvention::kEquilibriumConsistent ? "equilibrium_consistent"
                                                               : "paper_literal";
}

CollisionRates collision_rates_discrete(const WaveModel& model, const Spectrum& spectrum,
                                        const BroadenedKernel& kernel, GammaConvention convention) {
  const SpectralGrid& grid = model.grid;
  const Eigen::Index count = grid.mode_count();
  if (spectrum.n.size() != count) throw std::invalid_argument("spectrum size does not match grid");

  const Eigen::ArrayXd omega = model.mode_frequencies();
  Eigen::ArrayXd wfac(count);
  for (Eigen::Index m = 0; m < count; ++m) wfac[m] = model.interaction.mode_factor(grid.wavenumber(m));
  const double w0 = model.interaction.w0();

  const bool paper = convention == GammaConvention::kPaperLiteral;
  const double eta_pref = 4.0 * kPi * model.epsilon * model.epsilon;
  const double gamma_pref = (paper ? 8.0 : 4.0) * kPi * model.epsilon * model.epsilon;

  CollisionRates rates;
  rates.eta = Eigen::ArrayXd::Zero(count);
  rates.gamma = Eigen::ArrayXd::Zero(count);
  rates.convention = convention;
  rates.provenance = RateProvenance::kDiscreteSum;
  rates.averaging_time = kernel.averaging_time();

  const Eigen::ArrayXd& n = spectrum.n;
  for (Eigen::Index m = 0; m < count; ++m) {
    double eta_sum = 0.0;
    double gamma_sum = 0.0;
    const Eigen::Vector2i idx_k = grid.index(m);
    for (Eigen::Index m1 = 0; m1 < count; ++m1) {
      const Eigen::Vector2i base = idx_k + grid.index(m1);
      const double w1 = wfac[m] * wfac[m1];
      for (Eigen::Index m2 = 0; m2 < count; ++m2) {
        const Eigen::Index m3 = grid.mode_at(base - grid.index(m2));
        if (m3 < 0) continue;
        const double w = w0 * w1 * wfac[m2] * wfac[m3];
        const double w2 = w * w;
        const double mismatch = omega[m] + omega[m1] - omega[m2] - omega[m3];
        const double k_eta = kernel(mismatch);
        eta_sum += w2 * k_eta * n[m1] * n[m2] * n[m3];
        if (paper) {
          const double k_gamma = kernel(omega[m] + omega[m3] - omega[m1] - omega[m2]);
          gamma_sum += w2 * k_gamma * (n[m1] * (n[m2] + n[m3]) - n[m2] * n[m3]);
        } else {
          gamma_sum += w2 * k_eta * (n[m1] * n[m2] + n[m1] * n[m3] - n[m2] * n[m3]);
        }
      }
    }
    rates.eta[m] = eta_pref * eta_sum;
    rates.gamma[m] = gamma_pref * gamma_sum;
  }
  return rates;
}

namespace {

struct ManifoldIntegrand {
  const WaveModel* model;
  const std::function<double(double)>* n_of_k;
  double k;
  bool paper_gamma;
  int which;  // 0: eta integrand, 1: gamma integrand
  double regularization_time;
};

// Matches the exact broadened integral across a tangent lobe:
// int K_T((c2/2) tau^2) dtau = sqrt(2/c2) int_0^inf K_T(u)/sqrt(u) du
// with int_0^inf (1 - cos v) v^{-5/2} dv = (2 sqrt(2 pi))/3.
constexpr double kSaddleConstant = 1.768;  // 1 / (0.752...)^2

// Sum over roots of the frequency mismatch along k2 for fixed k1.
double inner_line_integral(const ManifoldIntegrand& f, double k1, double a, double b,
                           const QuadratureSpec& quad, QuadratureDiagnostics* diag) {
  const DispersionLaw& law = f.model->dispersion;
  const double k = f.k;
  const double om_k = law.omega(k);
  const double om_1 = law.omega(k1);

  // The paper-literal gamma resolves delta(omega^{k3}_{12}) instead of
  // delta(omega^{k1}_{23}); the root equation follows the active form.
  const bool alt_delta = f.which == 1 && f.paper_gamma;
  const auto mismatch = [&](double k2) {
    const double k3 = k + k1 - k2;
    if (alt_delta) return om_k + law.omega(k3) - om_1 - law.omega(k2);
    return om_k + om_1 - law.omega(k2) - law.omega(k3);
  };
  const auto jacobian = [&](double k2) {
    const double k3 = k + k1 - k2;
    const double j2 = law.omega_derivative(k2) * (k2 >= 0.0 ? 1.0 : -1.0);
    const double j3 = law.omega_derivative(k3) * (k3 >= 0.0 ? 1.0 : -1.0);
    return alt_delta ? (-j3 - j2) : (-j2 + j3);
  };
  const auto weight = [&](double k2) {
    const double k3 = k + k1 - k2;
    const double w = f.model->interaction.coupling(k, k1, k2, k3);
    const double n1 = (*f.n_of_k)(std::abs(k1));
    const double n2 = (*f.n_of_k)(std::abs(k2));
    const double n3 = (*f.n_of_k)(std::abs(k3));
    if (f.which == 0) return w * w * n1 * n2 * n3;
    if (f.paper_gamma) return w * w * (n1 * (n2 + n3) - n2 * n3);
    return w * w * (n1 * n2 + n1 * n3 - n2 * n3);
  };

  const double omega_scale = std::max(om_k + om_1, law.omega(std::max(std::abs(a), std::abs(b))));
  const double floor_abs = quad.jacobian_floor * std::max(omega_scale, 1e-300);
  const double h = (b - a) / quad.scan_nodes;

  double total = 0.0;
  double prev_x = a;
  double prev_f = mismatch(a);
  for (int i = 1; i <= quad.scan_nodes; ++i) {
    const double x = a + h * i;
    const double fx = mismatch(x);
    if ((prev_f <= 0.0 && fx > 0.0) || (prev_f >= 0.0 && fx < 0.0)) {
      // Bisect to the root.
      double lo = prev_x, hi = x, flo = prev_f;
      for (int it = 0; it < 80 && (hi - lo) > quad.root_tolerance * (b - a); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = mismatch(mid);
        if ((flo <= 0.0 && fm > 0.0) || (flo >= 0.0 && fm < 0.0)) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      const double root = 0.5 * (lo + hi);
      const double jac = std::abs(jacobian(root));
      if (diag) ++diag->root_count;
      const double c2 =
          std::abs(mismatch(root + h) + mismatch(root - h) - 2.0 * mismatch(root)) / (h * h);
      const double reg2 = kSaddleConstant * c2 / f.regularization_time;
      if (diag && jac * jac < reg2) ++diag->near_singular_roots;
      total += weight(root) / std::max(std::sqrt(jac * jac + reg2), floor_abs);
    }
    prev_x = x;
    prev_f = fx;
  }
  return total;
}

double continuum_rate(const WaveModel& model, double k, const std::function<double(double)>& n_of_k,
                      const QuadratureSpec& quad, int which, bool paper_gamma,
                      QuadratureDiagnostics* diag) {
  if (model.grid.dimension() != 1)
    throw std::invalid_argument("continuum quadrature supports 1D grids only");
  const double k_max = quad.k_max > 0.0
                           ? quad.k_max
                           : model.grid.spacing() * (model.grid.modes_per_dimension() / 2);
  const double t_reg = quad.averaging_time > 0.0 ? quad.averaging_time
                                                 : default_averaging_window(model).chosen;
  const ManifoldIntegrand f{&model, &n_of_k, k, paper_gamma, which, t_reg};

  // Mode density per unit k in the periodic box; two eliminated integrals.
  const double density = model.grid.length() / (2.0 * kPi);
  const double pref = (which == 0 || !paper_gamma ? 4.0 : 8.0) * kPi * model.epsilon * model.epsilon *
                      density * density;

  const double span = 2.0 * k_max / quad.outer_nodes;
  double sum = 0.0;
  for (int i = 0; i < quad.outer_nodes; ++i) {
    const double k1 = -k_max + span * (i + 0.5);
    // Window k2 so that both k2 and k3 = k + k1 - k2 stay inside the grid range.
    const double a = std::max(-k_max, k + k1 - k_max);
    const double b = std::min(k_max, k + k1 + k_max);
    if (b <= a) continue;
    sum += span * inner_line_integral(f, k1, a, b, quad, diag);
  }
  return pref * sum;
}

}  // namespace

double eta_continuum(const WaveModel& model, double k, const std::function<double(double)>& n_of_k,
                     const QuadratureSpec& quad, QuadratureDiagnostics* diag) {
  return continuum_rate(model, k, n_of_k, quad, 0, false, diag);
}

double gamma_continuum(const WaveModel& model, double k, const std::function<double(double)>& n_of_k,
                       const QuadratureSpec& quad, GammaConvention convention,
                       QuadratureDiagnostics* diag) {
  return continuum_rate(model, k, n_of_k, quad, 1,
                        convention == GammaConvention::kPaperLiteral, diag);
}

}  // namespace wtlab
