#pragma once

// Test-only oracles, kept independent of the implementation paths they
// check: adaptive quadrature, naive triple/quadruple-loop sums.

#include <cmath>
#include <complex>
#include <functional>

#include <Eigen/Core>

#include "wtlab/collision.hpp"
#include "wtlab/wave_model.hpp"

namespace wtlab::test {

// Adaptive Simpson with absolute tolerance.
inline double adaptive_simpson_(const std::function<double(double)>& f, double a, double b,
                                double fa, double fm, double fb, double whole, double tol,
                                int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 40) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Panel-composite variant for oscillatory integrands, where plain
// adaptive refinement can terminate on accidental agreement.
inline double composite_simpson(const std::function<double(double)>& f, double a, double b,
                                int panels, double tol = 1e-12) {
  double total = 0.0;
  const double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i)
    total += adaptive_simpson(f, a + i * h, a + (i + 1) * h, tol / panels);
  return total;
}

// Principal-value quadrature for Ei(x), x > 0:
//   Ei(x) = int_{-inf}^{-1} e^t/t dt + PV int_{-1}^{1} e^t/t dt
//           + int_{1}^{x} e^t/t dt   (last term for x > 1)
// The symmetric window turns the PV part into the analytic 2 sinh(t)/t.
inline double ei_quadrature_oracle(double x) {
  const double far = adaptive_simpson([](double u) { return -std::exp(-u) / u; }, 1.0, 60.0, 1e-16);
  const double pv = adaptive_simpson(
      [](double t) { return t == 0.0 ? 2.0 : 2.0 * std::sinh(t) / t; }, 0.0, 1.0, 1e-16);
  double rest = 0.0;
  if (x > 1.0) {
    rest = adaptive_simpson([](double t) { return std::exp(t) / t; }, 1.0, x,
                            1e-15 * std::exp(x) / x);
  } else if (x < 1.0) {
    rest = -adaptive_simpson([](double t) { return std::exp(t) / t; }, x, 1.0, 1e-16);
  }
  return far + pv + rest;
}

// E1(x) for x > 0 by scaled quadrature: E1 = e^{-x} int_0^inf e^{-v}/(x+v) dv.
inline double e1_quadrature_oracle(double x) {
  const double core = adaptive_simpson([x](double v) { return std::exp(-v) / (x + v); }, 0.0, 90.0,
                                       1e-16 / (1.0 + x));
  return std::exp(-x) * core;
}

// Naive O(modes^3) collision sums per output mode, written directly from
// the definitions with an explicit Kronecker test.
inline void collision_rates_naive(const WaveModel& model, const Spectrum& spectrum,
                                  const BroadenedKernel& kernel, GammaConvention convention,
                                  Eigen::ArrayXd& eta, Eigen::ArrayXd& gamma) {
  const SpectralGrid& g = model.grid;
  const Eigen::Index count = g.mode_count();
  eta = Eigen::ArrayXd::Zero(count);
  gamma = Eigen::ArrayXd::Zero(count);
  const bool paper = convention == GammaConvention::kPaperLiteral;
  const double pi = std::numbers::pi;
  for (Eigen::Index k = 0; k < count; ++k) {
    for (Eigen::Index i1 = 0; i1 < count; ++i1)
      for (Eigen::Index i2 = 0; i2 < count; ++i2)
        for (Eigen::Index i3 = 0; i3 < count; ++i3) {
          if ((g.index(k) + g.index(i1) - g.index(i2) - g.index(i3)) != Eigen::Vector2i::Zero())
            continue;
          const double w = model.interaction.coupling(g.wavevector(k), g.wavevector(i1),
                                                      g.wavevector(i2), g.wavevector(i3));
          const double w2 = w * w;
          const double om_k = model.dispersion.omega(g.wavevector(k));
          const double om_1 = model.dispersion.omega(g.wavevector(i1));
          const double om_2 = model.dispersion.omega(g.wavevector(i2));
          const double om_3 = model.dispersion.omega(g.wavevector(i3));
          const double n1 = spectrum.n[i1], n2 = spectrum.n[i2], n3 = spectrum.n[i3];
          eta[k] += 4.0 * pi * model.epsilon * model.epsilon * w2 *
                    kernel(om_k + om_1 - om_2 - om_3) * n1 * n2 * n3;
          if (paper) {
            gamma[k] += 8.0 * pi * model.epsilon * model.epsilon * w2 *
                        kernel(om_k + om_3 - om_1 - om_2) * (n1 * (n2 + n3) - n2 * n3);
          } else {
            gamma[k] += 4.0 * pi * model.epsilon * model.epsilon * w2 *
                        kernel(om_k + om_1 - om_2 - om_3) * (n1 * n2 + n1 * n3 - n2 * n3);
          }
        }
  }
}

// Naive quadruple-loop dynamical right-hand side in the non-rotating
// variables: dc_l/dt = -i (omega_l c_l + eps sum W conj(c_a) c_m c_nu).
inline Eigen::VectorXcd dynamical_rhs_naive(const WaveModel& model, const Eigen::VectorXcd& c) {
  const SpectralGrid& g = model.grid;
  const Eigen::Index count = g.mode_count();
  Eigen::VectorXcd out(count);
  for (Eigen::Index l = 0; l < count; ++l) {
    std::complex<double> acc(0.0, 0.0);
    for (Eigen::Index a = 0; a < count; ++a)
      for (Eigen::Index m = 0; m < count; ++m)
        for (Eigen::Index nu = 0; nu < count; ++nu) {
          if ((g.index(l) + g.index(a) - g.index(m) - g.index(nu)) != Eigen::Vector2i::Zero())
            continue;
          acc += model.interaction.coupling(g.wavevector(l), g.wavevector(a), g.wavevector(m),
                                            g.wavevector(nu)) *
                 std::conj(c[a]) * c[m] * c[nu];
        }
    const std::complex<double> v =
        model.dispersion.omega(g.wavevector(l)) * c[l] + model.epsilon * acc;
    out[l] = std::complex<double>(v.imag(), -v.real());
  }
  return out;
}

}  // namespace wtlab::test
