#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wtlab/kinetic.hpp"
#include "wtlab/rng.hpp"

using namespace wtlab;

namespace {

WaveModel small_model() {
  return WaveModel{SpectralGrid::symmetric(1, 8, 2.0 * std::numbers::pi),
                   DispersionLaw::power_law(1.0, 0.5), InteractionModel::constant(1.0), 0.1};
}

CollisionRates frozen_rates(Eigen::Index modes, double eta, double gamma) {
  CollisionRates rates;
  rates.eta = Eigen::ArrayXd::Constant(modes, eta);
  rates.gamma = Eigen::ArrayXd::Constant(modes, gamma);
  return rates;
}

}  // namespace

TEST_CASE("kinetic RHS: steady-state identity and empty spectrum") {
  CollisionRates rates = frozen_rates(5, 2.0, 0.5);
  Spectrum steady{rates.eta / rates.gamma};
  CHECK(kinetic_rhs(rates, steady).abs().maxCoeff() == 0.0);
  Spectrum empty{Eigen::ArrayXd::Zero(5)};
  CHECK(kinetic_rhs(rates, empty).isApprox(rates.eta));
  Spectrum wrong{Eigen::ArrayXd::Zero(4)};
  CHECK_THROWS_AS(kinetic_rhs(rates, wrong), std::invalid_argument);
}

TEST_CASE("self-consistent evolution holds the equipartition fixed point") {
  const WaveModel model = small_model();
  const Spectrum flat = Spectrum::constant(model.grid.mode_count(), 0.8);
  KineticEvolveOptions opts;
  opts.dt = 0.01;
  opts.t_end = 3.0;
  opts.sample_stride = 50;
  const SpectrumTrajectory traj = evolve_spectrum(model, flat, opts);
  CHECK((traj.n.back() - flat.n).abs().maxCoeff() <= 1e-10);
  CHECK(traj.clipped_steps == 0);
}

TEST_CASE("exact eps^2 rate scaling transfers to the trajectory clock") {
  const WaveModel model = small_model();
  WaveModel doubled = model;
  doubled.epsilon = 2.0 * model.epsilon;
  Spectrum s{Eigen::ArrayXd(model.grid.mode_count())};
  for (Eigen::Index m = 0; m < s.n.size(); ++m)
    s.n[m] = 1.0 / (1.0 + std::pow(model.grid.wavenumber(m), 2.0));
  const BroadenedKernel kernel(20.0);
  const CollisionRates r1 = collision_rates_discrete(model, s, kernel);
  const CollisionRates r4 = collision_rates_discrete(doubled, s, kernel);
  CHECK((r4.eta - 4.0 * r1.eta).abs().maxCoeff() == 0.0);  // (2 eps)^2 is exact
  CHECK((r4.gamma - 4.0 * r1.gamma).abs().maxCoeff() == 0.0);

  // n_2eps(t) tracks n_eps(4t): rates are exactly 4x, so the flows agree
  // up to integrator error.
  KineticEvolveOptions a;
  a.dt = 0.01;
  a.t_end = 2.0;
  a.sample_stride = 200;
  a.averaging_time = 20.0;
  KineticEvolveOptions b = a;
  b.dt = 0.04;
  b.t_end = 8.0;
  const SpectrumTrajectory fast = evolve_spectrum(doubled, s, a);
  const SpectrumTrajectory slow = evolve_spectrum(model, s, b);
  CHECK((fast.n.back() - slow.n.back()).abs().maxCoeff() <= 1e-8);
}

TEST_CASE("frozen-rate relaxation follows the closed form") {
  // Single-mode toy, eta = gamma = 1: M1(t) = 1 - e^{-t} from M1(0) = 0.
  const CollisionRates rates = frozen_rates(1, 1.0, 1.0);
  MomentVector mv;
  mv.m.resize(2, 1);
  mv.m(0, 0) = 1.0;
  mv.m(1, 0) = 0.0;
  const MomentTrajectory traj =
      evolve_moments(mv, RateSchedule::constant(rates), 1e-3, 3.0, 100);
  for (Eigen::Index i = 0; i < traj.times.size(); ++i) {
    const double expected = 1.0 - std::exp(-traj.times[i]);
    CHECK(traj.moments[size_t(i)].m(1, 0) == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("moment RHS: hierarchy values and the Gaussian fixed point") {
  const CollisionRates rates = frozen_rates(3, 1.0, 1.0);
  MomentVector mv = MomentVector::gaussian(Eigen::ArrayXd::Constant(3, 1.0), 2);
  // p = 2 with M2 = 0, M1 = n = eta = gamma = 1 -> 4.
  mv.m(2, 1) = 0.0;
  const Eigen::ArrayXd rhs2 = moment_rhs(2, mv, rates);
  CHECK(rhs2[1] == doctest::Approx(4.0));
  CHECK(moment_rhs(0, mv, rates).abs().maxCoeff() == 0.0);

  // p = 1 row is bit-identical to the kinetic RHS.
  Spectrum s{mv.m.row(1).transpose().array()};
  const Eigen::ArrayXd k1 = moment_rhs(1, mv, rates);
  const Eigen::ArrayXd k2 = kinetic_rhs(rates, s);
  for (Eigen::Index i = 0; i < k1.size(); ++i) CHECK(k1[i] == k2[i]);

  // Gaussian values annihilate every row for p <= 6 when gamma/eta = 1/n.
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const double n = 0.2 + 2.0 * rng.uniform();
    const double eta = 0.3 + rng.uniform();
    CollisionRates r = frozen_rates(1, eta, eta / n);
    const MomentVector g = MomentVector::gaussian(Eigen::ArrayXd::Constant(1, n), 6);
    for (int p = 1; p <= 6; ++p) {
      const double scale = p * r.gamma[0] * g.m(p, 0);
      CHECK(std::abs(moment_rhs(p, g, r)[0]) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("moment trajectories preserve the Cauchy-Schwarz ladder") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const double n = 0.3 + rng.uniform();
    const double eta = 0.2 + rng.uniform();
    const double gamma = eta / n;
    CollisionRates rates = frozen_rates(1, eta, gamma);
    MomentVector mv = MomentVector::gaussian(Eigen::ArrayXd::Constant(1, n), 4);
    // Gaussian-adjacent start: jitter the moments by up to 0.1%.
    for (int p = 1; p <= 4; ++p) mv.m(p, 0) *= 1.0 + 1e-3 * (rng.uniform() - 0.5);
    const MomentTrajectory traj = evolve_moments(mv, RateSchedule::constant(rates), 5e-3, 1.0, 1);
    for (const MomentVector& m : traj.moments) {
      CHECK(m.m(0, 0) == 1.0);
      for (int p = 1; p < 4; ++p)
        CHECK(m.m(p, 0) * m.m(p, 0) <= m.m(p - 1, 0) * m.m(p + 1, 0) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("steady generating function and its moment derivatives") {
  CHECK(steady_generating_function(0.0, 1.7) == 1.0);
  CHECK(steady_generating_function(0.5, 1.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(steady_generating_function(1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(steady_generating_function(0.6, 2.0), std::domain_error);

  // p-th derivative at lambda = 0 equals p! n^p by finite differences.
  const double n = 0.7;
  const double h = 1e-3;
  const auto z = [n](double l) { return steady_generating_function(l, n); };
  const double d1 = (z(h) - z(-h)) / (2.0 * h);
  const double d2 = (z(h) - 2.0 * z(0.0) + z(-h)) / (h * h);
  const double d3 = (z(2.0 * h) - 2.0 * z(h) + 2.0 * z(-h) - z(-2.0 * h)) / (2.0 * h * h * h);
  CHECK(d1 == doctest::Approx(n).epsilon(1e-5));
  CHECK(d2 == doctest::Approx(2.0 * n * n).epsilon(1e-5));
  CHECK(d3 == doctest::Approx(6.0 * n * n * n).epsilon(1e-4));
}

TEST_CASE("generating-function equation: steady residual and empty field") {
  const double n = 0.8, eta = 1.3, gamma = eta / n;
  const Eigen::ArrayXd lambda = Eigen::ArrayXd::LinSpaced(41, 0.0, 0.5 / n);
  Eigen::ArrayXd z(lambda.size());
  const Eigen::ArrayXd zdot = Eigen::ArrayXd::Zero(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) z[i] = steady_generating_function(lambda[i], n);
  const double dl = lambda[1] - lambda[0];
  // Steady Z annihilates the operator up to the centered-difference error.
  const double bound = dl * dl * 200.0;  // O(dl^2) with the Z''' scale on this grid
  CHECK(generating_function_residual(lambda, z, zdot, eta, gamma) <= bound);

  // Empty field: Z = 1, eta = 0 -> residual 0.
  const Eigen::ArrayXd ones = Eigen::ArrayXd::Ones(lambda.size());
  CHECK(generating_function_residual(lambda, ones, zdot, 0.0, gamma) == 0.0);

  const Eigen::ArrayXd tiny = Eigen::ArrayXd::Ones(3);
  CHECK_THROWS_AS(generating_function_residual(tiny, tiny, tiny, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("lambda expansion of the Z equation reproduces the printed hierarchy") {
  // Z = sum_p lambda^p M_p / p!: the implemented equation
  // Zdot = lambda eta Z + (lambda^2 eta - lambda gamma) Z_lambda
  // must produce Mdot_p = -p gamma M_p + p^2 eta M_{p-1} coefficient by
  // coefficient; the rejected "lambda n gamma" variant must not.
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int pmax = 4;
    double m[pmax + 1];
    m[0] = 1.0;
    for (int p = 1; p <= pmax; ++p) m[p] = 0.1 + rng.uniform();
    const double eta = 0.2 + rng.uniform();
    const double gamma = 0.2 + rng.uniform();

    double z[pmax + 1];  // z[p] = M_p / p!
    double fact = 1.0;
    for (int p = 0; p <= pmax; ++p) {
      if (p > 0) fact *= p;
      z[p] = m[p] / fact;
    }
    // Coefficient of lambda^p in lambda eta Z + (lambda^2 eta - lambda gamma) Z_lambda,
    // using Z_lambda[q] = (q+1) z[q+1].
    for (int p = 1; p <= pmax; ++p) {
      double coeff = eta * z[p - 1] - gamma * p * z[p];
      if (p >= 2) coeff += eta * (p - 1) * z[p - 1];
      double fact_p = 1.0;
      for (int q = 1; q <= p; ++q) fact_p *= q;
      const double expected = (-p * gamma * m[p] + double(p) * p * eta * m[p - 1]) / fact_p;
      CHECK(coeff == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}
