#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wtlab/rng.hpp"
#include "wtlab/wave_model.hpp"

using namespace wtlab;

TEST_CASE("symmetric grids are negation-closed with distinct modes") {
  for (int n : {2, 5, 8, 32}) {
    const SpectralGrid g = SpectralGrid::symmetric(1, n, 2.0 * std::numbers::pi);
    CHECK(g.mode_count() == 2 * (n / 2) + 1);
    for (Eigen::Index m = 0; m < g.mode_count(); ++m) {
      CHECK(g.negation_of(m) >= 0);
      for (Eigen::Index j = m + 1; j < g.mode_count(); ++j) CHECK(g.index(m) != g.index(j));
    }
    CHECK(g.origin() >= 0);
  }
  const SpectralGrid g2 = SpectralGrid::symmetric(2, 4, 1.0);
  CHECK(g2.mode_count() == 25);
  CHECK(g2.spacing() == doctest::Approx(2.0 * std::numbers::pi));
}

TEST_CASE("explicit index grids enforce the declared invariants") {
  CHECK_NOTHROW(SpectralGrid::from_indices({-1, 1}, 1.0));
  CHECK_THROWS(SpectralGrid::from_indices({1, 2}, 1.0));       // not negation-closed
  CHECK_THROWS(SpectralGrid::from_indices({1, 1, -1}, 1.0));   // duplicate
  CHECK_THROWS(SpectralGrid::from_indices({1}, 1.0));          // too small
}

TEST_CASE("dispersion values and symmetry") {
  const DispersionLaw deep = DispersionLaw::deep_water_gravity(9.81);
  CHECK(deep.omega(1.0) == doctest::Approx(3.132091952673165).epsilon(1e-12));

  const DispersionLaw power = DispersionLaw::power_law(1.0, 2.0);
  CHECK(power.omega(3.0) == doctest::Approx(9.0));
  CHECK(power.omega(0.0) == 0.0);
  CHECK(deep.omega(0.0) == 0.0);

  // omega(k) = omega(-k) over a whole grid.
  const SpectralGrid g = SpectralGrid::symmetric(1, 16, 2.0 * std::numbers::pi);
  for (Eigen::Index m = 0; m < g.mode_count(); ++m)
    CHECK(deep.omega(g.wavevector(m)) == deep.omega(g.wavevector(g.negation_of(m))));

  CHECK_THROWS_AS(DispersionLaw::deep_water_gravity(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(DispersionLaw::power_law(-1.0, 2.0), std::invalid_argument);
}

TEST_CASE("interaction values and exact symmetries") {
  const InteractionModel w_const = InteractionModel::constant(1.0);
  const Eigen::Vector2d a(1, 0), b(2, 0), c(-1, 0), d(4, 0);
  CHECK(w_const.coupling(a, b, c, d) == 1.0);

  const InteractionModel w_pow = InteractionModel::product_power(1.0, 4.0);
  const Eigen::Vector2d k2(2, 0);
  CHECK(w_pow.coupling(k2, k2, k2, k2) == doctest::Approx(16.0));

  // 1000 random quadruples: symmetric under k<->k1, k2<->k3 and the
  // pair exchange, exactly.
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const auto v = [&rng]() { return Eigen::Vector2d(4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0); };
    const Eigen::Vector2d k = v(), k1 = v(), kk2 = v(), k3 = v();
    for (const InteractionModel& w : {w_const, InteractionModel::product_power(0.7, 1.5)}) {
      const double base = w.coupling(k, k1, kk2, k3);
      CHECK(w.coupling(k1, k, kk2, k3) == base);
      CHECK(w.coupling(k, k1, k3, kk2) == base);
      CHECK(w.coupling(kk2, k3, k, k1) == base);
    }
  }
}

TEST_CASE("critical breaking intensity") {
  // omega(2) = 1 with c = 0.5, alpha = 1: s_nl = 1 / (0.1 * 1 * 4) = 2.5.
  const CutoffModel cut(0.1, 1.0, DispersionLaw::power_law(0.5, 1.0));
  CHECK(cut.critical_intensity(2.0) == doctest::Approx(2.5).epsilon(1e-14));

  const CutoffModel deep(0.1, 1.0, DispersionLaw::deep_water_gravity(9.81));
  CHECK(deep.critical_intensity(1.0) == doctest::Approx(31.32091952673165).epsilon(1e-12));

  // Halving epsilon doubles s_nl, exactly.
  const CutoffModel halved(0.05, 1.0, DispersionLaw::deep_water_gravity(9.81));
  CHECK(halved.critical_intensity(1.0) == 2.0 * deep.critical_intensity(1.0));

  CHECK_THROWS_AS(deep.critical_intensity(0.0), std::domain_error);
  CHECK_THROWS_AS(CutoffModel(-0.1, 1.0, DispersionLaw::deep_water_gravity(9.81)),
                  std::invalid_argument);
}

TEST_CASE("cascade breakdown scales and tail-area parameters") {
  const CascadeScaling direct(9.81, 1.0, 1.0, CascadeScaling::Direction::kDirect);
  CHECK(direct.breakdown_wavenumber() == doctest::Approx(944.076141).epsilon(1e-9));

  const CascadeScaling inverse(9.81, 1.0, 2.0, CascadeScaling::Direction::kInverse);
  CHECK(inverse.breakdown_wavenumber() == doctest::Approx(4.905));

  // Doubling the energy flux divides k_nl by four, exactly.
  const CascadeScaling direct2(9.81, 2.0, 1.0, CascadeScaling::Direction::kDirect);
  CHECK(direct2.breakdown_wavenumber() == direct.breakdown_wavenumber() / 4.0);

  // Both branches hit exactly 1 at their breakdown scale.
  CHECK(direct.tail_area_parameter(direct.breakdown_wavenumber()) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(inverse.tail_area_parameter(inverse.breakdown_wavenumber()) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(inverse.tail_area_parameter(9.81 / 2.0 * 2.0) == doctest::Approx(2.0));

  CHECK(direct.tail_area_parameter(1.0) == doctest::Approx(1.0 / 9.81).epsilon(1e-9));

  // Zero flux -> infinite breakdown wavenumber signal.
  const CascadeScaling zero(9.81, 0.0, 0.0, CascadeScaling::Direction::kDirect);
  CHECK(std::isinf(zero.breakdown_wavenumber()));
  CHECK_THROWS_AS(CascadeScaling(9.81, -1.0, 1.0, CascadeScaling::Direction::kDirect),
                  std::invalid_argument);
}
