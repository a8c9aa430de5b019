#pragma once

namespace wtlab {

/// Principal-value exponential integral Ei(x), x != 0.
///
/// Power series about 0 for |x| < 4 and for 0 < x < 40 (all-positive
/// terms, no cancellation); asymptotic expansion for x >= 40; continued
/// fraction for E1(-x) on x <= -4.  Relative accuracy ~1e-13 away from
/// the real zero of Ei near x = 0.3725.
double exp_integral_ei(double x);

}  // namespace wtlab
