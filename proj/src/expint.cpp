#include "wtlab/expint.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wtlab {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Ei(x) = gamma + ln|x| + sum_k x^k / (k k!).
double ei_series(double x) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < 400; ++k) {
    term *= x / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) < kEps * std::abs(sum) && k > 3) break;
  }
  return kEulerGamma + std::log(std::abs(x)) + sum;
}

// E1(z) for z > 0 by the modified-Lentz continued fraction
// e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(...)))).
double e1_continued_fraction(double z) {
  const double tiny = 1e-300;
  double b = z + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int k = 1; k < 400; ++k) {
    const double a = -double(k) * double(k);
    b += 2.0;
    d = a * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-z) * h;
}

// Ei(x) ~ e^x/x * sum_k k!/x^k, truncated at the smallest term.
double ei_asymptotic(double x) {
  double sum = 1.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = term * k / x;
    if (next >= term) break;  // divergent tail reached
    term = next;
    sum += term;
    if (term < kEps * sum) break;
  }
  return std::exp(x) / x * sum;
}

}  // namespace

double exp_integral_ei(double x) {
  if (x == 0.0) throw std::domain_error("Ei diverges at x = 0");
  if (std::isnan(x)) return x;
  if (x >= 710.0) return std::numeric_limits<double>::infinity();
  if (x >= 40.0) return ei_asymptotic(x);
  if (x > -4.0) return ei_series(x);
  return -e1_continued_fraction(-x);
}

}  // namespace wtlab
