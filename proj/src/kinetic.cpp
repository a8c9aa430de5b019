#include "wtlab/kinetic.hpp"

#include <cmath>
#include <stdexcept>

namespace wtlab {

SpectrumTrajectory evolve_spectrum(const WaveModel& model, const Spectrum& initial,
                                   const KineticEvolveOptions& opts) {
  if (!(opts.dt > 0.0) || !(opts.t_end >= 0.0)) throw std::invalid_argument("bad time grid");
  const double t_avg =
      opts.averaging_time > 0.0 ? opts.averaging_time : default_averaging_window(model).chosen;
  const BroadenedKernel kernel(t_avg);

  const auto rhs = [&](const Eigen::ArrayXd& n) {
    Spectrum s{n.cwiseMax(0.0)};
    const CollisionRates rates = collision_rates_discrete(model, s, kernel, opts.convention);
    if (opts.dt * rates.gamma.abs().maxCoeff() >= opts.stability_limit)
      throw std::runtime_error("kinetic step violates dt * max gamma stability guard");
    return Eigen::ArrayXd(rates.eta - rates.gamma * n);
  };

  const long steps = std::lround(opts.t_end / opts.dt);
  SpectrumTrajectory out;
  out.times.resize(steps / opts.sample_stride + 1);
  Eigen::ArrayXd n = initial.n;
  out.times[0] = 0.0;
  out.n.push_back(n);

  Eigen::Index sample = 1;
  for (long step = 0; step < steps; ++step) {
    const Eigen::ArrayXd k1 = rhs(n);
    const Eigen::ArrayXd k2 = rhs(n + 0.5 * opts.dt * k1);
    const Eigen::ArrayXd k3 = rhs(n + 0.5 * opts.dt * k2);
    const Eigen::ArrayXd k4 = rhs(n + opts.dt * k3);
    n += opts.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((n < 0.0).any()) {
      n = n.cwiseMax(0.0);
      ++out.clipped_steps;
    }
    if ((step + 1) % opts.sample_stride == 0) {
      out.times[sample++] = (step + 1) * opts.dt;
      out.n.push_back(n);
    }
  }
  out.times.conservativeResize(sample);
  return out;
}

MomentVector MomentVector::gaussian(const Eigen::ArrayXd& n, int pmax) {
  MomentVector mv;
  mv.m.resize(pmax + 1, n.size());
  mv.m.row(0).setOnes();
  double factorial = 1.0;
  for (int p = 1; p <= pmax; ++p) {
    factorial *= p;
    mv.m.row(p) = factorial * n.transpose().pow(double(p));
  }
  return mv;
}

Eigen::ArrayXd moment_rhs(int p, const MomentVector& moments, const CollisionRates& rates) {
  if (p < 0 || p > moments.pmax()) throw std::invalid_argument("moment order out of range");
  if (rates.eta.size() != moments.modes()) throw std::invalid_argument("rates and moments sizes differ");
  if (p == 0) return Eigen::ArrayXd::Zero(moments.modes());
  const double pd = p;
  return -pd * rates.gamma * moments.m.row(p).transpose().array() +
         pd * pd * rates.eta * moments.m.row(p - 1).transpose().array();
}

RateSchedule RateSchedule::constant(CollisionRates rates) {
  RateSchedule s;
  s.times_ = {0.0};
  s.rates_.push_back(std::move(rates));
  return s;
}

RateSchedule RateSchedule::piecewise_linear(std::vector<double> times,
                                            std::vector<CollisionRates> rates) {
  if (times.size() != rates.size() || times.empty())
    throw std::invalid_argument("schedule needs matching, non-empty samples");
  for (size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("schedule times must increase");
  RateSchedule s;
  s.times_ = std::move(times);
  s.rates_ = std::move(rates);
  return s;
}

Eigen::Index RateSchedule::modes() const { return rates_.front().eta.size(); }

void RateSchedule::eval(double t, Eigen::ArrayXd& eta, Eigen::ArrayXd& gamma) const {
  if (rates_.size() == 1 || t <= times_.front()) {
    eta = rates_.front().eta;
    gamma = rates_.front().gamma;
    return;
  }
  if (t >= times_.back()) {
    eta = rates_.back().eta;
    gamma = rates_.back().gamma;
    return;
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const size_t hi = static_cast<size_t>(it - times_.begin());
  const size_t lo = hi - 1;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  eta = (1.0 - w) * rates_[lo].eta + w * rates_[hi].eta;
  gamma = (1.0 - w) * rates_[lo].gamma + w * rates_[hi].gamma;
}

MomentTrajectory evolve_moments(const MomentVector& initial, const RateSchedule& rates, double dt,
                                double t_end, int sample_stride, double stability_limit) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("bad time grid");
  if (rates.modes() != initial.modes()) throw std::invalid_argument("rates and moments sizes differ");
  const int pmax = initial.pmax();

  Eigen::ArrayXd eta, gamma;
  const auto rhs = [&](double t, const Eigen::ArrayXXd& m) {
    rates.eval(t, eta, gamma);
    if (dt * double(pmax) * gamma.abs().maxCoeff() >= stability_limit)
      throw std::runtime_error("moment step violates dt * pmax * max gamma stability guard");
    Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(m.rows(), m.cols());
    for (int p = 1; p <= pmax; ++p) {
      const double pd = p;
      out.row(p) = -pd * gamma.transpose() * m.row(p) + pd * pd * eta.transpose() * m.row(p - 1);
    }
    return out;
  };

  const long steps = std::lround(t_end / dt);
  MomentTrajectory out;
  out.times.resize(steps / sample_stride + 1);
  MomentVector mv = initial;
  out.times[0] = 0.0;
  out.moments.push_back(mv);

  Eigen::Index sample = 1;
  double t = 0.0;
  for (long step = 0; step < steps; ++step) {
    const Eigen::ArrayXXd k1 = rhs(t, mv.m);
    const Eigen::ArrayXXd k2 = rhs(t + 0.5 * dt, mv.m + 0.5 * dt * k1);
    const Eigen::ArrayXXd k3 = rhs(t + 0.5 * dt, mv.m + 0.5 * dt * k2);
    const Eigen::ArrayXXd k4 = rhs(t + dt, mv.m + dt * k3);
    mv.m += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = (step + 1) * dt;
    if ((step + 1) % sample_stride == 0) {
      out.times[sample++] = t;
      out.moments.push_back(mv);
    }
  }
  out.times.conservativeResize(sample);
  return out;
}

double steady_generating_function(double lambda, double n) {
  if (lambda * n >= 1.0) throw std::domain_error("lambda n >= 1: moments diverge");
  return 1.0 / (1.0 - lambda * n);
}

double generating_function_residual(const Eigen::ArrayXd& lambda, const Eigen::ArrayXd& z,
                                    const Eigen::ArrayXd& zdot, double eta, double gamma) {
  if (lambda.size() < 5) throw std::invalid_argument("lambda grid too coarse (< 5 points)");
  if (z.size() != lambda.size() || zdot.size() != lambda.size())
    throw std::invalid_argument("sample sizes differ");
  double worst = 0.0;
  for (Eigen::Index i = 1; i + 1 < lambda.size(); ++i) {
    const double zl = (z[i + 1] - z[i - 1]) / (lambda[i + 1] - lambda[i - 1]);
    const double l = lambda[i];
    const double residual = zdot[i] - (l * eta * z[i] + (l * l * eta - l * gamma) * zl);
    worst = std::max(worst, std::abs(residual));
  }
  return worst;
}

}  // namespace wtlab
