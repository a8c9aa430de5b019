#include "wtlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wtlab {

LinearFit fit_line(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit needs >= 2 matched points");
  const double n = double(x.size());
  const double mx = x.mean();
  const double my = y.mean();
  const double sxx = ((x - mx) * (x - mx)).sum();
  if (!(sxx > 0.0)) throw std::invalid_argument("fit abscissae are degenerate");
  const double sxy = ((x - mx) * (y - my)).sum();
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = int(x.size());
  if (x.size() > 2) {
    const Eigen::ArrayXd resid = y - (fit.intercept + fit.slope * x);
    const double s2 = (resid * resid).sum() / (n - 2.0);
    fit.slope_stderr = std::sqrt(s2 / sxx);
  }
  return fit;
}

LogSlopeFit fit_log_slope(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y, double x_lo,
                          double x_hi) {
  std::vector<double> lx, ly;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < x_lo || x[i] > x_hi || !(y[i] > 0.0)) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  if (lx.size() < 3) throw std::invalid_argument("tail window holds fewer than 3 usable points");
  const Eigen::ArrayXd ax = Eigen::Map<Eigen::ArrayXd>(lx.data(), Eigen::Index(lx.size()));
  const Eigen::ArrayXd ay = Eigen::Map<Eigen::ArrayXd>(ly.data(), Eigen::Index(ly.size()));
  const LinearFit lin = fit_line(ax, ay);
  LogSlopeFit fit;
  fit.slope = lin.slope;
  fit.stderr_ = lin.slope_stderr;
  fit.ci95 = 1.96 * lin.slope_stderr;
  fit.points = lin.points;
  return fit;
}

double ks_uniform_pvalue(std::vector<double> samples) {
  if (samples.size() < 8) throw std::invalid_argument("KS test needs >= 8 samples");
  std::sort(samples.begin(), samples.end());
  const double n = double(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double f = samples[i];
    d = std::max(d, std::abs(double(i + 1) / n - f));
    d = std::max(d, std::abs(f - double(i) / n));
  }
  // Asymptotic Kolmogorov distribution with the Stephens correction.
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * (j % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

Histogram::Histogram(Eigen::ArrayXd edges) : edges_(std::move(edges)) {
  if (edges_.size() < 2) throw std::invalid_argument("histogram needs at least one bin");
  for (Eigen::Index i = 1; i < edges_.size(); ++i)
    if (!(edges_[i] > edges_[i - 1])) throw std::invalid_argument("histogram edges must increase");
  counts_ = Eigen::Array<long long, Eigen::Dynamic, 1>::Zero(edges_.size() - 1);
}

void Histogram::add(double x) {
  if (x < edges_[0] || x >= edges_[edges_.size() - 1]) {
    ++dropped_;
    return;
  }
  // Binary search for the containing bin.
  Eigen::Index lo = 0, hi = edges_.size() - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    (x >= edges_[mid] ? lo : hi) = mid;
  }
  ++counts_[lo];
  ++total_;
}

void Histogram::merge(const Histogram& other) {
  if (other.edges_.size() != edges_.size()) throw std::invalid_argument("histogram edge mismatch");
  counts_ += other.counts_;
  total_ += other.total_;
  dropped_ += other.dropped_;
}

Eigen::ArrayXd Histogram::density() const {
  const Eigen::ArrayXd widths = edges_.tail(bins()) - edges_.head(bins());
  const double denom = std::max<long long>(total_ + dropped_, 1);
  return counts_.cast<double>() / (denom * widths);
}

Eigen::ArrayXd Histogram::density_stderr() const {
  const Eigen::ArrayXd widths = edges_.tail(bins()) - edges_.head(bins());
  const double r = std::max<long long>(total_ + dropped_, 1);
  Eigen::ArrayXd err(bins());
  for (Eigen::Index i = 0; i < bins(); ++i) {
    const double p = double(counts_[i]) / r;
    err[i] = std::sqrt(p * (1.0 - p) / r) / widths[i];
  }
  return err;
}

std::vector<Eigen::Index> Histogram::empty_bins() const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < bins(); ++i)
    if (counts_[i] == 0) out.push_back(i);
  return out;
}

}  // namespace wtlab
