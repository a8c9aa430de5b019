#pragma once

#include <Eigen/Core>

#include <vector>

namespace wtlab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  int points = 0;
};

/// Ordinary least squares y = a + b x with residual-based slope error.
LinearFit fit_line(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);

/// Log-log slope of y(x) over the window [x_lo, x_hi]; points with
/// y <= 0 are skipped.  ci95 is 1.96 standard errors.
struct LogSlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  double ci95 = 0.0;
  int points = 0;
};
LogSlopeFit fit_log_slope(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y, double x_lo, double x_hi);

/// Kolmogorov-Smirnov p-value against Uniform[0, 1).
double ks_uniform_pvalue(std::vector<double> samples);

/// Counting histogram over fixed edges; out-of-range samples are dropped
/// but tallied.
class Histogram {
 public:
  explicit Histogram(Eigen::ArrayXd edges);

  void add(double x);
  void merge(const Histogram& other);

  const Eigen::ArrayXd& edges() const { return edges_; }
  Eigen::Index bins() const { return counts_.size(); }
  const Eigen::Array<long long, Eigen::Dynamic, 1>& counts() const { return counts_; }
  long long total() const { return total_; }
  long long dropped() const { return dropped_; }

  /// Normalized density with binomial per-bin standard errors.
  Eigen::ArrayXd density() const;
  Eigen::ArrayXd density_stderr() const;
  std::vector<Eigen::Index> empty_bins() const;

 private:
  Eigen::ArrayXd edges_;
  Eigen::Array<long long, Eigen::Dynamic, 1> counts_;
  long long total_ = 0;
  long long dropped_ = 0;
};

}  // namespace wtlab
