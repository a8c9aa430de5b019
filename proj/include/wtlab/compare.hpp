#pragma once

#include <Eigen/Core>

#include <string>

#include "wtlab/csv.hpp"
#include "wtlab/stats.hpp"

namespace wtlab {

/// Distance and tail diagnostics between a theoretical density and an
/// empirical one sampled with per-bin errors.
struct CompareReport {
  Eigen::ArrayXd s;          // empirical grid
  Eigen::ArrayXd theory;     // interpolated onto it
  Eigen::ArrayXd empirical;
  Eigen::ArrayXd z;          // per-bin z-scores where errors are available
  double sup_distance = 0.0;
  double l1_distance = 0.0;
  double within_3sigma_fraction = 1.0;
  LogSlopeFit tail_fit;      // empirical tail exponent over the window
  double tail_lo = 0.0;
  double tail_hi = 0.0;
  long bins = 0;

  std::string to_json() const;
};

struct CompareOptions {
  double tail_lo = 0.0;  // 0 -> upper half-decade heuristic
  double tail_hi = 0.0;
};

/// Columns: theory needs (s, P); empirical needs (s, P) and optionally
/// P_stderr.  Theory is linearly interpolated onto the empirical grid;
/// supports must overlap.
CompareReport compare_distributions(const CsvTable& theory, const CsvTable& empirical,
                                    const CompareOptions& opts = {});

/// Gnuplot-compatible whitespace data: s, theory, empirical, z.
void write_plot_data(const std::string& path, const CompareReport& report);

}  // namespace wtlab
