#include "wtlab/compare.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace wtlab {

namespace {

double interpolate(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y, double xi) {
  // x ascending; constant extension outside.
  if (xi <= x[0]) return y[0];
  const Eigen::Index n = x.size();
  if (xi >= x[n - 1]) return y[n - 1];
  Eigen::Index lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    (x[mid] <= xi ? lo : hi) = mid;
  }
  const double w = (xi - x[lo]) / (x[hi] - x[lo]);
  return (1.0 - w) * y[lo] + w * y[hi];
}

}  // namespace

CompareReport compare_distributions(const CsvTable& theory, const CsvTable& empirical,
                                    const CompareOptions& opts) {
  const Eigen::ArrayXd& ts = theory.column("s");
  const Eigen::ArrayXd& tp = theory.column("P");
  const Eigen::ArrayXd& es = empirical.column("s");
  const Eigen::ArrayXd& ep = empirical.column("P");
  if (ts.size() < 2 || es.size() < 1) throw std::invalid_argument("compare needs non-trivial tables");
  if (es.minCoeff() > ts.maxCoeff() || es.maxCoeff() < ts.minCoeff())
    throw std::invalid_argument("compare supports are disjoint");

  CompareReport rep;
  rep.s = es;
  rep.empirical = ep;
  rep.bins = es.size();
  rep.theory.resize(es.size());
  for (Eigen::Index i = 0; i < es.size(); ++i) rep.theory[i] = interpolate(ts, tp, es[i]);

  rep.sup_distance = (rep.empirical - rep.theory).abs().maxCoeff();
  // L1 with trapezoidal cell widths on the empirical grid.
  double l1 = 0.0;
  for (Eigen::Index i = 0; i < es.size(); ++i) {
    const double lo = i == 0 ? es[0] : 0.5 * (es[i - 1] + es[i]);
    const double hi = i + 1 == es.size() ? es[es.size() - 1] : 0.5 * (es[i] + es[i + 1]);
    l1 += std::abs(rep.empirical[i] - rep.theory[i]) * (hi - lo);
  }
  rep.l1_distance = l1;

  if (empirical.has_column("P_stderr")) {
    const Eigen::ArrayXd& err = empirical.column("P_stderr");
    rep.z.resize(es.size());
    long counted = 0, inside = 0;
    for (Eigen::Index i = 0; i < es.size(); ++i) {
      if (err[i] > 0.0) {
        rep.z[i] = (rep.empirical[i] - rep.theory[i]) / err[i];
        ++counted;
        if (std::abs(rep.z[i]) <= 3.0) ++inside;
      } else {
        rep.z[i] = 0.0;
      }
    }
    rep.within_3sigma_fraction = counted > 0 ? double(inside) / double(counted) : 1.0;
  }

  rep.tail_lo = opts.tail_lo;
  rep.tail_hi = opts.tail_hi;
  if (rep.tail_lo <= 0.0 || rep.tail_hi <= rep.tail_lo) {
    // Default window: the top decade of the empirical grid.
    rep.tail_hi = es.maxCoeff();
    rep.tail_lo = rep.tail_hi / 10.0;
  }
  try {
    rep.tail_fit = fit_log_slope(es, ep, rep.tail_lo, rep.tail_hi);
  } catch (const std::invalid_argument&) {
    rep.tail_fit = LogSlopeFit{};  // too few positive points; left empty
  }
  return rep;
}

std::string CompareReport::to_json() const {
  nlohmann::json j;
  j["bins"] = bins;
  j["sup_distance"] = sup_distance;
  j["l1_distance"] = l1_distance;
  j["within_3sigma_fraction"] = within_3sigma_fraction;
  j["tail_window"] = {tail_lo, tail_hi};
  j["tail_exponent"] = tail_fit.slope;
  j["tail_exponent_ci95"] = tail_fit.ci95;
  j["tail_points"] = tail_fit.points;
  return j.dump(2) + "\n";
}

void write_plot_data(const std::string& path, const CompareReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plot data: " + path);
  out << "# s theory empirical z\n";
  for (Eigen::Index i = 0; i < report.s.size(); ++i) {
    const double z = report.z.size() == report.s.size() ? report.z[i] : 0.0;
    out << format_double(report.s[i]) << ' ' << format_double(report.theory[i]) << ' '
        << format_double(report.empirical[i]) << ' ' << format_double(z) << '\n';
  }
}

}  // namespace wtlab
