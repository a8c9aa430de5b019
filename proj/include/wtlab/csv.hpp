#pragma once

#include <Eigen/Core>

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace wtlab {

/// Number formatted with 17 significant digits (round-trip exact).
std::string format_double(double v);

/// CSV with a header row and %.17g floats; identical data produce
/// byte-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);

  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& values);
  void close();

 private:
  std::ofstream out_;
  size_t columns_ = 0;
  std::string path_;
};

/// Column-oriented CSV contents; non-numeric cells parse as NaN.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<Eigen::ArrayXd> data;

  static CsvTable read(const std::string& path);
  Eigen::Index rows() const { return data.empty() ? 0 : data.front().size(); }
  const Eigen::ArrayXd& column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

}  // namespace wtlab
