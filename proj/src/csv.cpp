#include "wtlab/csv.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace wtlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path), columns_(columns.size()), path_(path) {
  if (!out_) throw std::runtime_error("cannot open csv for writing: " + path);
  for (size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::invalid_argument("csv row width mismatch");
  for (size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
  out_ << "\n";
}

void CsvWriter::raw_row(const std::vector<std::string>& values) {
  if (values.size() != columns_) throw std::invalid_argument("csv row width mismatch");
  for (size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
  out_ << "\n";
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw std::runtime_error("failed writing csv: " + path_);
}

CsvTable CsvTable::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv: " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.columns.push_back(cell);
  }
  std::vector<std::vector<double>> cols(table.columns.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    size_t i = 0;
    while (std::getline(ss, cell, ',') && i < cols.size()) {
      try {
        cols[i].push_back(std::stod(cell));
      } catch (...) {
        cols[i].push_back(std::numeric_limits<double>::quiet_NaN());
      }
      ++i;
    }
    while (i < cols.size()) cols[i++].push_back(std::numeric_limits<double>::quiet_NaN());
  }
  for (auto& c : cols)
    table.data.push_back(Eigen::Map<Eigen::ArrayXd>(c.data(), Eigen::Index(c.size())));
  return table;
}

const Eigen::ArrayXd& CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return data[i];
  throw std::invalid_argument("csv column not found: " + name);
}

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& c : columns)
    if (c == name) return true;
  return false;
}

}  // namespace wtlab
