#include "wtlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace wtlab {

SpectralGrid SpectralGrid::symmetric(int dimension, int n, double length) {
  if (dimension != 1 && dimension != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
  if (n < 2) throw std::invalid_argument("grid mode count must be >= 2");
  if (!(length > 0.0)) throw std::invalid_argument("grid length must be positive");

  SpectralGrid g;
  g.dim_ = dimension;
  g.length_ = length;
  g.half_span_ = n / 2;
  const int m = g.half_span_;
  if (dimension == 1) {
    for (int i = -m; i <= m; ++i) g.modes_.emplace_back(i, 0);
  } else {
    for (int j = -m; j <= m; ++j)
      for (int i = -m; i <= m; ++i) g.modes_.emplace_back(i, j);
  }
  g.build_lookup();
  return g;
}

SpectralGrid SpectralGrid::from_indices(const std::vector<int>& indices, double length) {
  if (indices.size() < 2) throw std::invalid_argument("grid needs at least two modes");
  if (!(length > 0.0)) throw std::invalid_argument("grid length must be positive");
  std::set<int> unique(indices.begin(), indices.end());
  if (unique.size() != indices.size()) throw std::invalid_argument("grid wavevectors must be distinct");
  for (int i : unique)
    if (!unique.count(-i)) throw std::invalid_argument("grid must be closed under negation");

  SpectralGrid g;
  g.dim_ = 1;
  g.length_ = length;
  g.half_span_ = std::max(std::abs(*unique.begin()), std::abs(*unique.rbegin()));
  for (int i : unique) g.modes_.emplace_back(i, 0);
  g.build_lookup();
  return g;
}

void SpectralGrid::build_lookup() {
  const int w = 2 * half_span_ + 1;
  lookup_.assign(static_cast<size_t>(w) * (dim_ == 1 ? 1 : w), Eigen::Index{-1});
  for (size_t m = 0; m < modes_.size(); ++m) {
    const auto& idx = modes_[m];
    const size_t flat = static_cast<size_t>(idx.x() + half_span_) +
                        (dim_ == 1 ? 0 : static_cast<size_t>(w) * static_cast<size_t>(idx.y() + half_span_));
    lookup_[flat] = static_cast<Eigen::Index>(m);
  }
}

double SpectralGrid::spacing() const { return 2.0 * std::numbers::pi / length_; }

Eigen::Vector2d SpectralGrid::wavevector(Eigen::Index m) const {
  return spacing() * index(m).cast<double>();
}

Eigen::Index SpectralGrid::mode_at(const Eigen::Vector2i& idx) const {
  if (std::abs(idx.x()) > half_span_) return -1;
  if (dim_ == 1) {
    if (idx.y() != 0) return -1;
    return lookup_[static_cast<size_t>(idx.x() + half_span_)];
  }
  if (std::abs(idx.y()) > half_span_) return -1;
  const int w = 2 * half_span_ + 1;
  return lookup_[static_cast<size_t>(idx.x() + half_span_) +
                 static_cast<size_t>(w) * static_cast<size_t>(idx.y() + half_span_)];
}

Eigen::ArrayXd SpectralGrid::wavenumbers() const {
  Eigen::ArrayXd k(mode_count());
  for (Eigen::Index m = 0; m < mode_count(); ++m) k[m] = wavenumber(m);
  return k;
}

}  // namespace wtlab
