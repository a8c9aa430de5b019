#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <vector>

namespace wtlab {

/// Rectangular spectral grid of integer wavevectors scaled by 2*pi/L.
///
/// Modes are integer lattice points (stored as 2-vectors; the second
/// component is 0 in one dimension) laid out in lexicographic order.
/// The lattice is symmetric: for every mode k the mode -k is present,
/// and the origin is always included.
class SpectralGrid {
 public:
  /// Symmetric grid with per-dimension indices -floor(n/2)..+floor(n/2).
  static SpectralGrid symmetric(int dimension, int n, double length);

  /// Grid from an explicit negation-closed index set (1D only).
  static SpectralGrid from_indices(const std::vector<int>& indices, double length);

  int dimension() const { return dim_; }
  Eigen::Index mode_count() const { return static_cast<Eigen::Index>(modes_.size()); }
  int modes_per_dimension() const { return 2 * half_span_ + 1; }
  double length() const { return length_; }
  double volume() const { return dim_ == 1 ? length_ : length_ * length_; }
  /// Lattice spacing 2*pi/L.
  double spacing() const;

  const Eigen::Vector2i& index(Eigen::Index m) const { return modes_[static_cast<size_t>(m)]; }
  Eigen::Vector2d wavevector(Eigen::Index m) const;
  /// |k| of mode m.
  double wavenumber(Eigen::Index m) const { return wavevector(m).norm(); }

  /// Mode id for an integer lattice point, or -1 if absent.
  Eigen::Index mode_at(const Eigen::Vector2i& idx) const;
  Eigen::Index negation_of(Eigen::Index m) const { return mode_at(-index(m)); }
  Eigen::Index origin() const { return mode_at(Eigen::Vector2i::Zero()); }

  /// All |k| values as an array (mode order).
  Eigen::ArrayXd wavenumbers() const;

 private:
  SpectralGrid() = default;
  void build_lookup();

  int dim_ = 1;
  int half_span_ = 0;  // lookup table covers [-half_span_, half_span_]^dim
  double length_ = 0.0;
  std::vector<Eigen::Vector2i> modes_;
  std::vector<Eigen::Index> lookup_;  // dense table, -1 marks holes
};

}  // namespace wtlab
