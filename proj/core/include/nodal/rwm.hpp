#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nodal/nodal.hpp"

// Random wave model: the planar Gaussian field with spectral measure uniform
// on the unit circle, approximated by a finite superposition of plane waves.
namespace nodal {

inline constexpr int kMinPlaneWaves = 64;
inline constexpr int kDefaultPlaneWaves = 1024;

/// F(x) = sqrt(2/M) sum_j cos(<xi_j, x> + phase_j), xi_j uniform on S^1,
/// phases uniform on [0, 2 pi). Var F(x) = 1 for every x and every sample.
class RwmField {
 public:
  RwmField(std::vector<double> angles, std::vector<double> phases);

  int wave_count() const { return static_cast<int>(angles_.size()); }
  std::span<const double> angles() const { return angles_; }
  std::span<const double> phases() const { return phases_; }

  double value(double x1, double x2) const;

  /// Values on the tensor grid xs x ys, row-major with xs major.
  void values_on_grid(std::span<const double> xs, std::span<const double> ys, std::vector<double>& out) const;

 private:
  std::vector<double> angles_;
  std::vector<double> phases_;
  std::vector<double> c1_, s1_;  // cos, sin of wave direction
};

/// Throws ConfigurationError for M < kMinPlaneWaves.
RwmField sample_rwm(int wave_count, std::uint64_t seed);

/// Lattice spacing pi / q over the disk of radius R (wavenumber 1).
DiskLattice rwm_lattice(double radius, int q);

/// Components of {F != 0} inside B(R) that avoid the boundary ring.
/// Throws ConfigurationError for R < 5 or q < 8.
NodalCensus census_rwm(const RwmField& field, double radius, int q = kMinCensusOversample);

/// Same census for an arbitrary planar function (used for deterministic fields).
NodalCensus census_planar(const std::function<double(double, double)>& f, double radius, int q);

}  // namespace nodal
