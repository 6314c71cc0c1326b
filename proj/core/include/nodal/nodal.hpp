#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nodal/ensemble.hpp"

// Grid-based nodal domain counting.
//
// Every census evaluates the field on a lattice, assigns each vertex a sign
// (|f| < kZeroTolerance counts as positive), and merges equal-sign
// 4-neighbours with a union-find pass. The number of resulting components is
// the nodal domain count.
namespace nodal {

inline constexpr double kZeroTolerance = 1e-14;
inline constexpr std::size_t kDefaultCellBudget = 200'000'000;

/// Minimum oversampling accepted by census_global without an override.
inline constexpr int kMinCensusOversample = 8;

/// Equiangular sphere grid: rows theta_i = i pi / n_theta (i = 0..n_theta),
/// columns phi_j = 2 pi j / n_phi. The two pole rows collapse to single
/// vertices adjacent to every vertex of the neighbouring row; columns wrap.
///
/// With n_theta = q n and n_phi = 2 q n the spacing is pi / (q n) in both
/// directions at the equator, i.e. q samples per nodal half-wavelength.
struct SphereGrid {
  int degree = 0;
  int oversample = 0;
  int n_theta = 0;
  int n_phi = 0;

  double spacing_theta() const;
  double spacing_phi() const;
  double theta(int row) const;
  double phi(int col) const;

  /// Pole vertices plus (n_theta - 1) * n_phi interior vertices.
  std::size_t vertex_count() const;

  /// Estimated working memory of one census (values, signs, labels).
  std::size_t memory_bytes() const;
};

/// Throws ConfigurationError for q < 4 or n < 1, ResourceError when the
/// vertex count exceeds cell_budget.
SphereGrid build_sphere_grid(int n, int q, std::size_t cell_budget = kDefaultCellBudget);

struct ComponentInfo {
  std::size_t cells = 0;
  int sign = 0;
  /// Largest distance from a cell of the component to the nodal line
  /// (geodesic on the sphere, patch units on a lattice). Zero unless
  /// geometry was requested.
  double inner_radius = 0.0;
  bool touches_boundary = false;
};

struct NodalCensus {
  int count_total = 0;
  int count_positive = 0;
  int count_negative = 0;
  /// Components that avoid the boundary ring (patch and planar modes only).
  std::optional<int> count_contained;
  std::optional<double> length_estimate;
  /// Vertices with |f| < kZeroTolerance that were assigned positive sign.
  std::size_t zero_ties = 0;
  /// Filled when CensusOptions::component_geometry is set.
  std::vector<ComponentInfo> components;
};

struct CensusOptions {
  bool allow_resolution_override = false;
  bool component_geometry = false;
};

/// Per-(degree, grid) synthesis tables: Legendre rows and trigonometric
/// columns. Building them costs about as much as one census, so reuse one
/// instance for many realizations of the same degree.
class SphereSynthesizer {
 public:
  SphereSynthesizer(int degree, const SphereGrid& grid);

  const SphereGrid& grid() const { return grid_; }
  int degree() const { return degree_; }

  /// Vertex values of sum_k c_k Y^std_k for standard-basis coefficients c,
  /// in vertex order (north pole, interior rows, south pole).
  void synthesize(std::span<const double> standard_coeffs, std::vector<double>& out) const;

 private:
  int degree_;
  SphereGrid grid_;
  std::vector<double> rows_;  // (n_theta - 1) x (n + 1), weighted by sqrt2 for k > 0
  std::vector<double> trig_;  // (2n + 1) x n_phi in basis index order
};

/// Global nodal domain count. Throws ConfigurationError when the grid is
/// coarser than kMinCensusOversample samples per half-wavelength of the
/// field's degree, unless the override is set.
NodalCensus census_global(const RandomField& field, const SphereGrid& grid, const CensusOptions& options = {});
NodalCensus census_global(const RandomField& field, const SphereSynthesizer& synth,
                          const CensusOptions& options = {});

/// Labels precomputed vertex values of a sphere grid.
NodalCensus label_sphere_grid(const SphereGrid& grid, std::span<const double> values, bool geometry);

/// Square lattice y_{ab} = (-W + a h, -W + b h), a, b = 0..2c, with h = W / c,
/// restricted to the closed disk |y| <= W. Ring cells are disk cells with a
/// 4-neighbour outside the disk (or outside the lattice).
struct DiskLattice {
  double half_width = 1.0;
  int half_cells = 1;

  double spacing() const { return half_width / half_cells; }
  int side() const { return 2 * half_cells + 1; }
  double coord(int a) const { return -half_width + a * spacing(); }
  bool in_disk(int a, int b) const;
};

/// Smallest lattice with spacing <= max_spacing.
DiskLattice make_disk_lattice(double half_width, double max_spacing);

/// Counts components of {f != 0} inside the disk. values has side() x side()
/// entries (row-major, a major); entries outside the disk are ignored.
NodalCensus census_disk(const DiskLattice& lattice, std::span<const double> values, bool geometry = false);

/// Patch lattice over B(0, W) in patch coordinates.
struct PatchGrid {
  DiskLattice lattice;
  double scale = 0.0;
  int oversample = 0;
};

/// Spacing pi / (q R): q samples per half-wavelength of F_x, which oscillates
/// at wavenumber ~R. This is within the required 2 pi / (q R).
PatchGrid build_patch_grid(double scale, int q = kMinCensusOversample, double half_width = 1.0);

NodalCensus census_patch(const RandomField& field, const PatchSpec& spec, const PatchGrid& grid,
                         const CensusOptions& options = {});

/// Crofton estimate L = pi * E[#crossings of a uniform random great circle].
/// Each circle is sampled at samples_per_degree * n points with a random phase.
double nodal_length_crofton(const RandomField& field, int n_circles, std::uint64_t seed,
                            int samples_per_degree = 16);

/// Outcome of comparing a census at q with one at 2q.
struct RefinementCheck {
  int coarse = 0;
  int fine = 0;
  bool stable() const { return coarse == fine; }
};

RefinementCheck refinement_check(const RandomField& field, int q);

}  // namespace nodal
