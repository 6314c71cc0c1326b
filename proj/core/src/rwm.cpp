#include "nodal/rwm.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

#include "nodal/error.hpp"
#include "nodal/rng.hpp"

namespace nodal {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_census_args(double radius, int q) {
  if (!(radius >= 5.0)) throw ConfigurationError("census_rwm: R must be >= 5, got " + std::to_string(radius));
  if (q < kMinCensusOversample) {
    throw ConfigurationError("census_rwm: oversample q must be >= " + std::to_string(kMinCensusOversample));
  }
}

}  // namespace

RwmField::RwmField(std::vector<double> angles, std::vector<double> phases)
    : angles_(std::move(angles)), phases_(std::move(phases)) {
  if (angles_.size() != phases_.size()) throw DimensionError("RwmField: angle and phase counts differ");
  if (angles_.empty()) throw DimensionError("RwmField: no waves");
  c1_.resize(angles_.size());
  s1_.resize(angles_.size());
  for (std::size_t j = 0; j < angles_.size(); ++j) {
    c1_[j] = std::cos(angles_[j]);
    s1_[j] = std::sin(angles_[j]);
  }
}

double RwmField::value(double x1, double x2) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < angles_.size(); ++j) sum += std::cos(c1_[j] * x1 + s1_[j] * x2 + phases_[j]);
  return std::sqrt(2.0 / static_cast<double>(angles_.size())) * sum;
}

void RwmField::values_on_grid(std::span<const double> xs, std::span<const double> ys,
                              std::vector<double>& out) const {
  // cos(a + b) = cos a cos b - sin a sin b with a = xi_1 x, b = xi_2 y + phase
  // turns the grid evaluation into one product of two (points x 2M) tables.
  const Eigen::Index m = static_cast<Eigen::Index>(angles_.size());
  const Eigen::Index nx = static_cast<Eigen::Index>(xs.size());
  const Eigen::Index ny = static_cast<Eigen::Index>(ys.size());
  RowMatrix left(nx, 2 * m);
  RowMatrix right(2 * m, ny);
  for (Eigen::Index i = 0; i < nx; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double a = c1_[static_cast<std::size_t>(j)] * xs[static_cast<std::size_t>(i)];
      left(i, j) = std::cos(a);
      left(i, m + j) = -std::sin(a);
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < ny; ++i) {
      const double b = s1_[static_cast<std::size_t>(j)] * ys[static_cast<std::size_t>(i)] +
                       phases_[static_cast<std::size_t>(j)];
      right(j, i) = std::cos(b);
      right(m + j, i) = std::sin(b);
    }
  }
  out.resize(static_cast<std::size_t>(nx * ny));
  Eigen::Map<RowMatrix> result(out.data(), nx, ny);
  result.noalias() = left * right;
  result *= std::sqrt(2.0 / static_cast<double>(m));
}

RwmField sample_rwm(int wave_count, std::uint64_t seed) {
  if (wave_count < kMinPlaneWaves) {
    throw ConfigurationError("sample_rwm: need at least " + std::to_string(kMinPlaneWaves) + " waves");
  }
  std::vector<double> angles(static_cast<std::size_t>(wave_count));
  std::vector<double> phases(static_cast<std::size_t>(wave_count));
  for (int j = 0; j < wave_count; ++j) {
    rng::CounterStream stream(rng::combine(seed, static_cast<std::uint64_t>(j)));
    angles[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * stream.uniform();
    phases[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * stream.uniform();
  }
  return RwmField(std::move(angles), std::move(phases));
}

DiskLattice rwm_lattice(double radius, int q) { return make_disk_lattice(radius, std::numbers::pi / q); }

NodalCensus census_rwm(const RwmField& field, double radius, int q) {
  check_census_args(radius, q);
  const DiskLattice lattice = rwm_lattice(radius, q);
  std::vector<double> coords(static_cast<std::size_t>(lattice.side()));
  for (int a = 0; a < lattice.side(); ++a) coords[static_cast<std::size_t>(a)] = lattice.coord(a);
  std::vector<double> values;
  field.values_on_grid(coords, coords, values);
  return census_disk(lattice, values);
}

NodalCensus census_planar(const std::function<double(double, double)>& f, double radius, int q) {
  check_census_args(radius, q);
  const DiskLattice lattice = rwm_lattice(radius, q);
  const int side = lattice.side();
  std::vector<double> values(static_cast<std::size_t>(side) * side, 0.0);
  for (int a = 0; a < side; ++a) {
    for (int b = 0; b < side; ++b) {
      if (lattice.in_disk(a, b)) values[static_cast<std::size_t>(a) * side + b] = f(lattice.coord(a), lattice.coord(b));
    }
  }
  return census_disk(lattice, values);
}

}  // namespace nodal
