#include "nodal/nodal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include "nodal/error.hpp"
#include "nodal/rng.hpp"
#include "nodal/union_find.hpp"

namespace nodal {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline int sign_of(double v) { return v <= -kZeroTolerance ? -1 : 1; }

// Adjacency is passed as visit(v, fn), which calls fn(u, edge_length) for
// every neighbour u of v.

// Multi-source Dijkstra from interpolated zero crossings, restricted to
// same-sign edges. Returns per-vertex distance to the nodal line.
template <class Visit>
std::vector<double> distance_to_nodal_line(std::size_t count, std::span<const double> values,
                                           std::span<const std::uint8_t> active, Visit&& visit) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(count, inf);
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::size_t v = 0; v < count; ++v) {
    if (!active[v]) continue;
    const double fv = values[v];
    const int sv = sign_of(fv);
    double best = inf;
    visit(v, [&](std::uint32_t u, double length) {
      if (!active[u] || sign_of(values[u]) == sv) return;
      const double fu = values[u];
      const double denom = fv - fu;
      const double t = denom != 0.0 ? std::clamp(fv / denom, 0.0, 1.0) : 0.5;
      best = std::min(best, t * length);
    });
    if (best < inf) {
      dist[v] = best;
      heap.emplace(best, static_cast<std::uint32_t>(v));
    }
  }
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    const int sv = sign_of(values[v]);
    visit(v, [&](std::uint32_t u, double length) {
      if (!active[u] || sign_of(values[u]) != sv) return;
      const double nd = d + length;
      if (nd < dist[u]) {
        dist[u] = nd;
        heap.emplace(nd, u);
      }
    });
  }
  return dist;
}

template <class Visit>
NodalCensus label(std::size_t count, std::span<const double> values, std::span<const std::uint8_t> active,
                  std::span<const std::uint8_t> ring, bool geometry, Visit&& visit) {
  UnionFind uf(count);
  NodalCensus census;
  for (std::size_t v = 0; v < count; ++v) {
    if (!active[v]) continue;
    if (std::abs(values[v]) < kZeroTolerance) ++census.zero_ties;
    const int sv = sign_of(values[v]);
    visit(v, [&](std::uint32_t u, double) {
      if (u > v && active[u] && sign_of(values[u]) == sv) uf.unite(v, u);
    });
  }

  std::vector<std::int32_t> slot(count, -1);
  std::vector<ComponentInfo> comps;
  for (std::size_t v = 0; v < count; ++v) {
    if (!active[v]) continue;
    const std::size_t r = uf.find(v);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::int32_t>(comps.size());
      ComponentInfo info;
      info.sign = sign_of(values[r]);
      comps.push_back(info);
    }
    ComponentInfo& info = comps[static_cast<std::size_t>(slot[r])];
    ++info.cells;
    if (!ring.empty() && ring[v]) info.touches_boundary = true;
  }

  if (geometry) {
    const std::vector<double> dist = distance_to_nodal_line(count, values, active, visit);
    for (std::size_t v = 0; v < count; ++v) {
      if (!active[v]) continue;
      ComponentInfo& info = comps[static_cast<std::size_t>(slot[uf.find(v)])];
      // A constant-sign field has no crossing and reports infinity.
      info.inner_radius = std::max(info.inner_radius, dist[v]);
    }
  }

  for (const ComponentInfo& c : comps) {
    ++census.count_total;
    if (c.sign > 0) {
      ++census.count_positive;
    } else {
      ++census.count_negative;
    }
  }
  if (!ring.empty()) {
    int contained = 0;
    for (const ComponentInfo& c : comps) contained += c.touches_boundary ? 0 : 1;
    census.count_contained = contained;
  }
  if (geometry) census.components = std::move(comps);
  return census;
}

}  // namespace

double SphereGrid::spacing_theta() const { return std::numbers::pi / n_theta; }
double SphereGrid::spacing_phi() const { return 2.0 * std::numbers::pi / n_phi; }
double SphereGrid::theta(int row) const { return row * spacing_theta(); }
double SphereGrid::phi(int col) const { return col * spacing_phi(); }

std::size_t SphereGrid::vertex_count() const {
  return 2 + static_cast<std::size_t>(n_theta - 1) * static_cast<std::size_t>(n_phi);
}

std::size_t SphereGrid::memory_bytes() const {
  // values (8) + union-find parent and size (8) + component slot (4) + flags (2)
  return vertex_count() * 22;
}

SphereGrid build_sphere_grid(int n, int q, std::size_t cell_budget) {
  if (n < 1) throw ConfigurationError("build_sphere_grid: degree must be >= 1");
  if (q < 4) throw ConfigurationError("build_sphere_grid: oversample q must be >= 4, got " + std::to_string(q));
  SphereGrid grid;
  grid.degree = n;
  grid.oversample = q;
  grid.n_theta = q * n;
  grid.n_phi = 2 * q * n;
  const double vertices = 2.0 + (static_cast<double>(grid.n_theta) - 1.0) * grid.n_phi;
  if (vertices > static_cast<double>(cell_budget) ||
      vertices > static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
    throw ResourceError("build_sphere_grid: " + std::to_string(static_cast<std::size_t>(vertices)) +
                        " vertices exceed the cell budget " + std::to_string(cell_budget));
  }
  return grid;
}

SphereSynthesizer::SphereSynthesizer(int degree, const SphereGrid& grid) : degree_(degree), grid_(grid) {
  if (degree < 1) throw UnsupportedDegreeError("SphereSynthesizer: degree must be >= 1");
  const int n = degree;
  const std::size_t stride = static_cast<std::size_t>(n) + 1;
  const int rows = grid.n_theta - 1;
  std::vector<double> xs(static_cast<std::size_t>(rows));
  std::vector<double> ss(static_cast<std::size_t>(rows));
  for (int i = 0; i < rows; ++i) {
    const double t = grid.theta(i + 1);
    xs[static_cast<std::size_t>(i)] = std::cos(t);
    ss[static_cast<std::size_t>(i)] = std::sin(t);
  }
  rows_.resize(static_cast<std::size_t>(rows) * stride);
  specfn::AssocLegendreTable(n).evaluate_many(xs, ss, rows_);
  for (int i = 0; i < rows; ++i) {
    for (int k = 1; k <= n; ++k) rows_[static_cast<std::size_t>(i) * stride + k] *= std::numbers::sqrt2;
  }

  const std::size_t width = 2 * static_cast<std::size_t>(n) + 1;
  const std::size_t cols = static_cast<std::size_t>(grid.n_phi);
  trig_.assign(width * cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    trig_[static_cast<std::size_t>(n) * cols + j] = 1.0;
    for (int k = 1; k <= n; ++k) {
      // Exact reduction of k j mod n_phi keeps the table free of drift.
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((static_cast<std::size_t>(k) * j) % cols) /
                           static_cast<double>(cols);
      trig_[static_cast<std::size_t>(n + k) * cols + j] = std::cos(angle);
      trig_[static_cast<std::size_t>(n - k) * cols + j] = std::sin(angle);
    }
  }
}

void SphereSynthesizer::synthesize(std::span<const double> c, std::vector<double>& out) const {
  const int n = degree_;
  const std::size_t width = 2 * static_cast<std::size_t>(n) + 1;
  if (c.size() != width) throw DimensionError("SphereSynthesizer: wrong coefficient count");
  const std::size_t stride = static_cast<std::size_t>(n) + 1;
  const Eigen::Index rows = grid_.n_theta - 1;
  const Eigen::Index cols = grid_.n_phi;

  RowMatrix a(rows, static_cast<Eigen::Index>(width));
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double* leg = rows_.data() + static_cast<std::size_t>(i) * stride;
    for (int k = -n; k <= n; ++k) {
      a(i, k + n) = c[static_cast<std::size_t>(k + n)] * leg[std::abs(k)];
    }
  }
  Eigen::Map<const RowMatrix> trig(trig_.data(), static_cast<Eigen::Index>(width), cols);

  out.resize(grid_.vertex_count());
  const double pole = c[static_cast<std::size_t>(n)] * std::sqrt(2.0 * n + 1.0);
  out.front() = pole;
  out.back() = (n % 2 == 0) ? pole : -pole;
  Eigen::Map<RowMatrix> body(out.data() + 1, rows, cols);
  body.noalias() = a * trig;
}

NodalCensus label_sphere_grid(const SphereGrid& grid, std::span<const double> values, bool geometry) {
  const std::size_t count = grid.vertex_count();
  if (values.size() != count) throw DimensionError("label_sphere_grid: value count does not match grid");
  const std::uint32_t n_phi = static_cast<std::uint32_t>(grid.n_phi);
  const std::uint32_t rows = static_cast<std::uint32_t>(grid.n_theta - 1);
  const std::uint32_t south = static_cast<std::uint32_t>(count - 1);
  const double ht = grid.spacing_theta();
  const double hp = grid.spacing_phi();
  std::vector<double> row_width(rows);
  for (std::uint32_t i = 0; i < rows; ++i) row_width[i] = std::sin(grid.theta(static_cast<int>(i) + 1)) * hp;

  auto visit = [&](std::size_t v, auto&& fn) {
    if (v == 0) {
      for (std::uint32_t j = 0; j < n_phi; ++j) fn(1 + j, ht);
      return;
    }
    if (v == south) {
      const std::uint32_t base = 1 + (rows - 1) * n_phi;
      for (std::uint32_t j = 0; j < n_phi; ++j) fn(base + j, ht);
      return;
    }
    const std::uint32_t w = static_cast<std::uint32_t>(v - 1);
    const std::uint32_t i = w / n_phi;
    const std::uint32_t j = w % n_phi;
    const std::uint32_t base = 1 + i * n_phi;
    fn(base + (j + 1) % n_phi, row_width[i]);
    fn(base + (j + n_phi - 1) % n_phi, row_width[i]);
    fn(i == 0 ? 0u : base - n_phi + j, ht);
    fn(i + 1 == rows ? south : base + n_phi + j, ht);
  };

  std::vector<std::uint8_t> active(count, 1);
  return label(count, values, active, {}, geometry, visit);
}

NodalCensus census_global(const RandomField& field, const SphereSynthesizer& synth, const CensusOptions& options) {
  if (synth.degree() != field.degree()) {
    throw ConfigurationError("census_global: synthesizer degree does not match the field");
  }
  const SphereGrid& grid = synth.grid();
  if (!options.allow_resolution_override &&
      (grid.oversample < kMinCensusOversample || grid.n_theta < kMinCensusOversample * field.degree())) {
    throw ConfigurationError("census_global: grid oversample " + std::to_string(grid.oversample) +
                             " is below " + std::to_string(kMinCensusOversample) +
                             " for degree " + std::to_string(field.degree()));
  }
  std::vector<double> values;
  synth.synthesize(field.standard_coefficients(), values);
  return label_sphere_grid(grid, values, options.component_geometry);
}

NodalCensus census_global(const RandomField& field, const SphereGrid& grid, const CensusOptions& options) {
  if (grid.degree != field.degree() && !options.allow_resolution_override) {
    throw ConfigurationError("census_global: grid built for degree " + std::to_string(grid.degree) +
                             ", field has degree " + std::to_string(field.degree()));
  }
  return census_global(field, SphereSynthesizer(field.degree(), grid), options);
}

bool DiskLattice::in_disk(int a, int b) const {
  if (a < 0 || b < 0 || a >= side() || b >= side()) return false;
  const double y1 = coord(a);
  const double y2 = coord(b);
  return y1 * y1 + y2 * y2 <= half_width * half_width * (1.0 + 1e-12);
}

DiskLattice make_disk_lattice(double half_width, double max_spacing) {
  if (!(half_width > 0.0) || !(max_spacing > 0.0)) {
    throw ConfigurationError("make_disk_lattice: half-width and spacing must be positive");
  }
  DiskLattice lattice;
  lattice.half_width = half_width;
  const double cells = std::ceil(half_width / max_spacing - 1e-9);
  if (cells > 20000.0) throw ResourceError("make_disk_lattice: lattice too fine");
  lattice.half_cells = std::max(1, static_cast<int>(cells));
  return lattice;
}

NodalCensus census_disk(const DiskLattice& lattice, std::span<const double> values, bool geometry) {
  const int side = lattice.side();
  const std::size_t count = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
  if (values.size() != count) throw DimensionError("census_disk: value count does not match lattice");
  std::vector<std::uint8_t> active(count, 0);
  std::vector<std::uint8_t> ring(count, 0);
  for (int a = 0; a < side; ++a) {
    for (int b = 0; b < side; ++b) {
      if (!lattice.in_disk(a, b)) continue;
      const std::size_t v = static_cast<std::size_t>(a) * side + b;
      active[v] = 1;
      ring[v] = (!lattice.in_disk(a + 1, b) || !lattice.in_disk(a - 1, b) || !lattice.in_disk(a, b + 1) ||
                 !lattice.in_disk(a, b - 1))
                    ? 1
                    : 0;
    }
  }
  const double h = lattice.spacing();
  const std::uint32_t s = static_cast<std::uint32_t>(side);
  auto visit = [&](std::size_t v, auto&& fn) {
    const std::uint32_t a = static_cast<std::uint32_t>(v / s);
    const std::uint32_t b = static_cast<std::uint32_t>(v % s);
    if (a + 1 < s) fn(static_cast<std::uint32_t>(v + s), h);
    if (a > 0) fn(static_cast<std::uint32_t>(v - s), h);
    if (b + 1 < s) fn(static_cast<std::uint32_t>(v + 1), h);
    if (b > 0) fn(static_cast<std::uint32_t>(v - 1), h);
  };
  return label(count, values, active, ring, geometry, visit);
}

PatchGrid build_patch_grid(double scale, int q, double half_width) {
  if (!(scale > 0.0)) throw ConfigurationError("build_patch_grid: R must be positive");
  if (q < 4) throw ConfigurationError("build_patch_grid: oversample q must be >= 4");
  PatchGrid grid;
  grid.scale = scale;
  grid.oversample = q;
  grid.lattice = make_disk_lattice(half_width, std::numbers::pi / (q * scale));
  return grid;
}

NodalCensus census_patch(const RandomField& field, const PatchSpec& spec, const PatchGrid& grid,
                         const CensusOptions& options) {
  if (field.degree() != spec.degree()) throw ConfigurationError("census_patch: field and patch degree differ");
  if (grid.lattice.half_width > 2.0) throw ConfigurationError("census_patch: half-width exceeds 2");
  const double required = std::numbers::pi / (kMinCensusOversample * spec.scale());
  if (!options.allow_resolution_override && grid.lattice.spacing() > required * (1.0 + 1e-12)) {
    throw ConfigurationError("census_patch: lattice spacing too coarse for R = " + std::to_string(spec.scale()));
  }
  const DiskLattice& lat = grid.lattice;
  const int side = lat.side();
  std::vector<Vec3> points;
  std::vector<std::size_t> where;
  points.reserve(static_cast<std::size_t>(side) * side);
  for (int a = 0; a < side; ++a) {
    for (int b = 0; b < side; ++b) {
      if (!lat.in_disk(a, b)) continue;
      points.push_back(spec.map(lat.coord(a), lat.coord(b)));
      where.push_back(static_cast<std::size_t>(a) * side + b);
    }
  }
  std::vector<double> vals(points.size());
  field.values(points, vals);
  std::vector<double> values(static_cast<std::size_t>(side) * side, 0.0);
  for (std::size_t i = 0; i < where.size(); ++i) values[where[i]] = vals[i];
  return census_disk(lat, values, options.component_geometry);
}

double nodal_length_crofton(const RandomField& field, int n_circles, std::uint64_t seed, int samples_per_degree) {
  if (n_circles < 100) throw ConfigurationError("nodal_length_crofton: need at least 100 circles");
  if (samples_per_degree < 4) throw ConfigurationError("nodal_length_crofton: too few samples per degree");
  const int samples = std::max(64, samples_per_degree * field.degree());
  std::vector<Vec3> points(static_cast<std::size_t>(samples));
  std::vector<double> values(static_cast<std::size_t>(samples));
  std::uint64_t crossings = 0;
  for (int c = 0; c < n_circles; ++c) {
    rng::CounterStream stream(rng::combine(seed, static_cast<std::uint64_t>(c)));
    const double u1 = stream.uniform();
    const double u2 = stream.uniform();
    const double offset = stream.uniform() * 2.0 * std::numbers::pi / samples;
    const Vec3 normal = to_cartesian(uniform_sphere_point(u1, u2));
    // Any unit vector not parallel to the normal seeds the circle's frame.
    const Vec3 seed_axis = std::abs(normal.z) < 0.9 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
    Vec3 e1 = cross(normal, seed_axis);
    const double l1 = norm(e1);
    e1 = {e1.x / l1, e1.y / l1, e1.z / l1};
    const Vec3 e2 = cross(normal, e1);
    for (int s = 0; s < samples; ++s) {
      const double t = offset + 2.0 * std::numbers::pi * s / samples;
      const double ct = std::cos(t);
      const double st = std::sin(t);
      points[static_cast<std::size_t>(s)] = {ct * e1.x + st * e2.x, ct * e1.y + st * e2.y, ct * e1.z + st * e2.z};
    }
    field.values(points, values);
    for (int s = 0; s < samples; ++s) {
      const int a = sign_of(values[static_cast<std::size_t>(s)]);
      const int b = sign_of(values[static_cast<std::size_t>((s + 1) % samples)]);
      if (a != b) ++crossings;
    }
  }
  return std::numbers::pi * static_cast<double>(crossings) / n_circles;
}

RefinementCheck refinement_check(const RandomField& field, int q) {
  const int n = field.degree();
  CensusOptions options;
  options.allow_resolution_override = true;
  RefinementCheck out;
  out.coarse = census_global(field, build_sphere_grid(n, q), options).count_total;
  out.fine = census_global(field, build_sphere_grid(n, 2 * q), options).count_total;
  return out;
}

}  // namespace nodal
