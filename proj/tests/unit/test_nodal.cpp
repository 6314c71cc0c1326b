#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "nodal/error.hpp"
#include "nodal/nodal.hpp"
#include "nodal/rwm.hpp"
#include "nodal/specfn.hpp"
#include "nodal/stats.hpp"
#include "nodal/union_find.hpp"

using namespace nodal;

namespace {

RandomField single_mode(int n, std::vector<std::pair<int, double>> modes) {
  auto b = HarmonicBasis::build(n);
  std::vector<double> c(b->size(), 0.0);
  for (auto [k, a] : modes) c[b->index(k)] = a;
  return RandomField(b, c);
}

RandomField zonal(int n) { return single_mode(n, {{0, 1.0}}); }

// Colatitudes of the zeros of P_n(cos theta) in (0, pi), by sign scan and bisection.
std::vector<double> legendre_roots(int n) {
  std::vector<double> roots;
  const int steps = 200 * n;
  double a = 1e-9;
  double fa = specfn::legendre_p(n, std::cos(a));
  for (int i = 1; i <= steps; ++i) {
    double b = std::numbers::pi * i / steps;
    if (i == steps) b -= 1e-9;
    const double fb = specfn::legendre_p(n, std::cos(b));
    if ((fa < 0) != (fb < 0)) {
      double lo = a, hi = b;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((specfn::legendre_p(n, std::cos(mid)) < 0) == (fa < 0)) lo = mid; else hi = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

RandomField gaussian_field(int n, std::uint64_t seed) {
  return RandomField(HarmonicBasis::build(n), sample_coefficients(CoefficientDistribution::gaussian(), n, seed));
}

}  // namespace

TEST_CASE("union-find merges and counts sets") {
  UnionFind uf(10);
  CHECK(uf.set_count() == 10);
  CHECK(uf.unite(0, 1));
  CHECK(uf.unite(2, 3));
  CHECK_FALSE(uf.unite(1, 0));
  CHECK(uf.unite(1, 3));
  CHECK(uf.set_count() == 7);
  CHECK(uf.find(0) == uf.find(2));
  CHECK(uf.set_size(3) == 4);
  CHECK(uf.find(9) != uf.find(0));
}

TEST_CASE("sphere grid geometry and limits") {
  const SphereGrid g = build_sphere_grid(10, 8);
  CHECK(g.n_theta == 80);
  CHECK(g.n_phi == 160);
  CHECK(g.vertex_count() == 2 + 79u * 160u);
  CHECK(g.spacing_theta() == doctest::Approx(std::numbers::pi / 80));
  CHECK(g.spacing_phi() == doctest::Approx(2 * std::numbers::pi / 160));
  CHECK_THROWS_AS(build_sphere_grid(10, 3), ConfigurationError);
  CHECK_THROWS_AS(build_sphere_grid(0, 8), ConfigurationError);
  CHECK_THROWS_AS(build_sphere_grid(1000, 8, 1'000'000), ResourceError);
}

TEST_CASE("census refuses coarse grids unless overridden") {
  const RandomField f = gaussian_field(10, 1);
  CHECK_THROWS_AS(census_global(f, build_sphere_grid(10, 4)), ConfigurationError);
  CensusOptions o;
  o.allow_resolution_override = true;
  CHECK(census_global(f, build_sphere_grid(10, 4), o).count_total > 0);
  CHECK_THROWS_AS(census_global(f, build_sphere_grid(12, 8)), ConfigurationError);
}

TEST_CASE("zonal harmonic has n + 1 nodal domains") {
  for (int n : {1, 2, 5, 20, 50}) {
    const NodalCensus c = census_global(zonal(n), build_sphere_grid(n, 8));
    CHECK(c.count_total == n + 1);
    CHECK(c.count_positive + c.count_negative == c.count_total);
    CHECK(static_cast<std::size_t>(legendre_roots(n).size()) == static_cast<std::size_t>(n));
  }
}

TEST_CASE("every degree-one field has two nodal domains") {
  for (std::uint64_t s = 0; s < 20; ++s) CHECK(census_global(gaussian_field(1, s), build_sphere_grid(1, 8)).count_total == 2);
}

TEST_CASE("tesseral harmonics have (n-k-1) 2k + 2 (k+1) domains") {
  // N_n^k(cos theta) cos(k phi - alpha) has n - k + 1 latitude bands of 2k
  // sectors. The harmonic vanishes exactly at both poles; the tie-break
  // counts those vertices positive, which joins the k positive sectors of
  // each polar band into one domain.
  const double alpha = 0.3;
  for (auto [n, k] : {std::pair{10, 2}, std::pair{10, 4}, std::pair{9, 3}, std::pair{5, 5}, std::pair{8, 8}}) {
    const RandomField f = single_mode(n, {{k, std::cos(alpha)}, {-k, std::sin(alpha)}});
    const NodalCensus c = census_global(f, build_sphere_grid(n, 8));
    CAPTURE(n);
    CAPTURE(k);
    const int bands = n - k + 1;
    const int expected = bands == 1 ? k + 1 : (bands - 2) * 2 * k + 2 * (k + 1);
    CHECK(c.count_total == expected);
    CHECK(c.zero_ties == 2);
  }
}

TEST_CASE("census is invariant under f -> -f for generic fields") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const RandomField f = gaussian_field(15, s);
    std::vector<double> neg(f.coefficients().begin(), f.coefficients().end());
    for (double& v : neg) v = -v;
    const RandomField g(f.basis_ptr(), neg);
    const auto grid = build_sphere_grid(15, 8);
    const NodalCensus a = census_global(f, grid), b = census_global(g, grid);
    CHECK(a.count_total == b.count_total);
    CHECK(a.count_positive == b.count_negative);
  }
}

TEST_CASE("synthesizer and direct census agree") {
  const RandomField f = gaussian_field(25, 3);
  const SphereGrid grid = build_sphere_grid(25, 8);
  const SphereSynthesizer synth(25, grid);
  CHECK(census_global(f, grid).count_total == census_global(f, synth).count_total);
  std::vector<double> values;
  synth.synthesize(f.standard_coefficients(), values);
  REQUIRE(values.size() == grid.vertex_count());
  // Spot-check interior vertices against pointwise evaluation.
  const int row = 17, col = 55;
  const double v = values[1 + static_cast<std::size_t>(row - 1) * grid.n_phi + col];
  CHECK(v == doctest::Approx(f.value(SpherePoint{grid.theta(row), grid.phi(col)})).epsilon(1e-10));
}

TEST_CASE("refinement is stable at low degree and high oversampling") {
  int stable = 0;
  for (std::uint64_t s = 0; s < 20; ++s) stable += refinement_check(gaussian_field(5, s), 16).stable() ? 1 : 0;
  CHECK(stable >= 19);
}

TEST_CASE("Y_1,0 hemispheres have inner radius pi/2") {
  CensusOptions o;
  o.component_geometry = true;
  const NodalCensus c = census_global(zonal(1), build_sphere_grid(1, 64), o);
  REQUIRE(c.components.size() == 2);
  for (const ComponentInfo& ci : c.components) CHECK(ci.inner_radius == doctest::Approx(std::numbers::pi / 2).epsilon(0.02));
}

TEST_CASE("Crofton length of the equator is 2 pi") {
  CHECK(nodal_length_crofton(zonal(1), 500, 1) == doctest::Approx(2 * std::numbers::pi).epsilon(0.02));
}

TEST_CASE("Crofton length of a zonal harmonic is the sum of its latitude circles") {
  const int n = 10;
  double want = 0.0;
  for (double t : legendre_roots(n)) want += 2 * std::numbers::pi * std::sin(t);
  CHECK(nodal_length_crofton(zonal(n), 4000, 2) == doctest::Approx(want).epsilon(0.02));
}

TEST_CASE("mean nodal length matches the Kac-Rice value") {
  // E L = 2 pi sqrt(n (n+1) / 2) for the normalized Gaussian field.
  const int n = 20;
  std::vector<double> len;
  for (std::uint64_t s = 0; s < 40; ++s) len.push_back(nodal_length_crofton(gaussian_field(n, 100 + s), 200, s));
  CHECK(stats::mean(len) == doctest::Approx(2 * std::numbers::pi * std::sqrt(n * (n + 1) / 2.0)).epsilon(0.05));
}

TEST_CASE("disk census counts contained blobs") {
  const DiskLattice lat = make_disk_lattice(1.0, 0.02);
  CHECK(lat.spacing() <= 0.02);
  std::vector<double> v(static_cast<std::size_t>(lat.side()) * lat.side());
  for (int a = 0; a < lat.side(); ++a)
    for (int b = 0; b < lat.side(); ++b)
      v[a * lat.side() + b] = std::hypot(lat.coord(a) - 0.3, lat.coord(b)) < 0.2 || std::hypot(lat.coord(a) + 0.4, lat.coord(b)) < 0.1 ? 1.0 : -1.0;
  const NodalCensus c = census_disk(lat, v);
  CHECK(c.count_total == 3);
  CHECK(c.count_contained == 2);
  CHECK_THROWS_AS(census_disk(lat, std::span<const double>(v).first(10)), DimensionError);
}

TEST_CASE("zonal patch at the pole: contained domains match the Legendre roots") {
  const int n = 40;
  const double R = 10.0;
  int inside = 0;
  for (double t : legendre_roots(n)) {
    REQUIRE(std::abs(t - R / n) > 0.02);
    if (t < R / n) ++inside;
  }
  REQUIRE(inside == 3);
  const PatchSpec spec(SpherePoint::north_pole(), R, n);
  const NodalCensus c = census_patch(zonal(n), spec, build_patch_grid(R));
  CHECK(c.count_contained == inside);
  CHECK(c.count_total == inside + 1);
}

TEST_CASE("planar strips are never contained") {
  const double R = 10.0;
  const NodalCensus c = census_planar([](double x, double) { return std::cos(x); }, R, 8);
  // Zeros pi/2 + k pi inside (-10, 10): six lines, seven strips.
  CHECK(c.count_total == 7);
  CHECK(c.count_contained == 0);
}

TEST_CASE("checkerboard cells inside the disk are contained") {
  const double R = 10.0;
  const double h = std::numbers::pi / 2;
  int want = 0;
  for (int i = -8; i < 8; ++i) {
    for (int j = -8; j < 8; ++j) {
      // Cell [(2i+1)h, (2i+3)h] x [(2j+1)h, (2j+3)h].
      double far = 0.0;
      for (int di : {1, 3})
        for (int dj : {1, 3}) far = std::max(far, std::hypot((2 * i + di) * h, (2 * j + dj) * h));
      REQUIRE(std::abs(far - R) > 0.5);
      if (far < R) ++want;
    }
  }
  const NodalCensus c = census_planar([](double x, double y) { return std::cos(x) * std::cos(y); }, R, 8);
  CHECK(c.count_contained == want);
  CHECK(want == 21);
}
