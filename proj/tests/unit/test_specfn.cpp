#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "nodal/error.hpp"
#include "nodal/rng.hpp"
#include "nodal/specfn.hpp"

using namespace nodal;
using namespace nodal::specfn;

namespace {

// Coefficients of P_n in powers of x from the explicit sum
// P_n(x) = 2^-n sum_j (-1)^j C(n,j) C(2n-2j,n) x^{n-2j}.
std::vector<long double> legendre_coeffs(int n) {
  auto binom = [](int a, int b) {
    long double r = 1.0L;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  std::vector<long double> c(n + 1, 0.0L);
  for (int j = 0; 2 * j <= n; ++j) {
    c[n - 2 * j] = ((j % 2) ? -1.0L : 1.0L) * binom(n, j) * binom(2 * n - 2 * j, n) / std::pow(2.0L, n);
  }
  return c;
}

long double horner(const std::vector<long double>& c, long double x) {
  long double y = 0.0L;
  for (std::size_t i = c.size(); i-- > 0;) y = y * x + c[i];
  return y;
}

std::vector<long double> differentiate(std::vector<long double> c, int times) {
  for (int t = 0; t < times; ++t) {
    if (c.size() <= 1) return {0.0L};
    std::vector<long double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<long double>(i);
    c = std::move(d);
  }
  return c;
}

// N_n^k from the derivative definition, all in long double.
long double assoc_oracle(int n, int k, long double x) {
  long double ratio = 1.0L;  // (n-k)! / (n+k)!
  for (int i = n - k + 1; i <= n + k; ++i) ratio /= i;
  return std::sqrt((2 * n + 1) * ratio) * std::pow(1.0L - x * x, k / 2.0L) * horner(differentiate(legendre_coeffs(n), k), x);
}

// Bessel's integral J_m(t) = (1/2pi) int_0^{2pi} cos(m phi - t sin phi) dphi by
// the trapezoid rule with enough nodes to resolve the integrand. For a periodic
// analytic integrand the error is ~J_N(t), negligible once N > t + 40.
double bessel_oracle(int m, double t) {
  const int nodes = 2 * static_cast<int>(std::abs(t)) + 128;
  long double sum = 0.0L;
  for (int j = 0; j < nodes; ++j) {
    const long double phi = 2.0L * std::numbers::pi_v<long double> * j / nodes;
    sum += std::cos(m * phi - static_cast<long double>(t) * std::sin(phi));
  }
  return static_cast<double>(sum / nodes);
}

double envelope(int n, HilbPrefactor kind) {
  double worst = 0.0;
  const double lo = 10.0 / n;
  const double hi = std::numbers::pi / 2;
  for (int i = 0; i <= 4000; ++i) {
    const double theta = lo + (hi - lo) * i / 4000.0;
    worst = std::max(worst, std::abs(hilb_residual(n, theta, kind)) / (std::sqrt(theta) * std::pow(n, -1.5)));
  }
  return worst;
}

}  // namespace

TEST_CASE("legendre_p matches the explicit polynomial") {
  for (int n : {0, 1, 2, 3, 7, 12, 20}) {
    const auto c = legendre_coeffs(n);
    for (double x : {-1.0, -0.83, -0.3, 0.0, 0.11, 0.5, 0.97, 1.0}) {
      CHECK(legendre_p(n, x) == doctest::Approx(static_cast<double>(horner(c, x))).epsilon(1e-12));
    }
  }
}

TEST_CASE("legendre_p endpoint values") {
  for (int n = 0; n <= 200; ++n) {
    CHECK(std::abs(legendre_p(n, 1.0) - 1.0) < 1e-12);
    CHECK(std::abs(legendre_p(n, -1.0) - ((n % 2) ? -1.0 : 1.0)) < 1e-12);
  }
}

TEST_CASE("legendre_p_all is consistent with legendre_p") {
  std::vector<double> all(61);
  legendre_p_all(60, 0.37, all);
  for (int l = 0; l <= 60; ++l) CHECK(all[l] == doctest::Approx(legendre_p(l, 0.37)).epsilon(1e-13));
}

TEST_CASE("legendre_p rejects abscissae outside [-1, 1]") {
  CHECK_THROWS_AS(legendre_p(3, 1.0001), DomainError);
  CHECK_THROWS_AS(legendre_p(3, std::nan("")), DomainError);
  CHECK_THROWS_AS(legendre_p(-1, 0.2), DomainError);
}

TEST_CASE("normalized associated Legendre matches the derivative definition") {
  for (int n : {1, 2, 5, 9, 14}) {
    for (int k = 0; k <= n; ++k) {
      for (double x : {-0.9, -0.4, 0.05, 0.6, 0.99}) {
        const double want = static_cast<double>(assoc_oracle(n, k, x));
        CHECK(assoc_legendre_norm(n, k, x) == doctest::Approx(want).epsilon(1e-10).scale(1.0));
      }
    }
  }
  CHECK_THROWS_AS(assoc_legendre_norm(4, 5, 0.1), DomainError);
}

TEST_CASE("table rows are orthonormal against dx/2") {
  const int n = 30;
  const AssocLegendreTable table(n);
  const auto rule = gauss_legendre(n + 2);
  std::vector<double> row(n + 1);
  std::vector<std::vector<double>> values;
  for (double x : rule.nodes) {
    table.evaluate(x, std::sqrt(1 - x * x), row);
    values.push_back(row);
  }
  // Same order k, degrees n: the integral of (N_n^k)^2 dx/2 is 1.
  for (int k = 0; k <= n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += 0.5 * rule.weights[i] * values[i][k] * values[i][k];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-11));
  }
}

TEST_CASE("table satisfies the pointwise sum rule at high degree") {
  for (int n : {50, 200, 1000}) {
    const AssocLegendreTable table(n);
    std::vector<double> row(n + 1);
    for (double x : {-0.7, 0.0, 0.3, 0.999}) {
      table.evaluate(x, std::sqrt(1 - x * x), row);
      double s = row[0] * row[0];
      for (int k = 1; k <= n; ++k) s += 2.0 * row[k] * row[k];
      CHECK(s == doctest::Approx(2.0 * n + 1).epsilon(1e-10));
      CHECK(std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); }));
    }
  }
}

TEST_CASE("table derivative agrees with central differences") {
  const int n = 12;
  const AssocLegendreTable table(n);
  std::vector<double> v(n + 1), d(n + 1), vp(n + 1), vm(n + 1);
  const double theta = 1.1;
  const double h = 1e-6;
  table.evaluate_with_derivative(std::cos(theta), std::sin(theta), v, d);
  table.evaluate(std::cos(theta + h), std::sin(theta + h), vp);
  table.evaluate(std::cos(theta - h), std::sin(theta - h), vm);
  for (int k = 0; k <= n; ++k) CHECK(d[k] == doctest::Approx((vp[k] - vm[k]) / (2 * h)).epsilon(1e-6).scale(1.0));
}

TEST_CASE("evaluate_many equals repeated evaluate") {
  const int n = 40;
  const AssocLegendreTable table(n);
  std::vector<double> xs, ss;
  rng::CounterStream stream(5);
  for (int i = 0; i < 37; ++i) {
    const double x = 2 * stream.uniform() - 1;
    xs.push_back(x);
    ss.push_back(std::sqrt(1 - x * x));
  }
  std::vector<double> many(xs.size() * (n + 1)), one(n + 1);
  table.evaluate_many(xs, ss, many);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    table.evaluate(xs[i], ss[i], one);
    for (int k = 0; k <= n; ++k) CHECK(many[i * (n + 1) + k] == doctest::Approx(one[k]).epsilon(1e-14).scale(1.0));
  }
}

TEST_CASE("Bessel J0 and J1 match the integral representation") {
  double worst = 0.0;
  for (double t = 0.0; t <= 1000.0; t += (t < 40 ? 0.173 : 3.91)) {
    worst = std::max(worst, std::abs(bessel_j0(t) - bessel_oracle(0, t)));
    worst = std::max(worst, std::abs(bessel_j1(t) - bessel_oracle(1, t)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("Bessel values and symmetries") {
  CHECK(bessel_j0(0.0) == 1.0);
  CHECK(bessel_j1(0.0) == 0.0);
  CHECK(std::abs(bessel_j0(kBesselJ0FirstZero)) < 1e-13);
  for (double t : {0.4, 7.9, 8.1, 24.9, 25.1, 300.0}) {
    CHECK(bessel_j0(-t) == bessel_j0(t));
    CHECK(bessel_j1(-t) == -bessel_j1(t));
    // J0' = -J1, checked across the branch boundaries at 8 and 25.
    const double h = 1e-5;
    CHECK((bessel_j0(t + h) - bessel_j0(t - h)) / (2 * h) == doctest::Approx(-bessel_j1(t)).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("Hilb residual has the Taylor limit -1/48") {
  // P_n(cos t) - sqrt(t / sin t) J0((n+1/2) t) = -t^2/48 + O(n^4 t^4).
  for (int n : {5, 20, 50}) {
    const double theta = 1e-3 / n;
    CHECK(hilb_residual(n, theta) / (theta * theta) == doctest::Approx(-1.0 / 48).epsilon(1e-3));
  }
}

TEST_CASE("square-root Hilb prefactor gives an n-flat envelope") {
  const double e50 = envelope(50, HilbPrefactor::SquareRoot);
  const double e100 = envelope(100, HilbPrefactor::SquareRoot);
  const double e200 = envelope(200, HilbPrefactor::SquareRoot);
  const double hi = std::max({e50, e100, e200});
  const double lo = std::min({e50, e100, e200});
  CHECK(hi / lo < 3.0);
  // The plain theta/sin(theta) prefactor leaves an O(theta^2 n) term and its
  // envelope grows with n.
  CHECK(envelope(200, HilbPrefactor::Linear) / envelope(50, HilbPrefactor::Linear) > 3.0);
  CHECK(kDefaultHilbPrefactor == HilbPrefactor::SquareRoot);
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  for (int order : {1, 4, 17, 64}) {
    const auto rule = gauss_legendre(order);
    REQUIRE(rule.nodes.size() == static_cast<std::size_t>(order));
    CHECK(std::is_sorted(rule.nodes.begin(), rule.nodes.end()));
    for (int p = 0; p <= 2 * order - 1; p += 1) {
      double s = 0.0;
      for (int i = 0; i < order; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], p);
      const double want = (p % 2) ? 0.0 : 2.0 / (p + 1);
      CHECK(s == doctest::Approx(want).epsilon(1e-13).scale(1.0));
    }
  }
}
