#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "nodal/error.hpp"
#include "nodal/rng.hpp"
#include "nodal/stats.hpp"

using namespace nodal;
using namespace nodal::stats;

TEST_CASE("moments") {
  const std::vector<double> x{1, 2, 3, 4, 10};
  CHECK(mean(x) == 4.0);
  CHECK(variance(x) == doctest::Approx(12.5));
  CHECK(standard_error(x) == doctest::Approx(std::sqrt(12.5 / 5)));
  CHECK_THROWS_AS(variance(std::vector<double>{1.0}), StatisticsError);
}

TEST_CASE("normal distribution helpers") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(normal_cdf(-3.0) == doctest::Approx(0.0013498980316301).epsilon(1e-10));
  CHECK(normal_two_sided_quantile(0.95) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK(normal_two_sided_quantile(0.99) == doctest::Approx(2.5758293035489).epsilon(1e-10));
}

TEST_CASE("one-sample KS distance") {
  CHECK(ks_normal({0.0}) == doctest::Approx(0.5));
  // At the midpoint quantiles the empirical CDF misses Phi by exactly 1/(2N).
  std::vector<double> q;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    const double p = (i + 0.5) / n;
    double lo = -10, hi = 10;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    q.push_back(0.5 * (lo + hi));
  }
  CHECK(ks_normal(q) == doctest::Approx(0.5 / n).epsilon(1e-6));
}

TEST_CASE("two-sample KS distance") {
  CHECK(ks_two_sample({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_two_sample({1, 2}, {5, 6, 7}) == 1.0);
  CHECK(ks_two_sample({1, 2, 3}, {2.5}) == doctest::Approx(2.0 / 3));
  // Ties across samples are handled as one jump.
  CHECK(ks_two_sample({-1, -1, 1, 1}, {-1, 1}) == 0.0);
}

TEST_CASE("percentile interval order statistics and negation symmetry") {
  std::vector<double> r(1000);
  std::iota(r.begin(), r.end(), 0.0);
  const Interval ci = percentile_interval(r, 0.95);
  CHECK(ci.low == 25.0);
  CHECK(ci.high == 974.0);
  for (double& v : r) v = -v;
  const Interval neg = percentile_interval(r, 0.95);
  CHECK(neg.low == -ci.high);
  CHECK(neg.high == -ci.low);
}

TEST_CASE("bootstrap difference is antisymmetric under arm swap") {
  rng::CounterStream s(1);
  std::vector<double> a, b;
  for (int i = 0; i < 300; ++i) a.push_back(s.normal());
  for (int i = 0; i < 250; ++i) b.push_back(0.2 + s.normal());
  const auto ab = bootstrap_mean_difference(a, b, 2000, 11, 22);
  const auto ba = bootstrap_mean_difference(b, a, 2000, 22, 11);
  REQUIRE(ab.size() == ba.size());
  for (std::size_t i = 0; i < ab.size(); ++i) CHECK(ab[i] == -ba[i]);
  const Interval ci = percentile_interval(ab, 0.95);
  // The bootstrap spread matches the analytic standard error of the difference.
  const double se = std::sqrt(variance(a) / a.size() + variance(b) / b.size());
  CHECK((ci.high - ci.low) / (2 * 1.96) == doctest::Approx(se).epsilon(0.1));
}

TEST_CASE("Welch statistic") {
  const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8, 10};
  const WelchResult w = welch(a, b);
  const double va = 5.0 / 3 / 4, vb = 10.0 / 5;
  CHECK(w.se == doctest::Approx(std::sqrt(va + vb)));
  CHECK(w.t == doctest::Approx(-3.5 / std::sqrt(va + vb)));
  CHECK(w.dof == doctest::Approx((va + vb) * (va + vb) / (va * va / 3 + vb * vb / 4)));
}

TEST_CASE("weighted fits recover exact polynomials") {
  const std::vector<double> x{0.0125, 0.01667, 0.025, 0.05}, w{1, 2, 3, 4};
  std::vector<double> y1, y2;
  for (double v : x) {
    y1.push_back(0.057 + 0.9 * v);
    y2.push_back(0.0044 - 0.03 * v + 0.2 * v * v);
  }
  const LinearFit lf = weighted_linear_fit(x, y1, w);
  CHECK(lf.intercept == doctest::Approx(0.057).epsilon(1e-10));
  CHECK(lf.slope == doctest::Approx(0.9).epsilon(1e-10));
  CHECK(lf.chi2 == doctest::Approx(0.0).scale(1.0));
  const PolynomialFit pf = weighted_polynomial_fit(x, y2, w, 2);
  CHECK(pf.coeffs[0] == doctest::Approx(0.0044).epsilon(1e-8));
  CHECK(pf.coeffs[1] == doctest::Approx(-0.03).epsilon(1e-6));
  CHECK(pf.coeffs[2] == doctest::Approx(0.2).epsilon(1e-5));
  CHECK(pf.dof == 1);
  const PolynomialFit p1 = weighted_polynomial_fit(x, y1, w, 1);
  CHECK(p1.coeffs[0] == doctest::Approx(lf.intercept));
  CHECK(p1.coeff_se.size() == 2);
  CHECK_THROWS_AS(weighted_polynomial_fit(std::vector<double>{1, 2}, std::vector<double>{1, 2}, std::vector<double>{1, 1}, 2), StatisticsError);
  CHECK_THROWS_AS(weighted_linear_fit(std::vector<double>{1, 1}, std::vector<double>{1, 2}, std::vector<double>{1, 1}), StatisticsError);
}

TEST_CASE("linear fit standard errors match the weighted design") {
  // With weights 1/sigma^2 the intercept variance is S_xx / (S S_xx - S_x^2).
  const std::vector<double> x{1, 2, 3, 4}, y{1.1, 1.9, 3.2, 3.9}, w{4, 4, 4, 4};
  const LinearFit f = weighted_linear_fit(x, y, w);
  const double S = 16, Sx = 40, Sxx = 120;
  CHECK(f.intercept_se == doctest::Approx(std::sqrt(Sxx / (S * Sxx - Sx * Sx))));
  CHECK(f.slope_se == doctest::Approx(std::sqrt(S / (S * Sxx - Sx * Sx))));
}

TEST_CASE("sign test p-values") {
  CHECK(sign_test_p(4, 4) == doctest::Approx(0.125));
  CHECK(sign_test_p(0, 4) == doctest::Approx(0.125));
  CHECK(sign_test_p(2, 4) == doctest::Approx(1.0));
  CHECK(sign_test_p(0, 10) == doctest::Approx(2.0 / 1024));
}
