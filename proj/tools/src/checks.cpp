#include "nodal_cli/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nodal::cli {

namespace {

Check below(std::string name, double value, double bound, bool strict = true) {
  return {std::move(name), strict ? value < bound : value <= bound, value, {bound}, strict ? "<" : "<="};
}

Check above(std::string name, double value, double bound, bool strict = true) {
  return {std::move(name), strict ? value > bound : value >= bound, value, {bound}, strict ? ">" : ">="};
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

}  // namespace

bool all_pass(std::span<const Check> checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::vector<Check> cns_checks(const CnsEstimate& est) {
  const double x = est.normalized();
  const double factor = x > 0.0 ? std::max(x / kPercolationValue, kPercolationValue / x)
                                : std::numeric_limits<double>::infinity();
  return {
      {"normalized_within_bounds", x > kCnsLowerBound && x < kCnsPleijelBound, x,
       {kCnsLowerBound, kCnsPleijelBound}, "in"},
      below("normalized_factor_from_percolation_value", factor, 2.0, false),
      above("residual_sign_test_p", est.residual_sign_p, 0.05),
  };
}

std::vector<Check> universality_checks(const UniversalityReport& rep) {
  return {{"zero_in_difference_ci", rep.ci.contains(0.0), rep.difference, {rep.ci.low, rep.ci.high}, "contains 0"}};
}

std::vector<Check> clt_checks(std::span<const KsPoint> points, bool gaussian) {
  std::vector<Check> out;
  if (points.empty()) return out;
  if (gaussian) {
    for (const KsPoint& p : points) out.push_back(below("ks_n" + std::to_string(p.degree), p.ks, 0.03));
    return out;
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < points.size(); ++i) worst = std::max(worst, points[i].ks - points[i - 1].ks);
  if (points.size() > 1) out.push_back(below("ks_strictly_decreasing", worst, 0.0));
  out.push_back(below("ks_n" + std::to_string(points.back().degree), points.back().ks, 0.05));
  return out;
}

std::vector<Check> covariance_checks(std::span<const CovariancePoint> points) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double slack = 3.0 * std::hypot(points[i].se_at_max, points[i - 1].se_at_max);
    worst = std::max(worst, points[i].max_deviation - points[i - 1].max_deviation - slack);
  }
  if (points.size() < 2) return {};
  return {below("max_deviation_nonincreasing_excess", worst, 0.0, false)};
}

std::vector<Check> l4_checks(std::span<const L4Report> reports) {
  std::vector<Check> out;
  if (reports.empty()) return out;
  double max_ratio = 0.0;
  double min_l4 = std::numeric_limits<double>::infinity();
  for (const L4Report& r : reports) {
    max_ratio = std::max(max_ratio, r.ratio);
    min_l4 = std::min(min_l4, r.max_l4);
  }
  out.push_back(below("ratio_growth_over_first_degree", max_ratio / reports.front().ratio, 3.0, false));
  out.push_back(above("max_l4_at_least_one", min_l4, 1.0, false));
  return out;
}

std::vector<Check> badset_checks(std::span<const BadSetReport> reports) {
  if (reports.size() < 2) return {};
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < reports.size(); ++i) {
    worst = std::max(worst, reports[i].fraction_values - reports[i - 1].fraction_values);
  }
  return {below("fraction_strictly_decreasing", worst, 0.0)};
}

std::vector<Check> local_sup_checks(std::span<const LocalSupSweep> sweeps) {
  std::vector<double> m;
  for (const LocalSupSweep& s : sweeps) m.push_back(s.max_ratio);
  if (m.empty()) return {};
  return {below("max_ratio_spread_across_degrees", spread(m), 3.0, false)};
}

std::vector<Check> semilocal_checks(std::span<const SemilocalReport> reports) {
  std::vector<double> r;
  for (const SemilocalReport& s : reports) r.push_back(s.ratio);
  if (r.empty()) return {};
  return {below("ratio_spread_across_radii", spread(r), 3.0, false)};
}

std::vector<Check> inner_radius_checks(std::span<const InnerRadiusReport> reports) {
  std::vector<double> m;
  for (const InnerRadiusReport& r : reports) m.push_back(r.min_scaled);
  if (m.empty()) return {};
  return {
      above("min_scaled_inner_radius", *std::min_element(m.begin(), m.end()), 0.5, false),
      below("min_scaled_spread_across_degrees", spread(m), 3.0, false),
  };
}

std::vector<Check> rwm_checks(const RwmEstimate& est) {
  // Densities follow one direction; a step against it must stay within 3 SE.
  const auto& p = est.per_radius;
  if (p.size() < 2) return {};
  const double dir = p.back().mean_density >= p.front().mean_density ? 1.0 : -1.0;
  double worst = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double back = -dir * (p[i].mean_density - p[i - 1].mean_density);
    const double err = 3.0 * std::hypot(p[i].se, p[i - 1].se);
    worst = std::max(worst, err > 0.0 ? back / err : (back > 0.0 ? std::numeric_limits<double>::infinity() : 0.0));
  }
  return {below("reversal_in_units_of_3se", worst, 1.0, false)};
}

namespace {

bool support_is(const PoleSample& s, std::initializer_list<double> values) {
  if (s.support.size() != values.size()) return false;
  std::size_t i = 0;
  for (double v : values) {
    if (s.support[i].value != v || s.support[i].frequency <= 0) return false;
    ++i;
  }
  return true;
}

}  // namespace

std::vector<Check> demo_checks(const BasisDemoReport& rep, bool rademacher) {
  if (!rademacher) return {below("ks_between_bases", rep.ks_between, 0.03)};
  const double r2 = std::numbers::sqrt2;
  const bool standard = support_is(rep.standard, {-1.0, 1.0});
  const bool rotated = support_is(rep.rotated, {-r2, 0.0, r2});
  return {
      {"standard_support_exactly_pm1", standard, static_cast<double>(rep.standard.support.size()), {2.0}, "=="},
      {"rotated_support_exactly_0_pm_sqrt2", rotated, static_cast<double>(rep.rotated.support.size()), {3.0}, "=="},
  };
}

Check planar_spherical_agreement(const CnsEstimate& sphere, const RwmEstimate& plane) {
  const stats::Interval s = sphere.normalized_ci();
  const double hw_s = 0.5 * (s.high - s.low);
  const double hw_p = 0.5 * (plane.ci.high - plane.ci.low);
  const double diff = std::abs(plane.c_hat - sphere.normalized());
  return below("planar_minus_spherical", diff, std::hypot(hw_s, hw_p), false);
}

}  // namespace nodal::cli
