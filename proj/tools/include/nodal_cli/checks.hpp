#pragma once

#include <span>
#include <string>
#include <vector>

#include "nodal/experiments.hpp"

// Pass/fail rules shared by `--check` and the acceptance runner.
namespace nodal::cli {

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  /// Single bound, or [low, high] when `relation` is "in" or "contains 0".
  std::vector<double> threshold;
  std::string relation;
};

bool all_pass(std::span<const Check> checks);

inline constexpr double kCnsLowerBound = 1.39e-4;
inline constexpr double kCnsPleijelBound = 0.691;
inline constexpr double kPercolationValue = 0.0624;

std::vector<Check> cns_checks(const CnsEstimate& est);
std::vector<Check> universality_checks(const UniversalityReport& rep);

struct KsPoint {
  int degree = 0;
  double ks = 0.0;
};
/// Gaussian coefficients: every distance below 0.03. Otherwise the distance
/// must strictly decrease along the ladder and end below 0.05.
std::vector<Check> clt_checks(std::span<const KsPoint> points, bool gaussian);

/// dev(n_{i+1}) <= dev(n_i) + 3 sqrt(se_i^2 + se_{i+1}^2) for consecutive degrees.
std::vector<Check> covariance_checks(std::span<const CovariancePoint> points);

std::vector<Check> l4_checks(std::span<const L4Report> reports);
std::vector<Check> badset_checks(std::span<const BadSetReport> reports);
std::vector<Check> local_sup_checks(std::span<const LocalSupSweep> sweeps);
std::vector<Check> semilocal_checks(std::span<const SemilocalReport> reports);
std::vector<Check> inner_radius_checks(std::span<const InnerRadiusReport> reports);
std::vector<Check> rwm_checks(const RwmEstimate& est);
std::vector<Check> demo_checks(const BasisDemoReport& rep, bool rademacher);

/// Planar and spherical c_NS agree when |c_plane - c_sphere / 4 pi| is at
/// most the root sum of squares of the two CI half-widths.
Check planar_spherical_agreement(const CnsEstimate& sphere, const RwmEstimate& plane);

}  // namespace nodal::cli
