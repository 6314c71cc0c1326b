#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nodal/basis.hpp"
#include "nodal/ensemble.hpp"
#include "nodal/nodal.hpp"
#include "nodal/stats.hpp"

// Monte Carlo campaigns. Every experiment is a pure function of its config
// and master seed: trial t of an arm draws from the stream
// trial_seed(stream_key(seed, tag), t), where the tag names the experiment,
// the arm's coefficient law and the degree. Records land in slot t no matter
// which worker produced them.
namespace nodal {

struct RunOptions {
  int threads = 0;      // 0: see resolve_threads
  bool timing = false;  // fill TrialRecord::runtime_ms (breaks byte-identical reruns)
};

std::uint64_t stream_key(std::uint64_t seed, std::string_view tag);

struct TrialRecord {
  std::string experiment;
  int degree = 0;  // rwm records store the disk radius R here
  std::string dist;
  std::uint64_t trial_index = 0;
  std::uint64_t seed = 0;
  std::optional<int> count_total;
  std::optional<int> count_contained;
  std::optional<double> length_estimate;
  std::optional<double> runtime_ms;
};

// ---------------------------------------------------------------- c_NS

struct CnsConfig {
  std::vector<int> degrees{20, 40, 60, 80};
  CoefficientDistribution dist = CoefficientDistribution::gaussian();
  int trials = 200;
  int oversample = kMinCensusOversample;
  std::uint64_t seed = 0;
  BasisKind basis = BasisKind::Standard;
  int crofton_circles = 0;  // 0: no length estimate
  int bootstrap = 10000;
  double level = 0.95;
};

struct DegreeSummary {
  int degree = 0;
  int trials = 0;
  double mean = 0.0;  // mean count / n^2
  double se = 0.0;
  int max_count = 0;
  std::optional<double> mean_length_over_n;
};

struct CnsEstimate {
  std::vector<DegreeSummary> per_degree;
  double c_hat = 0.0;  // intercept of mean / n^2 = c + b / n
  double c_hat_se = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
  stats::Interval ci;  // bootstrap percentile interval for c_hat
  double chi2 = 0.0;
  double residual_sign_p = 1.0;
  int n_trials = 0;

  double normalized() const;  // c_hat / (4 pi)
  stats::Interval normalized_ci() const;
};

/// Throws StatisticsError for fewer than 50 trials per degree.
std::vector<TrialRecord> run_cns_trials(const CnsConfig& config, const RunOptions& options = {});
CnsEstimate summarize_cns(const CnsConfig& config, std::span<const TrialRecord> records);
CnsEstimate estimate_cns(const CnsConfig& config, const RunOptions& options = {},
                         std::vector<TrialRecord>* records = nullptr);

// -------------------------------------------------------- universality

struct UniversalityConfig {
  CoefficientDistribution dist_a = CoefficientDistribution::gaussian();
  CoefficientDistribution dist_b = CoefficientDistribution::rademacher();
  int degree = 60;
  int trials = 400;  // per arm
  int oversample = kMinCensusOversample;
  std::uint64_t seed = 0;
  int bootstrap = 10000;
  double level = 0.95;
};

struct UniversalityReport {
  int trials_a = 0;
  int trials_b = 0;
  double mean_a = 0.0;  // mean count / n^2
  double mean_b = 0.0;
  double se_a = 0.0;
  double se_b = 0.0;
  double difference = 0.0;  // mean_a - mean_b
  stats::WelchResult welch;
  stats::Interval ci;
  bool consistent = false;  // 0 in ci
  bool small_degree = false;
};

/// Records of arm a come first. When both arms use the same law they share a
/// stream and take trial indices [0, T) and [T, 2T).
std::vector<TrialRecord> run_universality_trials(const UniversalityConfig& config, const RunOptions& options = {});
UniversalityReport summarize_universality(const UniversalityConfig& config, std::span<const TrialRecord> records);
UniversalityReport universality_test(const UniversalityConfig& config, const RunOptions& options = {},
                                     std::vector<TrialRecord>* records = nullptr);

// ----------------------------------------------------------------- CLT

/// KS distance of f_n(x) to N(0, 1), fresh coefficients and a fresh uniform x
/// per sample. Throws ConfigurationError for fewer than 1000 samples.
double clt_diagnostic(int n, const CoefficientDistribution& dist, int n_samples, std::uint64_t seed,
                      const RunOptions& options = {});

// ---------------------------------------------------------- covariance

struct PatchPair {
  std::array<double, 2> y1;
  std::array<double, 2> y2;
};

/// Six fixed pairs in the unit disk; the second one has R |y1 - y2| = j0.
std::vector<PatchPair> default_covariance_pairs(double radius);

struct CovarianceEntry {
  int pair = 0;
  int order = 0;  // 0: values, 1: d/dy1 on both sides, 2: d/dy2 on both sides
  double empirical = 0.0;
  double target = 0.0;
  double se = 0.0;
};

struct CovariancePoint {
  int degree = 0;
  int trials = 0;
  double max_deviation = 0.0;
  double se_at_max = 0.0;
  std::vector<CovarianceEntry> entries;
};

/// Target of entry (pair, order) for the limit field: J0(R|d|) for values,
/// and the matching second derivative of -J0 divided by R^2 for order 1, 2.
double covariance_target(const PatchPair& pair, int order, double radius);

/// Patch centers are uniform on the sphere; derivatives are central
/// differences in patch coordinates divided by R.
CovariancePoint covariance_check(int n, double radius, const CoefficientDistribution& dist,
                                 std::span<const PatchPair> pairs, int trials, std::uint64_t seed,
                                 const RunOptions& options = {});

// ------------------------------------------------------------- bad set

struct BadSetReport {
  int degree = 0;
  double K = 0.0;
  double radius = 0.0;
  int n_points = 0;
  double fraction_values = 0.0;     // max_k sup |Y_k| > sqrt(n) / K
  double fraction_gradients = 0.0;  // max_k sup |grad Y_k| / n > sqrt(n) / K
};

/// sup over B(x, R/n) is taken on the 21 points of a 5 x 5 grid that lie in
/// the disk. Throws ConfigurationError for fewer than 1000 points.
BadSetReport badset_census(int n, double K, double radius, int n_points, std::uint64_t seed,
                           BasisKind basis = BasisKind::Standard, const RunOptions& options = {});

/// Same sample of centers evaluated against several K at once.
std::vector<BadSetReport> badset_census(int n, std::span<const double> Ks, double radius, int n_points,
                                        std::uint64_t seed, BasisKind basis = BasisKind::Standard,
                                        const RunOptions& options = {});

// ------------------------------------------------------------------ L4

struct L4Report {
  int degree = 0;
  int quadrature_order = 0;
  double max_l4 = 0.0;  // max_k of the integral of Y_k^4 against rho
  int argmax = 0;       // k of the maximizer
  double ratio = 0.0;   // max_l4 / (n^{2/3} log n); infinite for n = 1
};

/// Gauss-Legendre in cos(theta) times 4n + 1 equispaced longitudes. Throws
/// ConfigurationError unless quadrature_order >= 2n + 1.
L4Report l4_census(const HarmonicBasis& basis, int quadrature_order);

// ----------------------------------------------------------- local sup

/// sup_{B(x, R/n)} |f|^2 / ((nR)^2 int_{B(x, 10R/n)} |f|^2 d rho), both by
/// polar sampling in geodesic coordinates. Throws ConfigurationError for
/// R < 1 or 10R/n >= pi.
double local_sup_check(const RandomField& field, const SpherePoint& x, double radius);

struct LocalSupSweep {
  int degree = 0;
  double radius = 0.0;
  int draws = 0;
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
};

LocalSupSweep local_sup_sweep(int n, double radius, int draws, const CoefficientDistribution& dist,
                              std::uint64_t seed, const RunOptions& options = {});

// ---------------------------------------------------------- semi-local

struct SemilocalReport {
  int degree = 0;
  double radius = 0.0;
  int n_centers = 0;
  int global_count = 0;
  double mean_contained = 0.0;
  double se_contained = 0.0;
  double reconstructed = 0.0;  // 4 pi (n^2 / (pi R^2)) mean_contained
  double discrepancy = 0.0;    // |reconstructed - global_count|
  double ratio = 0.0;          // discrepancy / (n^2 / R)
};

/// Centers uniform on the sphere; the average over rho is rescaled to the
/// area measure by 4 pi. Throws ConfigurationError for fewer than 500 centers.
SemilocalReport semilocal_check(const RandomField& field, double radius, int n_centers, std::uint64_t seed,
                                const RunOptions& options = {}, int oversample = kMinCensusOversample);

// ------------------------------------------------------- basis demo

struct SupportEntry {
  double value = 0.0;
  int frequency = 0;
};

struct PoleSample {
  BasisKind basis = BasisKind::Standard;
  std::vector<double> values;
  /// Distinct values with counts, ascending; empty when more than 16 distinct values occur.
  std::vector<SupportEntry> support;
};

struct BasisDemoReport {
  int degree = 0;
  int trials = 0;
  std::string dist;
  PoleSample standard;
  PoleSample rotated;
  double ks_between = 0.0;
};

/// f_n(north pole) = sum_k a_k w_k with the exact pole weights w of each
/// basis. The two bases use independent coefficient streams.
BasisDemoReport basis_dependence_demo(int n, int trials, const CoefficientDistribution& dist, std::uint64_t seed);

// -------------------------------------------------- grid diagnostics

struct InnerRadiusReport {
  int degree = 0;
  int realizations = 0;
  double min_scaled = 0.0;  // min over all components of inner radius * n
  std::vector<double> per_realization;
};

InnerRadiusReport inner_radius_census(int n, int realizations, const CoefficientDistribution& dist, int oversample,
                                      std::uint64_t seed, const RunOptions& options = {});

struct RefinementReport {
  int degree = 0;
  int oversample = 0;
  int realizations = 0;
  int stable = 0;
  std::vector<std::uint64_t> flagged;  // trial indices whose counts differ between q and 2q

  double fraction_stable() const { return realizations ? static_cast<double>(stable) / realizations : 0.0; }
};

RefinementReport refinement_census(int n, int oversample, int realizations, const CoefficientDistribution& dist,
                                   std::uint64_t seed, const RunOptions& options = {});

// ----------------------------------------------------------------- RWM

struct RwmConfig {
  std::vector<double> radii{5.0, 10.0, 20.0};
  int waves = 1024;
  int trials = 1000;
  int oversample = kMinCensusOversample;
  std::uint64_t seed = 0;
  int bootstrap = 10000;
  double level = 0.95;
  /// Polynomial order in 1/R of the density fit. Contained counts behave like
  /// c pi R^2 - (perimeter term) R + O(1), so the density needs 1/R and 1/R^2.
  int fit_order = 2;
};

struct RadiusSummary {
  double radius = 0.0;
  int trials = 0;
  double mean_density = 0.0;  // mean contained count / (pi R^2)
  double se = 0.0;
};

struct RwmEstimate {
  std::vector<RadiusSummary> per_radius;
  double c_hat = 0.0;  // intercept of density = c + b / R + d / R^2
  double c_hat_se = 0.0;
  std::vector<double> coefficients;
  stats::Interval ci;
  int n_trials = 0;
  /// Linear-in-1/R fit on the same data, kept to show its lack of fit.
  std::optional<double> linear_c_hat;
  double linear_chi2 = 0.0;
  int linear_dof = 0;
};

std::vector<TrialRecord> run_rwm_trials(const RwmConfig& config, const RunOptions& options = {});
RwmEstimate summarize_rwm(const RwmConfig& config, std::span<const TrialRecord> records);
RwmEstimate estimate_rwm(const RwmConfig& config, const RunOptions& options = {},
                         std::vector<TrialRecord>* records = nullptr);

}  // namespace nodal
