#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace nodal::stats {

double mean(std::span<const double> x);

/// Unbiased sample variance; throws StatisticsError for fewer than 2 values.
double variance(std::span<const double> x);

double standard_error(std::span<const double> x);

double normal_cdf(double x);

/// Two-sided standard normal quantile, i.e. z with P(|Z| <= z) = level.
double normal_two_sided_quantile(double level);

/// sup |F_n - Phi| for the empirical CDF of the samples.
double ks_normal(std::vector<double> samples);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct Interval {
  double low = 0.0;
  double high = 0.0;
  bool contains(double v) const { return low <= v && v <= high; }
};

/// Percentile interval from bootstrap replicates: the order statistics
/// floor(alpha B) and B - 1 - floor(alpha B) with alpha = (1 - level) / 2.
/// The symmetric choice makes the interval of negated replicates the negated
/// interval exactly.
Interval percentile_interval(std::vector<double> replicates, double level);

/// Bootstrap replicates of mean(a*) - mean(b*). Each arm is resampled from its
/// own stream, so swapping (a, key_a) with (b, key_b) negates every replicate.
std::vector<double> bootstrap_mean_difference(std::span<const double> a, std::span<const double> b,
                                              int resamples, std::uint64_t key_a, std::uint64_t key_b);

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double se = 0.0;
};

WelchResult welch(std::span<const double> a, std::span<const double> b);

/// Weighted least squares fit y = intercept + slope * x.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_se = 0.0;
  double slope_se = 0.0;
  double chi2 = 0.0;
  std::vector<double> residuals;
};

/// Throws StatisticsError for fewer than 2 points or a degenerate design.
LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w);

/// Weighted least squares fit y = sum_j coeffs[j] x^j, j = 0..order.
struct PolynomialFit {
  std::vector<double> coeffs;
  std::vector<double> coeff_se;
  double chi2 = 0.0;
  int dof = 0;
  std::vector<double> residuals;
};

/// Throws StatisticsError when there are fewer points than coefficients.
PolynomialFit weighted_polynomial_fit(std::span<const double> x, std::span<const double> y,
                                      std::span<const double> w, int order);

/// Two-sided exact binomial sign test p-value for `positive` successes out of
/// `count` fair trials.
double sign_test_p(int positive, int count);

}  // namespace nodal::stats
