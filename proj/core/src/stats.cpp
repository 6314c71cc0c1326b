#include "nodal/stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nodal/error.hpp"
#include "nodal/rng.hpp"

namespace nodal::stats {

namespace {
constexpr double kInvSqrt2 = 0.5 * std::numbers::sqrt2;
}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) throw StatisticsError("mean of an empty sample");
  double sum = 0.0;
  for (double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw StatisticsError("variance needs at least two values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double standard_error(std::span<const double> x) { return std::sqrt(variance(x) / static_cast<double>(x.size())); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_two_sided_quantile(double level) {
  if (!(level > 0.0 && level < 1.0)) throw StatisticsError("confidence level must lie in (0, 1)");
  const double target = 0.5 + 0.5 * level;
  double lo = 0.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double ks_normal(std::vector<double> samples) {
  if (samples.empty()) throw StatisticsError("KS distance of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = normal_cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw StatisticsError("KS distance of an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

Interval percentile_interval(std::vector<double> replicates, double level) {
  if (replicates.empty()) throw StatisticsError("percentile interval of no replicates");
  if (!(level > 0.0 && level < 1.0)) throw StatisticsError("confidence level must lie in (0, 1)");
  std::sort(replicates.begin(), replicates.end());
  const std::size_t b = replicates.size();
  const std::size_t cut = static_cast<std::size_t>(std::floor(0.5 * (1.0 - level) * static_cast<double>(b)));
  return {replicates[cut], replicates[b - 1 - cut]};
}

namespace {

double resampled_mean(std::span<const double> x, rng::CounterStream& stream) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[stream.below(x.size())];
  return sum / static_cast<double>(x.size());
}

}  // namespace

std::vector<double> bootstrap_mean_difference(std::span<const double> a, std::span<const double> b,
                                              int resamples, std::uint64_t key_a, std::uint64_t key_b) {
  if (a.empty() || b.empty()) throw StatisticsError("bootstrap of an empty sample");
  if (resamples < 1) throw StatisticsError("bootstrap needs at least one resample");
  std::vector<double> out(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    rng::CounterStream sa(rng::combine(key_a, static_cast<std::uint64_t>(r)));
    rng::CounterStream sb(rng::combine(key_b, static_cast<std::uint64_t>(r)));
    out[static_cast<std::size_t>(r)] = resampled_mean(a, sa) - resampled_mean(b, sb);
  }
  return out;
}

WelchResult welch(std::span<const double> a, std::span<const double> b) {
  const double va = variance(a) / static_cast<double>(a.size());
  const double vb = variance(b) / static_cast<double>(b.size());
  WelchResult r;
  r.se = std::sqrt(va + vb);
  r.t = r.se > 0.0 ? (mean(a) - mean(b)) / r.se : 0.0;
  const double denom = va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1);
  r.dof = denom > 0.0 ? (va + vb) * (va + vb) / denom : 0.0;
  return r;
}

LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size()) throw StatisticsError("fit: length mismatch");
  if (x.size() < 2) throw StatisticsError("fit: need at least two points");
  double s = 0.0, sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(w[i] > 0.0)) throw StatisticsError("fit: weights must be positive");
    s += w[i];
    sx += w[i] * x[i];
    sxx += w[i] * x[i] * x[i];
    sy += w[i] * y[i];
    sxy += w[i] * x[i] * y[i];
  }
  const double det = s * sxx - sx * sx;
  if (!(std::abs(det) > 1e-300)) throw StatisticsError("fit: degenerate design");
  LinearFit fit;
  fit.intercept = (sxx * sy - sx * sxy) / det;
  fit.slope = (s * sxy - sx * sy) / det;
  fit.intercept_se = std::sqrt(sxx / det);
  fit.slope_se = std::sqrt(s / det);
  fit.residuals.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.residuals[i] = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.chi2 += w[i] * fit.residuals[i] * fit.residuals[i];
  }
  return fit;
}

PolynomialFit weighted_polynomial_fit(std::span<const double> x, std::span<const double> y,
                                      std::span<const double> w, int order) {
  if (x.size() != y.size() || x.size() != w.size()) throw StatisticsError("fit: length mismatch");
  if (order < 0 || x.size() < static_cast<std::size_t>(order) + 1) {
    throw StatisticsError("fit: need at least order + 1 points");
  }
  const Eigen::Index m = order + 1;
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(w[i] > 0.0)) throw StatisticsError("fit: weights must be positive");
    Eigen::VectorXd row(m);
    double p = 1.0;
    for (Eigen::Index j = 0; j < m; ++j, p *= x[i]) row(j) = p;
    normal += w[i] * row * row.transpose();
    rhs += w[i] * y[i] * row;
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  if (!lu.isInvertible()) throw StatisticsError("fit: degenerate design");
  const Eigen::VectorXd beta = lu.solve(rhs);
  const Eigen::MatrixXd cov = lu.inverse();
  PolynomialFit fit;
  fit.dof = static_cast<int>(x.size()) - static_cast<int>(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    fit.coeffs.push_back(beta(j));
    fit.coeff_se.push_back(std::sqrt(std::max(0.0, cov(j, j))));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    double model = 0.0;
    double p = 1.0;
    for (Eigen::Index j = 0; j < m; ++j, p *= x[i]) model += beta(j) * p;
    fit.residuals.push_back(y[i] - model);
    fit.chi2 += w[i] * fit.residuals.back() * fit.residuals.back();
  }
  return fit;
}

double sign_test_p(int positive, int count) {
  if (count < 1 || positive < 0 || positive > count) throw StatisticsError("sign test: bad counts");
  const int k = std::min(positive, count - positive);
  double tail = 0.0;
  double term = std::pow(0.5, count);  // C(count, 0) / 2^count
  for (int i = 0; i <= k; ++i) {
    tail += term;
    term *= static_cast<double>(count - i) / (i + 1);
  }
  return std::min(1.0, 2.0 * tail);
}

}  // namespace nodal::stats
