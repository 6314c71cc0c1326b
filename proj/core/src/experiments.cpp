#include "nodal/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "nodal/error.hpp"
#include "nodal/parallel.hpp"
#include "nodal/rng.hpp"
#include "nodal/rwm.hpp"
#include "nodal/specfn.hpp"

namespace nodal {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

SpherePoint random_point(std::uint64_t key) {
  rng::CounterStream stream(key);
  const double u1 = stream.uniform();
  const double u2 = stream.uniform();
  return uniform_sphere_point(u1, u2);
}

std::uint64_t point_key(std::uint64_t trial_seed) { return rng::combine(trial_seed, rng::hash_string("point")); }

struct GroupFit {
  std::vector<double> coeffs;  // intercept first
  std::vector<double> coeff_se;
  double chi2 = 0.0;
  int dof = 0;
  double sign_p = 1.0;
  stats::Interval ci;

  double coeff(std::size_t j) const { return j < coeffs.size() ? coeffs[j] : 0.0; }
  double se(std::size_t j) const { return j < coeff_se.size() ? coeff_se[j] : 0.0; }
};

// Fits group means y_g as a polynomial of the given order in x_g with weights
// 1 / se_g^2, and bootstraps the intercept by resampling inside each group.
// The order is capped at (groups - 1).
GroupFit fit_groups(const std::vector<std::vector<double>>& groups, const std::vector<double>& xs, int order,
                    int resamples, double level, std::uint64_t key) {
  const std::size_t g = groups.size();
  const int used = std::min(order, static_cast<int>(g) - 1);
  std::vector<double> means(g), weights(g);
  for (std::size_t i = 0; i < g; ++i) {
    means[i] = stats::mean(groups[i]);
    const double se = stats::standard_error(groups[i]);
    weights[i] = 1.0 / std::max(se * se, 1e-300);
  }
  GroupFit out;
  const stats::PolynomialFit fit = stats::weighted_polynomial_fit(xs, means, weights, used);
  out.coeffs = fit.coeffs;
  out.coeff_se = fit.coeff_se;
  out.chi2 = fit.chi2;
  out.dof = fit.dof;
  int positive = 0;
  for (double r : fit.residuals) positive += r > 0.0 ? 1 : 0;
  out.sign_p = stats::sign_test_p(positive, static_cast<int>(g));

  std::vector<double> reps(static_cast<std::size_t>(std::max(1, resamples)));
  std::vector<double> m(g);
  for (std::size_t r = 0; r < reps.size(); ++r) {
    for (std::size_t i = 0; i < g; ++i) {
      rng::CounterStream stream(rng::combine(rng::combine(key, i), r));
      const std::vector<double>& x = groups[i];
      double sum = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) sum += x[stream.below(x.size())];
      m[i] = sum / static_cast<double>(x.size());
    }
    reps[r] = stats::weighted_polynomial_fit(xs, m, weights, used).coeffs[0];
  }
  out.ci = stats::percentile_interval(std::move(reps), level);
  return out;
}

std::string cns_tag(const CnsConfig& c, int n) {
  return "cns/" + c.dist.name() + "/" + to_string(c.basis) + "/" + std::to_string(n);
}

std::string universality_tag(const CoefficientDistribution& d, int n) {
  return "universality/" + d.name() + "/" + std::to_string(n);
}

std::string rwm_tag(const RwmConfig& c, double radius) {
  return "rwm/" + std::to_string(c.waves) + "/" + std::to_string(std::lround(radius));
}

std::string rwm_dist(const RwmConfig& c) { return "plane-waves:" + std::to_string(c.waves); }

TrialRecord sphere_trial(const std::string& experiment, const CoefficientDistribution& dist,
                         const std::shared_ptr<const HarmonicBasis>& basis, const SphereSynthesizer& synth,
                         std::uint64_t index, std::uint64_t seed, int crofton_circles, const RunOptions& options) {
  const auto start = Clock::now();
  const int n = basis->degree();
  RandomField field(basis, sample_coefficients(dist, n, seed));
  TrialRecord rec;
  rec.experiment = experiment;
  rec.degree = n;
  rec.dist = dist.name();
  rec.trial_index = index;
  rec.seed = seed;
  rec.count_total = census_global(field, synth).count_total;
  if (crofton_circles > 0) {
    rec.length_estimate = nodal_length_crofton(field, crofton_circles, rng::combine(seed, rng::hash_string("crofton")));
  }
  if (options.timing) rec.runtime_ms = elapsed_ms(start);
  return rec;
}

double scaled_count(const TrialRecord& r) {
  if (!r.count_total) throw StatisticsError("trial record without count_total");
  return static_cast<double>(*r.count_total) / (static_cast<double>(r.degree) * r.degree);
}

}  // namespace

std::uint64_t stream_key(std::uint64_t seed, std::string_view tag) { return rng::combine(seed, rng::hash_string(tag)); }

// ---------------------------------------------------------------- c_NS

double CnsEstimate::normalized() const { return c_hat / kFourPi; }

stats::Interval CnsEstimate::normalized_ci() const { return {ci.low / kFourPi, ci.high / kFourPi}; }

std::vector<TrialRecord> run_cns_trials(const CnsConfig& config, const RunOptions& options) {
  if (config.degrees.empty()) throw ConfigurationError("cns: empty degree ladder");
  if (config.trials < 50) throw StatisticsError("cns: at least 50 trials per degree are required");
  const int threads = resolve_threads(options.threads);
  std::vector<TrialRecord> records;
  for (int n : config.degrees) {
    const auto basis = HarmonicBasis::build(n, config.basis);
    const SphereSynthesizer synth(n, build_sphere_grid(n, config.oversample));
    const std::uint64_t key = stream_key(config.seed, cns_tag(config, n));
    const std::size_t base = records.size();
    records.resize(base + static_cast<std::size_t>(config.trials));
    parallel_for(static_cast<std::size_t>(config.trials), threads, [&](std::size_t t) {
      records[base + t] = sphere_trial("cns", config.dist, basis, synth, t, rng::trial_seed(key, t),
                                       config.crofton_circles, options);
    });
  }
  return records;
}

CnsEstimate summarize_cns(const CnsConfig& config, std::span<const TrialRecord> records) {
  CnsEstimate est;
  std::vector<std::vector<double>> groups;
  std::vector<double> xs;
  for (int n : config.degrees) {
    std::vector<double> y;
    std::vector<double> lengths;
    int max_count = 0;
    for (const TrialRecord& r : records) {
      if (r.degree != n) continue;
      y.push_back(scaled_count(r));
      max_count = std::max(max_count, *r.count_total);
      if (r.length_estimate) lengths.push_back(*r.length_estimate / n);
    }
    if (y.size() < 2) throw StatisticsError("cns: degree " + std::to_string(n) + " has fewer than 2 records");
    DegreeSummary d;
    d.degree = n;
    d.trials = static_cast<int>(y.size());
    d.mean = stats::mean(y);
    d.se = stats::standard_error(y);
    d.max_count = max_count;
    if (!lengths.empty()) d.mean_length_over_n = stats::mean(lengths);
    est.per_degree.push_back(d);
    est.n_trials += d.trials;
    groups.push_back(std::move(y));
    xs.push_back(1.0 / n);
  }
  const GroupFit fit = fit_groups(groups, xs, 1, config.bootstrap, config.level,
                                  stream_key(config.seed, "bootstrap/cns/" + config.dist.name()));
  est.c_hat = fit.coeff(0);
  est.c_hat_se = fit.se(0);
  est.slope = fit.coeff(1);
  est.slope_se = fit.se(1);
  est.ci = fit.ci;
  est.chi2 = fit.chi2;
  est.residual_sign_p = fit.sign_p;
  return est;
}

CnsEstimate estimate_cns(const CnsConfig& config, const RunOptions& options, std::vector<TrialRecord>* records) {
  std::vector<TrialRecord> recs = run_cns_trials(config, options);
  CnsEstimate est = summarize_cns(config, recs);
  if (records) *records = std::move(recs);
  return est;
}

// -------------------------------------------------------- universality

std::vector<TrialRecord> run_universality_trials(const UniversalityConfig& config, const RunOptions& options) {
  if (config.trials < 200) throw StatisticsError("universality: at least 200 trials per arm are required");
  const int n = config.degree;
  const int threads = resolve_threads(options.threads);
  const auto basis = HarmonicBasis::build(n);
  const SphereSynthesizer synth(n, build_sphere_grid(n, config.oversample));
  const bool same = config.dist_a == config.dist_b;
  const std::size_t t_arm = static_cast<std::size_t>(config.trials);
  const std::uint64_t key_a = stream_key(config.seed, universality_tag(config.dist_a, n));
  const std::uint64_t key_b = stream_key(config.seed, universality_tag(config.dist_b, n));
  std::vector<TrialRecord> records(2 * t_arm);
  parallel_for(2 * t_arm, threads, [&](std::size_t i) {
    const bool arm_a = i < t_arm;
    const CoefficientDistribution& dist = arm_a ? config.dist_a : config.dist_b;
    const std::uint64_t index = (arm_a || same) ? i : i - t_arm;
    const std::uint64_t key = arm_a ? key_a : key_b;
    records[i] = sphere_trial("universality", dist, basis, synth, index, rng::trial_seed(key, index), 0, options);
  });
  return records;
}

UniversalityReport summarize_universality(const UniversalityConfig& config, std::span<const TrialRecord> records) {
  const bool same = config.dist_a == config.dist_b;
  const std::string name_a = config.dist_a.name();
  const std::string name_b = config.dist_b.name();
  const std::uint64_t split = static_cast<std::uint64_t>(config.trials);
  std::vector<double> a, b;
  for (const TrialRecord& r : records) {
    if (r.degree != config.degree) continue;
    if (same) {
      if (r.dist != name_a) continue;
      (r.trial_index < split ? a : b).push_back(scaled_count(r));
    } else if (r.dist == name_a) {
      a.push_back(scaled_count(r));
    } else if (r.dist == name_b) {
      b.push_back(scaled_count(r));
    }
  }
  if (a.size() < 2 || b.size() < 2) throw StatisticsError("universality: each arm needs at least 2 records");
  UniversalityReport rep;
  rep.trials_a = static_cast<int>(a.size());
  rep.trials_b = static_cast<int>(b.size());
  rep.mean_a = stats::mean(a);
  rep.mean_b = stats::mean(b);
  rep.se_a = stats::standard_error(a);
  rep.se_b = stats::standard_error(b);
  rep.difference = rep.mean_a - rep.mean_b;
  rep.welch = stats::welch(a, b);
  const std::string suffix_a = same ? "/first" : "";
  const std::string suffix_b = same ? "/second" : "";
  const std::uint64_t ka = stream_key(config.seed, "bootstrap/universality/" + name_a + suffix_a);
  const std::uint64_t kb = stream_key(config.seed, "bootstrap/universality/" + name_b + suffix_b);
  rep.ci = stats::percentile_interval(stats::bootstrap_mean_difference(a, b, config.bootstrap, ka, kb), config.level);
  rep.consistent = rep.ci.contains(0.0);
  rep.small_degree = config.degree < 20;
  return rep;
}

UniversalityReport universality_test(const UniversalityConfig& config, const RunOptions& options,
                                     std::vector<TrialRecord>* records) {
  std::vector<TrialRecord> recs = run_universality_trials(config, options);
  UniversalityReport rep = summarize_universality(config, recs);
  if (records) *records = std::move(recs);
  return rep;
}

// ----------------------------------------------------------------- CLT

double clt_diagnostic(int n, const CoefficientDistribution& dist, int n_samples, std::uint64_t seed,
                      const RunOptions& options) {
  if (n_samples < 1000) throw ConfigurationError("clt: at least 1000 samples are required");
  const auto basis = HarmonicBasis::build(n);
  const std::uint64_t key = stream_key(seed, "clt/" + dist.name() + "/" + std::to_string(n));
  const double normalizer = 1.0 / std::sqrt(2.0 * n + 1.0);
  const std::size_t total = static_cast<std::size_t>(n_samples);
  constexpr std::size_t kBlock = 256;
  std::vector<double> samples(total);
  parallel_for((total + kBlock - 1) / kBlock, resolve_threads(options.threads), [&](std::size_t b) {
    const std::size_t begin = b * kBlock;
    const std::size_t count = std::min(kBlock, total - begin);
    std::vector<double> coeffs;
    coeffs.reserve(count * basis->size());
    std::vector<Vec3> points(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t s = rng::trial_seed(key, begin + i);
      const auto a = sample_coefficients(dist, n, s);
      coeffs.insert(coeffs.end(), a.begin(), a.end());
      points[i] = to_cartesian(random_point(point_key(s)));
    }
    const std::span<double> out(samples.data() + begin, count);
    basis->synthesize_each(coeffs, points, out);
    for (double& v : out) v *= normalizer;
  });
  return stats::ks_normal(std::move(samples));
}

// ---------------------------------------------------------- covariance

std::vector<PatchPair> default_covariance_pairs(double radius) {
  const double zero = specfn::kBesselJ0FirstZero / radius;
  return {
      {{0.0, 0.0}, {0.0, 0.0}},
      {{0.0, 0.0}, {zero, 0.0}},
      {{0.3, 0.2}, {-0.2, -0.1}},
      {{0.5, 0.0}, {0.0, 0.5}},
      {{-0.4, 0.3}, {0.4, -0.3}},
      {{0.1, -0.6}, {0.15, -0.45}},
  };
}

double covariance_target(const PatchPair& pair, int order, double radius) {
  const double d1 = pair.y1[0] - pair.y2[0];
  const double d2 = pair.y1[1] - pair.y2[1];
  const double r = std::hypot(d1, d2);
  const double u = radius * r;
  if (order == 0) return specfn::bessel_j0(u);
  if (order != 1 && order != 2) throw ConfigurationError("covariance_target: order must be 0, 1 or 2");
  if (u < 1e-12) return 0.5;
  const double dhat = (order == 1 ? d1 : d2) / r;
  const double j0 = specfn::bessel_j0(u);
  const double j1u = specfn::bessel_j1(u) / u;
  return (j0 - j1u) * dhat * dhat + j1u * (1.0 - dhat * dhat);
}

CovariancePoint covariance_check(int n, double radius, const CoefficientDistribution& dist,
                                 std::span<const PatchPair> pairs, int trials, std::uint64_t seed,
                                 const RunOptions& options) {
  if (pairs.empty()) throw ConfigurationError("covariance: no pairs");
  if (trials < 2) throw StatisticsError("covariance: need at least 2 trials");
  for (const PatchPair& p : pairs) {
    if (std::hypot(p.y1[0], p.y1[1]) > 1.0 || std::hypot(p.y2[0], p.y2[1]) > 1.0) {
      throw ConfigurationError("covariance: pairs must lie in the unit disk");
    }
  }
  constexpr double h = 1e-4;
  const auto basis = HarmonicBasis::build(n);
  const std::uint64_t key = stream_key(seed, "covariance/" + dist.name() + "/" + std::to_string(n));
  const std::size_t n_pairs = pairs.size();
  const std::size_t n_entries = 3 * n_pairs;
  std::vector<double> products(static_cast<std::size_t>(trials) * n_entries);

  parallel_for(static_cast<std::size_t>(trials), resolve_threads(options.threads), [&](std::size_t t) {
    const std::uint64_t s = rng::trial_seed(key, t);
    RandomField field(basis, sample_coefficients(dist, n, s));
    const PatchSpec spec(random_point(point_key(s)), radius, n);
    // Five stencil points per patch point: y, y +- h e1, y +- h e2.
    std::vector<Vec3> pts;
    pts.reserve(10 * n_pairs);
    for (const PatchPair& p : pairs) {
      for (const auto& y : {p.y1, p.y2}) {
        pts.push_back(spec.map(y[0], y[1]));
        pts.push_back(spec.map(y[0] + h, y[1]));
        pts.push_back(spec.map(y[0] - h, y[1]));
        pts.push_back(spec.map(y[0], y[1] + h));
        pts.push_back(spec.map(y[0], y[1] - h));
      }
    }
    std::vector<double> v(pts.size());
    field.values(pts, v);
    double* row = products.data() + t * n_entries;
    const double scale = 1.0 / (2.0 * h * radius);
    for (std::size_t i = 0; i < n_pairs; ++i) {
      const double* a = v.data() + 10 * i;
      const double* b = a + 5;
      row[3 * i] = a[0] * b[0];
      row[3 * i + 1] = (a[1] - a[2]) * scale * (b[1] - b[2]) * scale;
      row[3 * i + 2] = (a[3] - a[4]) * scale * (b[3] - b[4]) * scale;
    }
  });

  CovariancePoint out;
  out.degree = n;
  out.trials = trials;
  std::vector<double> column(static_cast<std::size_t>(trials));
  for (std::size_t e = 0; e < n_entries; ++e) {
    for (std::size_t t = 0; t < column.size(); ++t) column[t] = products[t * n_entries + e];
    CovarianceEntry entry;
    entry.pair = static_cast<int>(e / 3);
    entry.order = static_cast<int>(e % 3);
    entry.empirical = stats::mean(column);
    entry.se = stats::standard_error(column);
    entry.target = covariance_target(pairs[e / 3], entry.order, radius);
    const double dev = std::abs(entry.empirical - entry.target);
    if (e == 0 || dev > out.max_deviation) {
      out.max_deviation = dev;
      out.se_at_max = entry.se;
    }
    out.entries.push_back(entry);
  }
  return out;
}

// ------------------------------------------------------------- bad set

std::vector<BadSetReport> badset_census(int n, std::span<const double> Ks, double radius, int n_points,
                                        std::uint64_t seed, BasisKind kind, const RunOptions& options) {
  if (n_points < 1000) throw ConfigurationError("bad set: at least 1000 points are required");
  if (!(radius > 0.0) || radius / n >= kInjectivityMargin) {
    throw ConfigurationError("bad set: R must be positive with R/n below the injectivity margin");
  }
  for (double K : Ks) {
    if (!(K > 0.0)) throw ConfigurationError("bad set: K must be positive");
  }
  const auto basis = HarmonicBasis::build(n, kind);
  const std::uint64_t key = stream_key(seed, "badset/" + std::string(to_string(kind)) + "/" + std::to_string(n));
  std::vector<std::array<double, 2>> offsets;
  for (int a = -2; a <= 2; ++a) {
    for (int b = -2; b <= 2; ++b) {
      if (a * a + b * b <= 4) offsets.push_back({0.5 * a, 0.5 * b});
    }
  }
  std::vector<double> sup_values(static_cast<std::size_t>(n_points));
  std::vector<double> sup_gradients(static_cast<std::size_t>(n_points));
  const double step = radius / n;
  parallel_for(sup_values.size(), resolve_threads(options.threads), [&](std::size_t i) {
    const TangentFrame frame = tangent_frame(random_point(rng::trial_seed(key, i)));
    double vmax = 0.0;
    double gmax = 0.0;
    for (const auto& y : offsets) {
      const BasisGradient g = basis->eval_with_gradient(to_spherical(exp_map(frame, step * y[0], step * y[1])));
      for (std::size_t k = 0; k < g.values.size(); ++k) {
        vmax = std::max(vmax, std::abs(g.values[k]));
        gmax = std::max(gmax, std::hypot(g.d_theta[k], g.d_phi[k]));
      }
    }
    sup_values[i] = vmax;
    sup_gradients[i] = gmax / n;
  });
  std::vector<BadSetReport> out;
  for (double K : Ks) {
    const double threshold = std::sqrt(static_cast<double>(n)) / K;
    BadSetReport r;
    r.degree = n;
    r.K = K;
    r.radius = radius;
    r.n_points = n_points;
    int bad_v = 0;
    int bad_g = 0;
    for (std::size_t i = 0; i < sup_values.size(); ++i) {
      bad_v += sup_values[i] > threshold ? 1 : 0;
      bad_g += sup_gradients[i] > threshold ? 1 : 0;
    }
    r.fraction_values = static_cast<double>(bad_v) / n_points;
    r.fraction_gradients = static_cast<double>(bad_g) / n_points;
    out.push_back(r);
  }
  return out;
}

BadSetReport badset_census(int n, double K, double radius, int n_points, std::uint64_t seed, BasisKind kind,
                           const RunOptions& options) {
  const double ks[] = {K};
  return badset_census(n, std::span<const double>(ks), radius, n_points, seed, kind, options).front();
}

// ------------------------------------------------------------------ L4

L4Report l4_census(const HarmonicBasis& basis, int quadrature_order) {
  const int n = basis.degree();
  if (quadrature_order < 2 * n + 1) {
    throw ConfigurationError("l4_census: Gauss-Legendre order " + std::to_string(quadrature_order) +
                             " is not exact for degree " + std::to_string(4 * n));
  }
  const specfn::GaussLegendreRule rule = specfn::gauss_legendre(quadrature_order);
  const int m = 4 * n + 1;
  const std::size_t width = basis.size();
  std::vector<double> cosk(static_cast<std::size_t>(m) * (n + 1));
  std::vector<double> sink(cosk.size());
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k <= n; ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>((static_cast<long long>(k) * j) % m) / m;
      cosk[static_cast<std::size_t>(j) * (n + 1) + k] = std::cos(a);
      sink[static_cast<std::size_t>(j) * (n + 1) + k] = std::sin(a);
    }
  }
  std::vector<double> acc(width, 0.0);
  std::vector<double> leg(static_cast<std::size_t>(n) + 1);
  std::vector<double> vals(width);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    basis.legendre().evaluate(x, std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x))), leg);
    const double w = 0.5 * rule.weights[i] / m;
    for (int j = 0; j < m; ++j) {
      const double* c = cosk.data() + static_cast<std::size_t>(j) * (n + 1);
      const double* s = sink.data() + static_cast<std::size_t>(j) * (n + 1);
      vals[basis.index(0)] = leg[0];
      for (int k = 1; k <= n; ++k) {
        const double a = std::numbers::sqrt2 * leg[static_cast<std::size_t>(k)];
        vals[basis.index(k)] = a * c[k];
        vals[basis.index(-k)] = a * s[k];
      }
      basis.convert_standard_values(vals);
      for (std::size_t k = 0; k < width; ++k) {
        const double v2 = vals[k] * vals[k];
        acc[k] += w * v2 * v2;
      }
    }
  }
  L4Report r;
  r.degree = n;
  r.quadrature_order = quadrature_order;
  const auto it = std::max_element(acc.begin(), acc.end());
  r.max_l4 = *it;
  r.argmax = static_cast<int>(it - acc.begin()) - n;
  const double scale = std::pow(static_cast<double>(n), 2.0 / 3.0) * std::log(static_cast<double>(n));
  r.ratio = scale > 0.0 ? r.max_l4 / scale : std::numeric_limits<double>::infinity();
  return r;
}

// ----------------------------------------------------------- local sup

double local_sup_check(const RandomField& field, const SpherePoint& x, double radius) {
  const int n = field.degree();
  if (!(radius >= 1.0)) throw ConfigurationError("local_sup_check: R must be >= 1");
  const double outer = 10.0 * radius / n;
  if (!(outer < std::numbers::pi)) throw ConfigurationError("local_sup_check: 10R/n must stay below pi");
  const TangentFrame frame = tangent_frame(x);
  std::vector<Vec3> pts;

  // sup over B(x, R/n): center plus 4 rings of 16 points.
  const double inner = radius / n;
  pts.push_back(exp_map(frame, 0.0, 0.0));
  for (int i = 1; i <= 4; ++i) {
    for (int j = 0; j < 16; ++j) {
      const double r = inner * i / 4.0;
      const double a = 2.0 * std::numbers::pi * j / 16.0;
      pts.push_back(exp_map(frame, r * std::cos(a), r * std::sin(a)));
    }
  }
  const std::size_t sup_count = pts.size();

  // Integral over B(x, 10R/n) in geodesic polar coordinates, area element
  // sin(r) dr da, divided by 4 pi for rho. f^2 oscillates about 20R times
  // across the disk in both directions.
  const int phase = static_cast<int>(std::ceil(10.0 * radius));
  const specfn::GaussLegendreRule rule = specfn::gauss_legendre(phase + 12);
  const int n_angles = 2 * phase + 20;
  for (double node : rule.nodes) {
    const double r = 0.5 * outer * (node + 1.0);
    for (int j = 0; j < n_angles; ++j) {
      const double a = 2.0 * std::numbers::pi * j / n_angles;
      pts.push_back(exp_map(frame, r * std::cos(a), r * std::sin(a)));
    }
  }
  std::vector<double> v(pts.size());
  field.values(pts, v);
  double sup = 0.0;
  for (std::size_t i = 0; i < sup_count; ++i) sup = std::max(sup, v[i] * v[i]);
  double integral = 0.0;
  std::size_t cursor = sup_count;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double r = 0.5 * outer * (rule.nodes[i] + 1.0);
    double ring = 0.0;
    for (int j = 0; j < n_angles; ++j, ++cursor) ring += v[cursor] * v[cursor];
    integral += rule.weights[i] * 0.5 * outer * std::sin(r) * ring * (2.0 * std::numbers::pi / n_angles);
  }
  integral /= kFourPi;
  const double nr = n * radius;
  return sup / (nr * nr * integral);
}

LocalSupSweep local_sup_sweep(int n, double radius, int draws, const CoefficientDistribution& dist,
                              std::uint64_t seed, const RunOptions& options) {
  if (draws < 1) throw ConfigurationError("local sup: need at least one draw");
  const auto basis = HarmonicBasis::build(n);
  const std::uint64_t key = stream_key(seed, "local-sup/" + dist.name() + "/" + std::to_string(n));
  std::vector<double> ratios(static_cast<std::size_t>(draws));
  parallel_for(ratios.size(), resolve_threads(options.threads), [&](std::size_t i) {
    const std::uint64_t s = rng::trial_seed(key, i);
    RandomField field(basis, sample_coefficients(dist, n, s));
    ratios[i] = local_sup_check(field, random_point(point_key(s)), radius);
  });
  LocalSupSweep out;
  out.degree = n;
  out.radius = radius;
  out.draws = draws;
  out.max_ratio = *std::max_element(ratios.begin(), ratios.end());
  out.mean_ratio = stats::mean(ratios);
  return out;
}

// ---------------------------------------------------------- semi-local

SemilocalReport semilocal_check(const RandomField& field, double radius, int n_centers, std::uint64_t seed,
                                const RunOptions& options, int oversample) {
  if (n_centers < 500) throw ConfigurationError("semilocal: at least 500 centers are required");
  const int n = field.degree();
  const PatchGrid grid = build_patch_grid(radius, oversample);
  const std::uint64_t key = stream_key(seed, "semilocal/" + std::to_string(n));
  std::vector<double> contained(static_cast<std::size_t>(n_centers));
  CensusOptions census_options;
  census_options.allow_resolution_override = oversample < kMinCensusOversample;
  parallel_for(contained.size(), resolve_threads(options.threads), [&](std::size_t i) {
    const PatchSpec spec(random_point(rng::trial_seed(key, i)), radius, n);
    contained[i] = *census_patch(field, spec, grid, census_options).count_contained;
  });
  SemilocalReport rep;
  rep.degree = n;
  rep.radius = radius;
  rep.n_centers = n_centers;
  const int q = std::max(oversample, kMinCensusOversample);
  rep.global_count = census_global(field, build_sphere_grid(n, q)).count_total;
  rep.mean_contained = stats::mean(contained);
  rep.se_contained = stats::standard_error(contained);
  const double n2 = static_cast<double>(n) * n;
  rep.reconstructed = kFourPi * n2 / (std::numbers::pi * radius * radius) * rep.mean_contained;
  rep.discrepancy = std::abs(rep.reconstructed - rep.global_count);
  rep.ratio = rep.discrepancy / (n2 / radius);
  return rep;
}

// ------------------------------------------------------- basis demo

namespace {

PoleSample pole_sample(int n, BasisKind kind, int trials, const CoefficientDistribution& dist, std::uint64_t seed) {
  const auto basis = HarmonicBasis::build(n, kind);
  const std::vector<double> w = basis->pole_weights();
  const std::uint64_t key =
      stream_key(seed, "demo-basis/" + std::string(to_string(kind)) + "/" + dist.name() + "/" + std::to_string(n));
  PoleSample out;
  out.basis = kind;
  out.values.resize(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    const std::vector<double> a = sample_coefficients(dist, n, rng::trial_seed(key, static_cast<std::uint64_t>(t)));
    double v = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (w[k] != 0.0) v += a[k] * w[k];
    }
    // -0.0 and 0.0 are the same support point.
    out.values[static_cast<std::size_t>(t)] = v == 0.0 ? 0.0 : v;
  }
  std::map<double, int> counts;
  for (double v : out.values) {
    ++counts[v];
    if (counts.size() > 16) break;
  }
  if (counts.size() <= 16) {
    for (const auto& [value, freq] : counts) out.support.push_back({value, freq});
  }
  return out;
}

}  // namespace

BasisDemoReport basis_dependence_demo(int n, int trials, const CoefficientDistribution& dist, std::uint64_t seed) {
  if (trials < 1) throw ConfigurationError("demo-basis: need at least one trial");
  BasisDemoReport rep;
  rep.degree = n;
  rep.trials = trials;
  rep.dist = dist.name();
  rep.standard = pole_sample(n, BasisKind::Standard, trials, dist, seed);
  rep.rotated = pole_sample(n, BasisKind::PoleRotatedPair, trials, dist, seed);
  rep.ks_between = stats::ks_two_sample(rep.standard.values, rep.rotated.values);
  return rep;
}

// -------------------------------------------------- grid diagnostics

InnerRadiusReport inner_radius_census(int n, int realizations, const CoefficientDistribution& dist, int oversample,
                                      std::uint64_t seed, const RunOptions& options) {
  if (realizations < 1) throw ConfigurationError("inner radius: need at least one realization");
  const auto basis = HarmonicBasis::build(n);
  const SphereSynthesizer synth(n, build_sphere_grid(n, oversample));
  const std::uint64_t key = stream_key(seed, "inner-radius/" + dist.name() + "/" + std::to_string(n));
  InnerRadiusReport rep;
  rep.degree = n;
  rep.realizations = realizations;
  rep.per_realization.resize(static_cast<std::size_t>(realizations));
  CensusOptions census_options;
  census_options.component_geometry = true;
  parallel_for(rep.per_realization.size(), resolve_threads(options.threads), [&](std::size_t t) {
    RandomField field(basis, sample_coefficients(dist, n, rng::trial_seed(key, t)));
    const NodalCensus c = census_global(field, synth, census_options);
    double smallest = std::numeric_limits<double>::infinity();
    for (const ComponentInfo& comp : c.components) smallest = std::min(smallest, comp.inner_radius * n);
    rep.per_realization[t] = smallest;
  });
  rep.min_scaled = *std::min_element(rep.per_realization.begin(), rep.per_realization.end());
  return rep;
}

RefinementReport refinement_census(int n, int oversample, int realizations, const CoefficientDistribution& dist,
                                   std::uint64_t seed, const RunOptions& options) {
  if (realizations < 1) throw ConfigurationError("refinement: need at least one realization");
  const auto basis = HarmonicBasis::build(n);
  const SphereSynthesizer coarse(n, build_sphere_grid(n, oversample));
  const SphereSynthesizer fine(n, build_sphere_grid(n, 2 * oversample));
  const std::uint64_t key = stream_key(seed, "refinement/" + dist.name() + "/" + std::to_string(n));
  std::vector<std::uint8_t> same(static_cast<std::size_t>(realizations), 0);
  CensusOptions census_options;
  census_options.allow_resolution_override = true;
  parallel_for(same.size(), resolve_threads(options.threads), [&](std::size_t t) {
    RandomField field(basis, sample_coefficients(dist, n, rng::trial_seed(key, t)));
    const int a = census_global(field, coarse, census_options).count_total;
    const int b = census_global(field, fine, census_options).count_total;
    same[t] = a == b ? 1 : 0;
  });
  RefinementReport rep;
  rep.degree = n;
  rep.oversample = oversample;
  rep.realizations = realizations;
  for (std::size_t t = 0; t < same.size(); ++t) {
    if (same[t]) {
      ++rep.stable;
    } else {
      rep.flagged.push_back(t);
    }
  }
  return rep;
}

// ----------------------------------------------------------------- RWM

std::vector<TrialRecord> run_rwm_trials(const RwmConfig& config, const RunOptions& options) {
  if (config.radii.empty()) throw ConfigurationError("rwm: no radii");
  if (config.trials < 2) throw StatisticsError("rwm: need at least 2 trials per radius");
  for (double r : config.radii) {
    if (std::abs(r - std::round(r)) > 1e-9) throw ConfigurationError("rwm: radii must be integers");
  }
  const int threads = resolve_threads(options.threads);
  std::vector<TrialRecord> records;
  for (double radius : config.radii) {
    const std::uint64_t key = stream_key(config.seed, rwm_tag(config, radius));
    const std::size_t base = records.size();
    records.resize(base + static_cast<std::size_t>(config.trials));
    parallel_for(static_cast<std::size_t>(config.trials), threads, [&](std::size_t t) {
      const auto start = Clock::now();
      const std::uint64_t s = rng::trial_seed(key, t);
      const NodalCensus c = census_rwm(sample_rwm(config.waves, s), radius, config.oversample);
      TrialRecord& rec = records[base + t];
      rec.experiment = "rwm";
      rec.degree = static_cast<int>(std::lround(radius));
      rec.dist = rwm_dist(config);
      rec.trial_index = t;
      rec.seed = s;
      rec.count_total = c.count_total;
      rec.count_contained = c.count_contained;
      if (options.timing) rec.runtime_ms = elapsed_ms(start);
    });
  }
  return records;
}

RwmEstimate summarize_rwm(const RwmConfig& config, std::span<const TrialRecord> records) {
  RwmEstimate est;
  std::vector<std::vector<double>> groups;
  std::vector<double> xs;
  for (double radius : config.radii) {
    const int key = static_cast<int>(std::lround(radius));
    std::vector<double> y;
    for (const TrialRecord& r : records) {
      if (r.degree != key) continue;
      if (!r.count_contained) throw StatisticsError("rwm record without count_contained");
      y.push_back(*r.count_contained / (std::numbers::pi * radius * radius));
    }
    if (y.size() < 2) throw StatisticsError("rwm: radius " + std::to_string(key) + " has fewer than 2 records");
    RadiusSummary s;
    s.radius = radius;
    s.trials = static_cast<int>(y.size());
    s.mean_density = stats::mean(y);
    s.se = stats::standard_error(y);
    est.per_radius.push_back(s);
    est.n_trials += s.trials;
    groups.push_back(std::move(y));
    xs.push_back(1.0 / radius);
  }
  const GroupFit fit = fit_groups(groups, xs, config.fit_order, config.bootstrap, config.level,
                                  stream_key(config.seed, "bootstrap/" + rwm_dist(config)));
  est.c_hat = fit.coeff(0);
  est.c_hat_se = fit.se(0);
  est.coefficients = fit.coeffs;
  est.ci = fit.ci;
  if (groups.size() >= 3) {
    const GroupFit linear = fit_groups(groups, xs, 1, 1, config.level, 0);
    est.linear_c_hat = linear.coeff(0);
    est.linear_chi2 = linear.chi2;
    est.linear_dof = linear.dof;
  }
  return est;
}

RwmEstimate estimate_rwm(const RwmConfig& config, const RunOptions& options, std::vector<TrialRecord>* records) {
  std::vector<TrialRecord> recs = run_rwm_trials(config, options);
  RwmEstimate est = summarize_rwm(config, recs);
  if (records) *records = std::move(recs);
  return est;
}

}  // namespace nodal
