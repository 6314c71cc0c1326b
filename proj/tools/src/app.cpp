#include "nodal_cli/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numbers>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "nodal/error.hpp"
#include "nodal/rng.hpp"
#include "nodal/specfn.hpp"
#include "nodal_cli/records.hpp"

namespace nodal::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kFourPi = 4.0 * std::numbers::pi;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Json checks_json(std::span<const Check> checks) {
  Json arr = Json::array();
  for (const Check& c : checks) {
    Json j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["value"] = c.value;
    j["threshold"] = c.threshold.size() == 1 ? Json(c.threshold[0]) : Json(c.threshold);
    j["relation"] = c.relation;
    arr.push_back(std::move(j));
  }
  return arr;
}

Json base_object(double estimate, std::optional<double> se, std::optional<stats::Interval> ci, int n_trials,
                 std::span<const Check> checks) {
  Json j;
  j["estimate"] = estimate;
  j["se"] = se ? Json(*se) : Json(nullptr);
  j["ci_low"] = ci ? Json(ci->low) : Json(nullptr);
  j["ci_high"] = ci ? Json(ci->high) : Json(nullptr);
  j["n_trials"] = n_trials;
  j["checks"] = checks_json(checks);
  return j;
}

RunOptions run_options(const RunConfig& c) {
  RunOptions o;
  o.threads = c.get_int("threads");
  o.timing = c.get_bool("timing");
  return o;
}

BasisKind parse_basis(const std::string& s) {
  if (s == "standard") return BasisKind::Standard;
  if (s == "pole-rotated-pair") return BasisKind::PoleRotatedPair;
  throw ConfigurationError("unknown basis: " + s + " (expected standard or pole-rotated-pair)");
}

void require_records(bool replay, std::size_t got, std::size_t expected, bool strict, const std::string& what) {
  if (replay && strict && got != expected) {
    throw IntegrityError(what + ": expected " + std::to_string(expected) + " trial records, found " +
                         std::to_string(got) + " (truncated or foreign table)");
  }
}

void check_record_kind(const std::vector<TrialRecord>& records, const std::string& experiment) {
  for (const TrialRecord& r : records) {
    if (r.experiment != experiment) {
      throw IntegrityError("trial table holds '" + r.experiment + "' records, expected '" + experiment + "'");
    }
  }
}

Series fit_curve(const std::vector<double>& coeffs, double x_max, const std::string& label) {
  Series s;
  s.label = label;
  s.line = true;
  for (int i = 0; i <= 50; ++i) {
    const double x = x_max * i / 50.0;
    double y = 0.0;
    double p = 1.0;
    for (double c : coeffs) {
      y += c * p;
      p *= x;
    }
    s.x.push_back(x);
    s.y.push_back(y);
  }
  return s;
}

// ------------------------------------------------------------------ cns

void run_cns(const RunConfig& c, const std::vector<TrialRecord>* recorded, bool strict, ExperimentResult& res,
             Json& doc) {
  CnsConfig cfg;
  cfg.degrees = c.get_int_list("degrees");
  cfg.dist = CoefficientDistribution::parse(c.get_string("dist"));
  cfg.trials = c.get_int("trials");
  cfg.oversample = c.get_int("oversample");
  cfg.seed = c.get_seed("seed");
  cfg.basis = parse_basis(c.get_string("basis"));
  cfg.crofton_circles = c.get_int("crofton");
  cfg.bootstrap = c.get_int("bootstrap");
  cfg.level = c.get_real("level");
  res.records = recorded ? *recorded : run_cns_trials(cfg, run_options(c));
  require_records(recorded, res.records.size(), cfg.degrees.size() * static_cast<std::size_t>(cfg.trials), strict,
                  "cns");
  const CnsEstimate est = summarize_cns(cfg, res.records);
  res.checks = cns_checks(est);

  Json j = base_object(est.c_hat, est.c_hat_se, est.ci, est.n_trials, res.checks);
  j["normalized"] = {{"estimate", est.normalized()},
                     {"ci_low", est.normalized_ci().low},
                     {"ci_high", est.normalized_ci().high}};
  j["slope"] = est.slope;
  j["slope_se"] = est.slope_se;
  j["chi2"] = est.chi2;
  j["residual_sign_p"] = est.residual_sign_p;
  j["dist"] = cfg.dist.name();
  j["basis"] = to_string(cfg.basis);
  Json per = Json::array();
  for (const DegreeSummary& d : est.per_degree) {
    Json e{{"degree", d.degree}, {"trials", d.trials}, {"mean", d.mean}, {"se", d.se}, {"max_count", d.max_count}};
    if (d.mean_length_over_n) e["mean_length_over_n"] = *d.mean_length_over_n;
    per.push_back(std::move(e));
    res.report.push_back("  n=" + std::to_string(d.degree) + "  mean count/n^2 = " + fmt("%.6f", d.mean) +
                         " +- " + fmt("%.6f", d.se));
  }
  j["per_degree"] = std::move(per);
  doc["cns"] = std::move(j);
  res.report.push_back("cns: c_hat = " + fmt("%.6f", est.c_hat) + "  95% CI [" + fmt("%.6f", est.ci.low) + ", " +
                       fmt("%.6f", est.ci.high) + "]");
  res.report.push_back("cns: c_hat/4pi = " + fmt("%.6g", est.normalized()) + "  CI [" +
                       fmt("%.6g", est.normalized_ci().low) + ", " + fmt("%.6g", est.normalized_ci().high) + "]");

  Chart chart{"mean count / n^2 vs 1/n", "1/n", "count / n^2", {}};
  Series pts{"per-degree mean (95%)", {}, {}, {}, false};
  const double z = stats::normal_two_sided_quantile(cfg.level);
  double x_max = 0.0;
  for (const DegreeSummary& d : est.per_degree) {
    pts.x.push_back(1.0 / d.degree);
    pts.y.push_back(d.mean);
    pts.err.push_back(z * d.se);
    x_max = std::max(x_max, 1.0 / d.degree);
  }
  chart.series.push_back(pts);
  chart.series.push_back(fit_curve({est.c_hat, est.slope}, x_max, "fit c + b/n"));
  chart.series.push_back(
      {"intercept CI", {0.0}, {0.5 * (est.ci.low + est.ci.high)}, {0.5 * (est.ci.high - est.ci.low)}, false});
  res.plots.emplace_back("cns.svg", std::move(chart));
}

// --------------------------------------------------------- universality

void run_universality(const RunConfig& c, const std::vector<TrialRecord>* recorded, bool strict,
                      ExperimentResult& res, Json& doc) {
  UniversalityConfig cfg;
  cfg.degree = c.get_int("n");
  cfg.dist_a = CoefficientDistribution::parse(c.get_string("dist-a"));
  cfg.dist_b = CoefficientDistribution::parse(c.get_string("dist-b"));
  cfg.trials = c.get_int("trials");
  cfg.oversample = c.get_int("oversample");
  cfg.seed = c.get_seed("seed");
  cfg.bootstrap = c.get_int("bootstrap");
  cfg.level = c.get_real("level");
  res.records = recorded ? *recorded : run_universality_trials(cfg, run_options(c));
  require_records(recorded, res.records.size(), 2 * static_cast<std::size_t>(cfg.trials), strict, "universality");
  const UniversalityReport rep = summarize_universality(cfg, res.records);
  res.checks = universality_checks(rep);

  Json j = base_object(rep.difference, rep.welch.se, rep.ci, rep.trials_a + rep.trials_b, res.checks);
  j["dist_a"] = cfg.dist_a.name();
  j["dist_b"] = cfg.dist_b.name();
  j["degree"] = cfg.degree;
  j["mean_a"] = rep.mean_a;
  j["mean_b"] = rep.mean_b;
  j["se_a"] = rep.se_a;
  j["se_b"] = rep.se_b;
  j["welch_t"] = rep.welch.t;
  j["welch_dof"] = rep.welch.dof;
  j["consistent_with_universality"] = rep.consistent;
  j["small_degree_warning"] = rep.small_degree;
  doc["universality"] = std::move(j);
  res.report.push_back("universality: n=" + std::to_string(cfg.degree) + "  " + cfg.dist_a.name() + " " +
                       fmt("%.6f", rep.mean_a) + " vs " + cfg.dist_b.name() + " " + fmt("%.6f", rep.mean_b));
  res.report.push_back("universality: difference = " + fmt("%.6f", rep.difference) + "  CI [" +
                       fmt("%.6f", rep.ci.low) + ", " + fmt("%.6f", rep.ci.high) + "]  Welch t = " +
                       fmt("%.3f", rep.welch.t) + (rep.consistent ? "  consistent" : "  NOT consistent"));
  if (rep.small_degree) {
    res.report.push_back("warning: n < 20, finite-degree corrections dominate the comparison");
  }
}

// ------------------------------------------------------------------ clt

void run_clt(const RunConfig& c, ExperimentResult& res, Json& doc) {
  const auto degrees = c.get_int_list("degrees");
  const auto dist = CoefficientDistribution::parse(c.get_string("dist"));
  const int samples = c.get_int("samples");
  std::vector<KsPoint> pts;
  for (int n : degrees) pts.push_back({n, clt_diagnostic(n, dist, samples, c.get_seed("seed"), run_options(c))});
  res.checks = clt_checks(pts, dist.kind() == DistributionKind::Gaussian);
  Json j = base_object(pts.empty() ? 0.0 : pts.back().ks, std::nullopt, std::nullopt,
                       samples * static_cast<int>(degrees.size()), res.checks);
  j["dist"] = dist.name();
  j["samples"] = samples;
  Json per = Json::array();
  Chart chart{"KS distance of f_n(x) to N(0,1)", "n", "KS distance", {}};
  Series s{dist.name(), {}, {}, {}, false};
  for (const KsPoint& p : pts) {
    per.push_back({{"degree", p.degree}, {"ks", p.ks}});
    s.x.push_back(p.degree);
    s.y.push_back(p.ks);
    res.report.push_back("clt: n=" + std::to_string(p.degree) + "  KS = " + fmt("%.5f", p.ks));
  }
  j["per_degree"] = std::move(per);
  doc["clt"] = std::move(j);
  chart.series.push_back(s);
  s.line = true;
  s.label = "";
  chart.series.push_back(s);
  res.plots.emplace_back("clt.svg", std::move(chart));
}

// ----------------------------------------------------------- covariance

void run_covariance(const RunConfig& c, ExperimentResult& res, Json& doc) {
  const auto degrees = c.get_int_list("degrees");
  const double radius = c.get_real("radius");
  const auto dist = CoefficientDistribution::parse(c.get_string("dist"));
  const int trials = c.get_int("trials");
  const auto pairs = default_covariance_pairs(radius);
  std::vector<CovariancePoint> pts;
  for (int n : degrees) pts.push_back(covariance_check(n, radius, dist, pairs, trials, c.get_seed("seed"),
                                                       run_options(c)));
  res.checks = covariance_checks(pts);
  Json j = base_object(pts.empty() ? 0.0 : pts.back().max_deviation,
                       pts.empty() ? std::optional<double>() : pts.back().se_at_max, std::nullopt,
                       trials * static_cast<int>(degrees.size()), res.checks);
  j["radius"] = radius;
  j["dist"] = dist.name();
  Json per = Json::array();
  Chart chart{"patch covariance vs J0(R|y1-y2|)", "R |y1 - y2|", "covariance", {}};
  Series j0{"J0", {}, {}, {}, true};
  for (int i = 0; i <= 100; ++i) {
    const double u = 2.0 * radius * i / 100.0;
    j0.x.push_back(u);
    j0.y.push_back(specfn::bessel_j0(u));
  }
  chart.series.push_back(j0);
  for (const CovariancePoint& p : pts) {
    Json entries = Json::array();
    Series s{"n=" + std::to_string(p.degree), {}, {}, {}, false};
    for (const CovarianceEntry& e : p.entries) {
      entries.push_back({{"pair", e.pair},
                         {"order", e.order},
                         {"empirical", e.empirical},
                         {"target", e.target},
                         {"se", e.se}});
      if (e.order == 0) {
        const PatchPair& pr = pairs[static_cast<std::size_t>(e.pair)];
        s.x.push_back(radius * std::hypot(pr.y1[0] - pr.y2[0], pr.y1[1] - pr.y2[1]));
        s.y.push_back(e.empirical);
        s.err.push_back(1.96 * e.se);
      }
    }
    per.push_back({{"degree", p.degree},
                   {"trials", p.trials},
                   {"max_deviation", p.max_deviation},
                   {"se_at_max", p.se_at_max},
                   {"entries", std::move(entries)}});
    chart.series.push_back(std::move(s));
    res.report.push_back("covariance: n=" + std::to_string(p.degree) + "  max deviation = " +
                         fmt("%.5f", p.max_deviation) + " (se " + fmt("%.5f", p.se_at_max) + ")");
  }
  j["per_degree"] = std::move(per);
  doc["covariance"] = std::move(j);
  res.plots.emplace_back("covariance.svg", std::move(chart));
}

// ---------------------------------------------------------- diagnostics

void run_diagnostics(const RunConfig& c, ExperimentResult& res, Json& doc) {
  const auto dist = CoefficientDistribution::parse(c.get_string("dist"));
  const std::uint64_t seed = c.get_seed("seed");
  const RunOptions opts = run_options(c);

  std::vector<L4Report> l4;
  for (int n : c.get_int_list("l4-degrees")) l4.push_back(l4_census(*HarmonicBasis::build(n), 2 * n + 1));
  const auto l4c = l4_checks(l4);
  {
    double worst = 0.0;
    Json per = Json::array();
    for (const L4Report& r : l4) {
      worst = std::max(worst, r.ratio);
      per.push_back({{"degree", r.degree}, {"max_l4", r.max_l4}, {"argmax", r.argmax}, {"ratio", r.ratio}});
      res.report.push_back("l4: n=" + std::to_string(r.degree) + "  max_k int Y_k^4 = " + fmt("%.4f", r.max_l4) +
                           "  ratio = " + fmt("%.4f", r.ratio));
    }
    Json j = base_object(worst, std::nullopt, std::nullopt, static_cast<int>(l4.size()), l4c);
    j["per_degree"] = std::move(per);
    doc["l4"] = std::move(j);
  }

  const double k = c.get_real("badset-k");
  const double bad_r = c.get_real("badset-radius");
  const int points = c.get_int("points");
  std::vector<BadSetReport> bad, bad_baseline;
  for (int n : c.get_int_list("badset-degrees")) {
    const double ks[] = {k, 10.0};
    const auto r = badset_census(n, std::span<const double>(ks), bad_r, points, seed, BasisKind::Standard, opts);
    bad.push_back(r[0]);
    bad_baseline.push_back(r[1]);
  }
  const auto badc = badset_checks(bad);
  {
    Json per = Json::array();
    for (std::size_t i = 0; i < bad.size(); ++i) {
      per.push_back({{"degree", bad[i].degree},
                     {"fraction_values", bad[i].fraction_values},
                     {"fraction_gradients", bad[i].fraction_gradients},
                     {"baseline_k10_fraction_values", bad_baseline[i].fraction_values},
                     {"baseline_k10_fraction_gradients", bad_baseline[i].fraction_gradients}});
      res.report.push_back("bad set: n=" + std::to_string(bad[i].degree) + "  K=" + fmt("%g", k) +
                           "  fraction = " + fmt("%.4f", bad[i].fraction_values) + " (gradients " +
                           fmt("%.4f", bad[i].fraction_gradients) + ")");
    }
    Json j = base_object(bad.empty() ? 0.0 : bad.back().fraction_values, std::nullopt, std::nullopt,
                         points * static_cast<int>(bad.size()), badc);
    j["K"] = k;
    j["radius"] = bad_r;
    j["per_degree"] = std::move(per);
    doc["bad_set"] = std::move(j);
  }

  std::vector<LocalSupSweep> sup;
  for (int n : c.get_int_list("sup-degrees")) {
    sup.push_back(local_sup_sweep(n, c.get_real("sup-radius"), c.get_int("draws"), dist, seed, opts));
  }
  const auto supc = local_sup_checks(sup);
  {
    double worst = 0.0;
    Json per = Json::array();
    for (const LocalSupSweep& s : sup) {
      worst = std::max(worst, s.max_ratio);
      per.push_back({{"degree", s.degree}, {"draws", s.draws}, {"max_ratio", s.max_ratio},
                     {"mean_ratio", s.mean_ratio}});
      res.report.push_back("local sup: n=" + std::to_string(s.degree) + "  max ratio = " +
                           fmt("%.4f", s.max_ratio) + "  mean = " + fmt("%.4f", s.mean_ratio));
    }
    Json j = base_object(worst, std::nullopt, std::nullopt, c.get_int("draws") * static_cast<int>(sup.size()), supc);
    j["radius"] = c.get_real("sup-radius");
    j["per_degree"] = std::move(per);
    doc["local_sup"] = std::move(j);
  }

  const int sn = c.get_int("semilocal-degree");
  const RandomField field(HarmonicBasis::build(sn),
                          sample_coefficients(dist, sn, rng::trial_seed(stream_key(seed, "semilocal-field"), 0)));
  std::vector<SemilocalReport> semi;
  for (double r : c.get_real_list("semilocal-radii")) {
    semi.push_back(semilocal_check(field, r, c.get_int("centers"), seed, opts, c.get_int("oversample")));
  }
  const auto semic = semilocal_checks(semi);
  {
    double worst = 0.0;
    Json per = Json::array();
    for (const SemilocalReport& s : semi) {
      worst = std::max(worst, s.ratio);
      per.push_back({{"radius", s.radius},
                     {"global_count", s.global_count},
                     {"mean_contained", s.mean_contained},
                     {"se_contained", s.se_contained},
                     {"reconstructed", s.reconstructed},
                     {"ratio", s.ratio}});
      res.report.push_back("semi-locality: n=" + std::to_string(sn) + " R=" + fmt("%g", s.radius) + "  N = " +
                           std::to_string(s.global_count) + "  reconstructed = " + fmt("%.1f", s.reconstructed) +
                           "  ratio = " + fmt("%.4f", s.ratio));
    }
    Json j = base_object(worst, std::nullopt, std::nullopt, c.get_int("centers") * static_cast<int>(semi.size()),
                         semic);
    j["degree"] = sn;
    j["per_radius"] = std::move(per);
    doc["semilocal"] = std::move(j);
  }

  std::vector<InnerRadiusReport> inner;
  for (int n : c.get_int_list("inner-degrees")) {
    inner.push_back(inner_radius_census(n, c.get_int("realizations"), dist, c.get_int("oversample"), seed, opts));
  }
  const auto innerc = inner_radius_checks(inner);
  {
    double lowest = std::numeric_limits<double>::infinity();
    Json per = Json::array();
    for (const InnerRadiusReport& r : inner) {
      lowest = std::min(lowest, r.min_scaled);
      per.push_back({{"degree", r.degree}, {"realizations", r.realizations}, {"min_scaled", r.min_scaled}});
      res.report.push_back("inner radius: n=" + std::to_string(r.degree) + "  min radius*n = " +
                           fmt("%.4f", r.min_scaled));
    }
    Json j = base_object(inner.empty() ? 0.0 : lowest, std::nullopt, std::nullopt,
                         c.get_int("realizations") * static_cast<int>(inner.size()), innerc);
    j["per_degree"] = std::move(per);
    doc["inner_radius"] = std::move(j);
  }

  for (const auto* group : {&l4c, &badc, &supc, &semic, &innerc}) {
    res.checks.insert(res.checks.end(), group->begin(), group->end());
  }
}

// ------------------------------------------------------------------ rwm

void run_rwm(const RunConfig& c, const std::vector<TrialRecord>* recorded, bool strict, ExperimentResult& res,
             Json& doc) {
  RwmConfig cfg;
  cfg.radii = c.get_real_list("radii");
  cfg.waves = c.get_int("waves");
  cfg.trials = c.get_int("trials");
  cfg.oversample = c.get_int("oversample");
  cfg.seed = c.get_seed("seed");
  cfg.bootstrap = c.get_int("bootstrap");
  cfg.level = c.get_real("level");
  cfg.fit_order = c.get_int("fit-order");
  res.records = recorded ? *recorded : run_rwm_trials(cfg, run_options(c));
  require_records(recorded, res.records.size(), cfg.radii.size() * static_cast<std::size_t>(cfg.trials), strict,
                  "rwm");
  const RwmEstimate est = summarize_rwm(cfg, res.records);
  res.checks = rwm_checks(est);
  Json j = base_object(est.c_hat, est.c_hat_se, est.ci, est.n_trials, res.checks);
  j["waves"] = cfg.waves;
  j["fit_order"] = cfg.fit_order;
  j["coefficients"] = est.coefficients;
  if (est.linear_c_hat) {
    j["linear_fit"] = {{"estimate", *est.linear_c_hat}, {"chi2", est.linear_chi2}, {"dof", est.linear_dof}};
  }
  Json per = Json::array();
  Chart chart{"mean contained count / (pi R^2) vs 1/R", "1/R", "density", {}};
  Series pts{"per-radius mean (95%)", {}, {}, {}, false};
  const double z = stats::normal_two_sided_quantile(cfg.level);
  double x_max = 0.0;
  for (const RadiusSummary& s : est.per_radius) {
    per.push_back({{"radius", s.radius}, {"trials", s.trials}, {"mean_density", s.mean_density}, {"se", s.se}});
    pts.x.push_back(1.0 / s.radius);
    pts.y.push_back(s.mean_density);
    pts.err.push_back(z * s.se);
    x_max = std::max(x_max, 1.0 / s.radius);
    res.report.push_back("rwm: R=" + fmt("%g", s.radius) + "  density = " + fmt("%.6f", s.mean_density) + " +- " +
                         fmt("%.6f", s.se));
  }
  j["per_radius"] = std::move(per);
  doc["rwm"] = std::move(j);
  res.report.push_back("rwm: planar c_NS = " + fmt("%.6f", est.c_hat) + "  95% CI [" + fmt("%.6f", est.ci.low) +
                       ", " + fmt("%.6f", est.ci.high) + "]");
  chart.series.push_back(pts);
  chart.series.push_back(fit_curve(est.coefficients, x_max, "polynomial fit in 1/R"));
  res.plots.emplace_back("rwm.svg", std::move(chart));
}

// ----------------------------------------------------------- demo-basis

Json support_json(const PoleSample& s) {
  Json arr = Json::array();
  for (const SupportEntry& e : s.support) arr.push_back({{"value", e.value}, {"frequency", e.frequency}});
  return arr;
}

std::string support_text(const PoleSample& s, int trials) {
  if (s.support.empty()) return "continuous (more than 16 distinct values)";
  std::string out = "{";
  for (std::size_t i = 0; i < s.support.size(); ++i) {
    if (i) out += ", ";
    out += fmt("%.17g", s.support[i].value) + ": " + fmt("%.4f", static_cast<double>(s.support[i].frequency) / trials);
  }
  return out + "}";
}

void run_demo(const RunConfig& c, ExperimentResult& res, Json& doc) {
  const auto dist = CoefficientDistribution::parse(c.get_string("dist"));
  const int trials = c.get_int("trials");
  const BasisDemoReport rep = basis_dependence_demo(c.get_int("n"), trials, dist, c.get_seed("seed"));
  res.checks = demo_checks(rep, dist.kind() == DistributionKind::Rademacher);
  Json j = base_object(rep.ks_between, std::nullopt, std::nullopt, 2 * trials, res.checks);
  j["degree"] = rep.degree;
  j["dist"] = rep.dist;
  j["standard"] = {{"basis", to_string(rep.standard.basis)}, {"support", support_json(rep.standard)}};
  j["rotated"] = {{"basis", to_string(rep.rotated.basis)}, {"support", support_json(rep.rotated)}};
  doc["demo_basis"] = std::move(j);
  res.report.push_back("demo-basis: n=" + std::to_string(rep.degree) + " " + rep.dist + ", " +
                       std::to_string(trials) + " trials per basis");
  res.report.push_back("  standard basis pole values: " + support_text(rep.standard, trials));
  res.report.push_back("  rotated basis pole values:  " + support_text(rep.rotated, trials));
  res.report.push_back("  KS distance between bases = " + fmt("%.5f", rep.ks_between));
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& config, const std::vector<TrialRecord>* recorded,
                                const std::string& mismatched_hash) {
  ExperimentResult res;
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["config_hash"] = config.hash();
  doc["experiment"] = config.experiment();
  const std::string& e = config.experiment();
  // With a tampered config the expected record count is not trustworthy.
  const bool strict = mismatched_hash.empty();
  if (recorded) check_record_kind(*recorded, e);
  if (e == "cns") {
    run_cns(config, recorded, strict, res, doc);
  } else if (e == "universality") {
    run_universality(config, recorded, strict, res, doc);
  } else if (e == "rwm") {
    run_rwm(config, recorded, strict, res, doc);
  } else {
    if (recorded && !recorded->empty()) throw IntegrityError(e + " runs do not store trial records");
    if (e == "clt") {
      run_clt(config, res, doc);
    } else if (e == "covariance") {
      run_covariance(config, res, doc);
    } else if (e == "diagnostics") {
      run_diagnostics(config, res, doc);
    } else if (e == "demo-basis") {
      run_demo(config, res, doc);
    } else {
      throw ConfigError("unknown experiment: " + e);
    }
  }
  doc["all_checks_pass"] = all_pass(res.checks);
  if (!mismatched_hash.empty()) {
    doc["integrity"] = {{"config_hash_mismatch", true}, {"recorded_config_hash", mismatched_hash}};
  }
  res.summary_json = doc.dump(2) + "\n";
  return res;
}

namespace {

void print_checks(const std::vector<Check>& checks, std::ostream& out) {
  for (const Check& c : checks) {
    std::string thr;
    for (std::size_t i = 0; i < c.threshold.size(); ++i) thr += (i ? ", " : "") + fmt("%.6g", c.threshold[i]);
    out << "check " << c.name << ": " << (c.pass ? "PASS" : "FAIL") << "  value = " << fmt("%.6g", c.value) << "  "
        << c.relation << " [" << thr << "]\n";
  }
}

std::string trials_file(const RunConfig& c) { return c.get_string("format") == "json" ? "trials.json" : "trials.csv"; }

}  // namespace

int run_to_directory(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const std::string format = config.get_string("format");
  if (format != "csv" && format != "json") throw ConfigError("format must be csv or json, not " + format);
  const std::filesystem::path dir(config.get_string("out"));
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw OutputError("cannot create output directory " + dir.string());
  }
  // Fail on an unwritable directory before spending time on trials.
  write_file((dir / kConfigFile).string(), "# config_hash = " + config.hash() + "\n" + config.serialize());

  const ExperimentResult res = run_experiment(config);
  const std::string hash = config.hash();
  write_file((dir / trials_file(config)).string(), format == "json" ? format_trials_json(hash, res.records)
                                                                    : format_trials_csv(hash, res.records));
  write_file((dir / kSummaryFile).string(), res.summary_json);
  for (const auto& [name, chart] : res.plots) {
    try {
      write_file((dir / name).string(), render_svg(chart));
    } catch (const std::exception& e) {
      err << "warning: plot " << name << " skipped: " << e.what() << "\n";
    }
  }
  for (const std::string& line : res.report) out << line << "\n";
  print_checks(res.checks, out);
  out << "config_hash " << hash << "; wrote " << dir.string() << "\n";
  if (config.get_bool("check") && !all_pass(res.checks)) return kExitCheckFailed;
  return kExitOk;
}

ReplayOutcome replay_directory(const std::string& dir_text, std::ostream& err, int threads) {
  const std::filesystem::path dir(dir_text);
  auto read = [&](const char* name) {
    const std::filesystem::path p = dir / name;
    if (!std::filesystem::exists(p)) throw IntegrityError("replay: missing " + p.string());
    return read_text_file(p.string());
  };
  RunConfig config;
  try {
    config = RunConfig::parse(read(kConfigFile));
  } catch (const ConfigError& e) {
    throw IntegrityError(std::string("replay: unreadable config: ") + e.what());
  }
  if (threads > 0) config.set("threads", std::to_string(threads));
  const std::string original = read(kSummaryFile);
  nlohmann::json stored;
  try {
    stored = nlohmann::json::parse(original);
  } catch (const nlohmann::json::parse_error& e) {
    throw IntegrityError(std::string("replay: summary.json: ") + e.what());
  }
  if (!stored.is_object() || !stored.contains("schema_version") || stored["schema_version"] != kSchemaVersion) {
    throw SchemaError("replay: summary.json has an unsupported schema_version");
  }
  const std::string stored_hash = stored.value("config_hash", std::string());

  const bool json_trials = std::filesystem::exists(dir / "trials.json") && !std::filesystem::exists(dir / "trials.csv");
  const TrialTable table =
      json_trials ? parse_trials_json(read("trials.json")) : parse_trials_csv(read("trials.csv"));

  const std::string hash = config.hash();
  std::string recorded = stored_hash;
  if (!table.config_hash.empty() && table.config_hash != stored_hash) recorded = table.config_hash;
  ReplayOutcome outcome;
  outcome.hash_mismatch = recorded != hash;
  if (outcome.hash_mismatch) {
    err << "warning: config hash mismatch: config.txt hashes to " << hash << " but the run recorded " << recorded
        << "; recomputing with the current config\n";
  }
  const ExperimentResult res = run_experiment(config, &table.records, outcome.hash_mismatch ? recorded : "");
  outcome.summary_json = res.summary_json;
  outcome.identical = res.summary_json == original;
  return outcome;
}

namespace {

int map_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitIntegrity;
  } catch (const IntegrityError& e) {
    err << "integrity error: " << e.what() << "\n";
    return kExitIntegrity;
  } catch (const OutputError& e) {
    err << "output error: " << e.what() << "\n";
    return kExitOutput;
  } catch (const ConfigurationError& e) {
    err << "invalid parameters: " << e.what() << "\n";
    return kExitInvalidParameter;
  } catch (const DomainError& e) {
    err << "invalid parameters: " << e.what() << "\n";
    return kExitInvalidParameter;
  } catch (const UnsupportedDegreeError& e) {
    err << "invalid parameters: " << e.what() << "\n";
    return kExitInvalidParameter;
  } catch (const DimensionError& e) {
    err << "invalid parameters: " << e.what() << "\n";
    return kExitInvalidParameter;
  } catch (const StatisticsError& e) {
    err << "statistics error: " << e.what() << "\n";
    return kExitStatistics;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nodal domain censuses of random spherical harmonics and random plane waves", "nodal-census"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
    std::map<std::string, CLI::Option*> options;
    std::string config_file;
  };
  std::map<std::string, Sub> subs;
  for (const std::string& name : experiment_names()) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, "run the " + name + " experiment");
    s.app->add_option("--config", s.config_file, "key = value config file; flags override it");
    for (const ParamSpec& p : experiment_schema(name)) {
      const std::string flag = "--" + p.key;
      const std::string help = p.help + " (default " + p.default_value + ")";
      if (p.type == ParamType::Bool) {
        s.options[p.key] = s.app->add_flag(flag, s.flags[p.key], help);
      } else {
        s.options[p.key] = s.app->add_option(flag, s.values[p.key], help);
      }
    }
  }
  std::string replay_path;
  std::string replay_out;
  int replay_threads = 0;
  CLI::App* replay = app.add_subcommand("replay", "recompute the summary of a finished run");
  replay->add_option("path", replay_path, "run directory")->required();
  replay->add_option("--out", replay_out, "where to write the recomputed summary (default <path>/summary.replay.json)");
  replay->add_option("--threads", replay_threads, "worker threads");

  if (argc > 1 && argv[1][0] != '-') {
    const std::string first = argv[1];
    const auto names = experiment_names();
    if (first != "replay" && std::find(names.begin(), names.end(), first) == names.end()) {
      err << "error: unknown experiment '" << first << "'\n";
      return kExitUsage;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (replay->parsed()) {
      const ReplayOutcome r = replay_directory(replay_path, err, replay_threads);
      const std::string target =
          replay_out.empty() ? (std::filesystem::path(replay_path) / kReplayFile).string() : replay_out;
      write_file(target, r.summary_json);
      out << "replay: wrote " << target << "\n";
      if (r.identical) {
        out << "replay: summary identical to the original\n";
        return kExitOk;
      }
      if (r.hash_mismatch) {
        out << "replay: summary recomputed under a modified config (flagged in output)\n";
        return kExitOk;
      }
      out << "replay: summary DIFFERS from the original\n";
      return kExitCheckFailed;
    }
    for (auto& [name, s] : subs) {
      if (!s.app->parsed()) continue;
      RunConfig config(name);
      if (!s.config_file.empty()) config.apply_file(read_text_file(s.config_file));
      for (const ParamSpec& p : experiment_schema(name)) {
        if (s.options[p.key]->count() == 0) continue;
        config.set(p.key, p.type == ParamType::Bool ? (s.flags[p.key] ? "true" : "false") : s.values[p.key]);
      }
      return run_to_directory(config, out, err);
    }
  } catch (...) {
    return map_exception(err);
  }
  err << "error: no experiment selected\n";
  return kExitUsage;
}

}  // namespace nodal::cli
