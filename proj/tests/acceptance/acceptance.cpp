// Acceptance runner: one PASS/FAIL line per criterion, details indented below.
// Usage: acceptance [--only 1,5,11] [--threads N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nodal/experiments.hpp"
#include "nodal/nodal.hpp"
#include "nodal/rng.hpp"
#include "nodal/specfn.hpp"
#include "nodal_cli/app.hpp"
#include "nodal_cli/checks.hpp"
#include "nodal_cli/config.hpp"
#include "nodal_cli/records.hpp"

using namespace nodal;
using namespace nodal::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
  void add(const std::vector<Check>& checks, const std::string& prefix = "") {
    for (const Check& c : checks) {
      std::string thr;
      for (std::size_t i = 0; i < c.threshold.size(); ++i) thr += (i ? ", " : "") + fmt(c.threshold[i]);
      require(c.pass, prefix + c.name + ": " + fmt(c.value) + " " + c.relation + " [" + thr + "]");
    }
  }
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }
};

using Clock = std::chrono::steady_clock;
RunOptions g_opts;

std::string f6(double v) { return Outcome::fmt(v); }

// 1. Addition theorem on random point pairs.
Outcome addition_theorem() {
  Outcome o;
  rng::CounterStream s(rng::hash_string("acceptance/addition"));
  for (int n : {10, 40, 100}) {
    const auto b = HarmonicBasis::build(n);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const SpherePoint x = uniform_sphere_point(s.uniform(), s.uniform());
      const SpherePoint y = uniform_sphere_point(s.uniform(), s.uniform());
      const auto yx = b->eval(x), yy = b->eval(y);
      double sum = 0.0;
      for (std::size_t k = 0; k < b->size(); ++k) sum += yx[k] * yy[k];
      worst = std::max(worst, std::abs(sum / (2 * n + 1) - specfn::legendre_p(n, cos_angle(x, y))));
    }
    o.require(worst < 1e-10, "n=" + std::to_string(n) + ": max error " + f6(worst) + " < 1e-10");
  }
  return o;
}

// 2. Exact oracles.
Outcome exact_oracles() {
  Outcome o;
  double worst = 0.0;
  for (int n = 0; n <= 200; ++n) worst = std::max(worst, std::abs(specfn::legendre_p(n, 1.0) - 1.0));
  o.require(worst < 1e-12, "max_n<=200 |P_n(1) - 1| = " + f6(worst) + " < 1e-12");
  for (int n : {5, 20, 50}) {
    auto b = HarmonicBasis::build(n);
    std::vector<double> c(b->size(), 0.0);
    c[b->index(0)] = 1.0;
    const int count = census_global(RandomField(b, c), build_sphere_grid(n, kMinCensusOversample)).count_total;
    o.require(count == n + 1, "zonal n=" + std::to_string(n) + ": " + std::to_string(count) + " domains == " +
                                  std::to_string(n + 1));
  }
  bool all_two = true;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const RandomField f(HarmonicBasis::build(1), sample_coefficients(CoefficientDistribution::gaussian(), 1, t));
    all_two = all_two && census_global(f, build_sphere_grid(1, kMinCensusOversample)).count_total == 2;
  }
  o.require(all_two, "degree 1: 20 random fields, every census == 2");
  auto b1 = HarmonicBasis::build(1);
  std::vector<double> c1(3, 0.0);
  c1[b1->index(0)] = 1.0;
  const double len = nodal_length_crofton(RandomField(b1, c1), 1000, 1);
  const double rel = std::abs(len / (2 * std::numbers::pi) - 1.0);
  o.require(rel < 0.02, "Crofton equator length " + f6(len) + ", relative error " + f6(rel) + " < 0.02");
  return o;
}

// 3. Hilb envelope flat in n.
Outcome hilb_asymptotic() {
  Outcome o;
  std::vector<double> env;
  for (int n : {50, 100, 200}) {
    double worst = 0.0;
    const double lo = 10.0 / n, hi = std::numbers::pi / 2;
    for (int i = 0; i <= 20000; ++i) {
      const double t = lo + (hi - lo) * i / 20000.0;
      worst = std::max(worst, std::abs(specfn::hilb_residual(n, t)) / (std::sqrt(t) * std::pow(n, -1.5)));
    }
    env.push_back(worst);
    o.note("n=" + std::to_string(n) + ": max |F| / (theta^1/2 n^-3/2) = " + f6(worst));
  }
  const double spread = *std::max_element(env.begin(), env.end()) / *std::min_element(env.begin(), env.end());
  o.require(spread < 3.0, "envelope spread " + f6(spread) + " < 3 (prefactor " +
                              (specfn::kDefaultHilbPrefactor == specfn::HilbPrefactor::SquareRoot ? "square-root" : "linear") +
                              ")");
  return o;
}

// 4. Universality at n = 60.
Outcome universality() {
  Outcome o;
  for (const char* other : {"rademacher", "uniform"}) {
    UniversalityConfig c;
    c.degree = 60;
    c.trials = 400;
    c.seed = 7;
    c.dist_b = CoefficientDistribution::parse(other);
    const UniversalityReport r = universality_test(c, g_opts);
    o.note(std::string("gaussian vs ") + other + ": means " + f6(r.mean_a) + " vs " + f6(r.mean_b) +
           ", Welch t = " + f6(r.welch.t));
    o.add(universality_checks(r), std::string("gaussian vs ") + other + ": ");
  }
  return o;
}

// 5. c_NS envelope, spherical and planar.
Outcome cns_envelope() {
  Outcome o;
  CnsConfig c;
  c.seed = 7;
  const CnsEstimate s = estimate_cns(c, g_opts);
  o.note("sphere: c_hat = " + f6(s.c_hat) + " CI [" + f6(s.ci.low) + ", " + f6(s.ci.high) + "], c_hat/4pi = " +
         f6(s.normalized()));
  o.add(cns_checks(s), "sphere: ");
  RwmConfig r;
  r.trials = 4000;
  r.seed = 7;
  const RwmEstimate p = estimate_rwm(r, g_opts);
  o.note("plane: c_hat = " + f6(p.c_hat) + " CI [" + f6(p.ci.low) + ", " + f6(p.ci.high) + "] (fit order " +
         std::to_string(r.fit_order) + ")");
  o.add(rwm_checks(p), "plane: ");
  o.add({planar_spherical_agreement(s, p)});
  return o;
}

// 6. CLT diagnostic.
Outcome clt() {
  Outcome o;
  const auto rad = CoefficientDistribution::rademacher();
  std::vector<KsPoint> trend;
  for (int n : {10, 40, 160}) trend.push_back({n, clt_diagnostic(n, rad, 4'000'000, 1, g_opts)});
  for (const KsPoint& p : trend) o.note("rademacher n=" + std::to_string(p.degree) + " (4e6 samples): KS = " + f6(p.ks));
  const auto trend_checks = clt_checks(trend, false);
  o.add({trend_checks[0]}, "4e6 samples: ");
  const double ks160 = clt_diagnostic(160, rad, 2000, 1, g_opts);
  o.require(ks160 < 0.05, "rademacher n=160, 2000 samples: KS = " + f6(ks160) + " < 0.05");
  std::vector<KsPoint> gauss;
  for (int n : {10, 40, 160}) gauss.push_back({n, clt_diagnostic(n, CoefficientDistribution::gaussian(), 20000, 1, g_opts)});
  o.add(clt_checks(gauss, true), "gaussian 20000 samples: ");
  return o;
}

// 7. Covariance convergence.
Outcome covariance() {
  Outcome o;
  const double R = 10.0;
  const auto pairs = default_covariance_pairs(R);
  std::vector<CovariancePoint> pts;
  for (int n : {40, 80, 160}) {
    pts.push_back(covariance_check(n, R, CoefficientDistribution::gaussian(), pairs, 10000, 7, g_opts));
    o.note("n=" + std::to_string(n) + ": max deviation " + f6(pts.back().max_deviation) + " (se " +
           f6(pts.back().se_at_max) + ")");
  }
  o.add(covariance_checks(pts));
  return o;
}

// 8. Semi-locality on single realizations.
Outcome semilocality() {
  Outcome o;
  const int n = 80;
  const auto basis = HarmonicBasis::build(n);
  const auto dist = CoefficientDistribution::gaussian();
  for (std::uint64_t t = 0; t < 3; ++t) {
    const RandomField f(basis, sample_coefficients(dist, n, rng::trial_seed(stream_key(7, "semilocal-field"), t)));
    std::vector<SemilocalReport> reps;
    for (double R : {10.0, 20.0}) reps.push_back(semilocal_check(f, R, 500, 7 + t, g_opts));
    o.note("realization " + std::to_string(t) + ": N = " + std::to_string(reps[0].global_count) + ", ratio " +
           f6(reps[0].ratio) + " (R=10), " + f6(reps[1].ratio) + " (R=20)");
    o.add(semilocal_checks(reps), "realization " + std::to_string(t) + ": ");
  }
  return o;
}

// 9. Basis-dependence demo.
Outcome basis_demo() {
  Outcome o;
  o.add(demo_checks(basis_dependence_demo(25, 2000, CoefficientDistribution::rademacher(), 3), true), "rademacher: ");
  o.add(demo_checks(basis_dependence_demo(25, 20000, CoefficientDistribution::gaussian(), 3), false), "gaussian: ");
  return o;
}

// 10. Inequality diagnostics.
Outcome inequalities() {
  Outcome o;
  std::vector<L4Report> l4;
  for (int n : {20, 40, 80, 160}) {
    l4.push_back(l4_census(*HarmonicBasis::build(n), 2 * n + 1));
    o.note("L4 n=" + std::to_string(n) + ": ratio " + f6(l4.back().ratio));
  }
  o.add(l4_checks(l4), "L4: ");
  const auto dist = CoefficientDistribution::gaussian();
  std::vector<LocalSupSweep> sup;
  for (int n : {40, 160}) {
    sup.push_back(local_sup_sweep(n, 1.0, 1000, dist, 7, g_opts));
    o.note("local sup n=" + std::to_string(n) + ": max ratio " + f6(sup.back().max_ratio));
  }
  o.add(local_sup_checks(sup), "local sup: ");
  std::vector<BadSetReport> bad;
  for (int n : {40, 80, 160}) {
    bad.push_back(badset_census(n, 2.0, 2.0, 2000, 7, BasisKind::Standard, g_opts));
    o.note("bad set K=2 n=" + std::to_string(n) + ": fraction " + f6(bad.back().fraction_values));
  }
  o.add(badset_checks(bad), "bad set: ");
  std::vector<InnerRadiusReport> inner;
  for (int n : {40, 80}) {
    inner.push_back(inner_radius_census(n, 10, dist, kMinCensusOversample, 7, g_opts));
    o.note("inner radius n=" + std::to_string(n) + ": min radius*n " + f6(inner.back().min_scaled));
  }
  o.add(inner_radius_checks(inner), "inner radius: ");
  return o;
}

// 11. Determinism through the command-line layer.
Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "nodal_acceptance_runs";
  fs::remove_all(root);
  auto run = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "nodal-census");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  };
  const std::vector<std::vector<std::string>> runs = {
      {"cns", "--degrees", "10,20,30", "--trials", "60", "--seed", "7"},
      {"universality", "--n", "20", "--trials", "200", "--seed", "7"},
      {"rwm", "--radii", "5,10,20", "--trials", "60", "--seed", "7"},
      {"clt", "--samples", "2000", "--seed", "7"},
      {"covariance", "--trials", "300", "--seed", "7"},
      {"diagnostics", "--l4-degrees", "10,20", "--badset-degrees", "20,40", "--points", "1000", "--sup-degrees",
       "20,40", "--draws", "20", "--semilocal-degree", "40", "--semilocal-radii", "5,10", "--inner-degrees", "10,20",
       "--realizations", "2", "--seed", "7"},
      {"demo-basis", "--seed", "7"},
  };
  for (auto args : runs) {
    const std::string name = args[0];
    const fs::path dir = root / name;
    args.insert(args.end(), {"--out", dir.string()});
    const int code = run(args);
    if (code != 0) {
      o.require(false, name + ": run exited with " + std::to_string(code));
      continue;
    }
    const int replay = run({"replay", dir.string()});
    const bool same = read_text_file((dir / kReplayFile).string()) == read_text_file((dir / kSummaryFile).string());
    o.require(replay == 0 && same, name + ": replay summary byte-identical");
  }
  const fs::path again = root / "universality-rerun";
  const int code = run({"universality", "--n", "20", "--trials", "200", "--seed", "7", "--threads", "1", "--out",
                        again.string()});
  const bool same = code == 0 && read_text_file((again / "trials.csv").string()) ==
                                     read_text_file((root / "universality" / "trials.csv").string());
  o.require(same, "universality rerun (1 thread): trials.csv identical");
  fs::remove_all(root);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  app.add_option("--threads", g_opts.threads, "worker threads");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"addition theorem", addition_theorem},
      {"exact oracles", exact_oracles},
      {"Hilb asymptotic", hilb_asymptotic},
      {"universality n=60", universality},
      {"c_NS envelope, sphere vs plane", cns_envelope},
      {"CLT diagnostic", clt},
      {"covariance convergence", covariance},
      {"semi-locality", semilocality},
      {"basis-dependence demo", basis_demo},
      {"inequality diagnostics", inequalities},
      {"determinism", determinism},
  };
  const std::set<int> wanted(only.begin(), only.end());
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    char head[160];
    std::snprintf(head, sizeof head, "[%s] criterion %2d: %s (%.1f s)", o.pass ? "PASS" : "FAIL", id,
                  criteria[i].first.c_str(), secs);
    std::cout << head << "\n";
    for (const std::string& d : o.details) std::cout << "         " << d << "\n";
    std::cout.flush();
    failed += o.pass ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}
