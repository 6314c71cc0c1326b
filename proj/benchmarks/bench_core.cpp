#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "nodal/experiments.hpp"
#include "nodal/nodal.hpp"
#include "nodal/rwm.hpp"
#include "nodal/specfn.hpp"

using namespace nodal;

static void BM_LegendreTable(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const specfn::AssocLegendreTable table(n);
  std::vector<double> out(n + 1);
  double x = 0.3;
  for (auto _ : st) {
    table.evaluate(x, std::sqrt(1 - x * x), out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * (n + 1));
}
BENCHMARK(BM_LegendreTable)->Arg(40)->Arg(160)->Arg(1000);

static void BM_BesselJ0(benchmark::State& st) {
  double t = 0.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(specfn::bessel_j0(t));
    t += 0.37;
    if (t > 200) t = 0.0;
  }
}
BENCHMARK(BM_BesselJ0);

static void BM_SphereCensus(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const auto basis = HarmonicBasis::build(n);
  const SphereSynthesizer synth(n, build_sphere_grid(n, kMinCensusOversample));
  const RandomField f(basis, sample_coefficients(CoefficientDistribution::gaussian(), n, 1));
  for (auto _ : st) benchmark::DoNotOptimize(census_global(f, synth).count_total);
}
BENCHMARK(BM_SphereCensus)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

static void BM_RwmCensus(benchmark::State& st) {
  const RwmField f = sample_rwm(kDefaultPlaneWaves, 3);
  const double R = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(census_rwm(f, R).count_total);
}
BENCHMARK(BM_RwmCensus)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_CltBatch(benchmark::State& st) {
  for (auto _ : st) {
    benchmark::DoNotOptimize(clt_diagnostic(40, CoefficientDistribution::rademacher(), 10000, 1, {1, false}));
  }
}
BENCHMARK(BM_CltBatch)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
