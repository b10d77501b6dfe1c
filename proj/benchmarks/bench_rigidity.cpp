#include <benchmark/benchmark.h>

#include "rigidity/detector.hpp"
#include "rigidity/lattice.hpp"
#include "rigidity/linear_statistics.hpp"
#include "rigidity/noise.hpp"
#include "rigidity/process.hpp"
#include "rigidity/shepp.hpp"

using namespace rigidity;

namespace {

LatticeSpec linf2() {
  LatticeSpec s;
  s.dimension = 2;
  s.norm = Norm::linf();
  s.alpha = 1.5;
  return s;
}

void BM_ShellsLinf(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_shells(linf2(), N));
}
BENCHMARK(BM_ShellsLinf)->Arg(200)->Arg(2000);

void BM_ShellsFourSquares(benchmark::State& state) {
  LatticeSpec s;
  s.dimension = 4;
  s.norm = Norm::lp(2);
  s.alpha = 1.0;
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_shells(s, N));
}
BENCHMARK(BM_ShellsFourSquares)->Arg(1000)->Arg(10000);

void BM_SampleIid(benchmark::State& state) {
  const SiteList sites = enumerate_sites(linf2(), 200);
  NoiseSampler sampler(NoiseModel::iid(1.0), sites);
  std::vector<double> g;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    sampler.sample_into(seed++, g);
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sites.size()));
}
BENCHMARK(BM_SampleIid);

void BM_SampleKernelBatch(benchmark::State& state) {
  const SiteList sites = enumerate_sites(linf2(), static_cast<int>(state.range(0)));
  NoiseSampler sampler(NoiseModel::kernel_model(KernelType::Exponential, 1.0, 5.0), sites);
  std::vector<std::uint64_t> seeds(32);
  std::uint64_t next = 0;
  for (auto _ : state) {
    for (auto& s : seeds) s = next++;
    benchmark::DoNotOptimize(sampler.sample_many(seeds));
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_SampleKernelBatch)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_DetectorProfile(benchmark::State& state) {
  DetectorConfig c;
  c.spec = linf2();
  c.max_shell = static_cast<int>(state.range(0));
  c.k_max = 4;
  const SiteList sites = enumerate_sites(c.spec, c.max_shell);
  NoiseSampler sampler(NoiseModel::iid(1.0), sites);
  WindowSpec w;
  w.max_shell = c.max_shell;
  auto proc = simulate_process(c.spec, sites, sampler.sample(1).site_values, {5, 40, 77}, w, NoiseModel::iid(1.0));
  DetectorWindow win(c);
  for (auto _ : state) benchmark::DoNotOptimize(detector_profile(win, proc.observed));
}
BENCHMARK(BM_DetectorProfile)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_TruncatedFkHalfLine(benchmark::State& state) {
  DetectorConfig c;
  c.spec.domain = Domain::HalfLine;
  c.spec.alpha = 1.0;
  c.max_shell = static_cast<int>(state.range(0));
  c.k_max = 10;
  const SiteList sites = enumerate_sites(c.spec, c.max_shell);
  WindowSpec w;
  w.max_shell = c.max_shell;
  w.cut = WindowSpec::Cut::None;
  auto proc = simulate_process(c.spec, sites, std::vector<double>(sites.size(), 0.37), {0, 1, 2, 3, 4}, w,
                               NoiseModel::shared(1.0));
  DetectorWindow win(c);
  for (auto _ : state) benchmark::DoNotOptimize(truncated_fk(win, proc.observed, 10));
}
BENCHMARK(BM_TruncatedFkHalfLine)->Arg(60)->Arg(1000);

void BM_SheppUnitShift(benchmark::State& state) {
  ShiftScenario sc;
  sc.alpha = 0.4;
  for (auto _ : state) benchmark::DoNotOptimize(shepp_sum(sc, state.range(0)));
}
BENCHMARK(BM_SheppUnitShift)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_AnalyticVariance(benchmark::State& state) {
  LatticeSpec s;
  s.dimension = 2;
  s.norm = Norm::l1();
  s.alpha = 0.75;
  const double n = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(analytic_variance_exponential(s, 1.0, std::pow(n, 0.75)));
}
BENCHMARK(BM_AnalyticVariance)->Arg(100)->Arg(1280);

}  // namespace

BENCHMARK_MAIN();
