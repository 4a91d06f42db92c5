// Serial vs OpenMP timings of the sample-pool kernels.

#include <benchmark/benchmark.h>

#include "digits/analysis/dichotomies.hpp"
#include "digits/core/estimate.hpp"
#include "digits/oracles/verifier.hpp"

using namespace digits;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

void BM_EmpiricalError(benchmark::State& state) {
  const auto dist = InputDistribution::uniform_box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
  const std::vector<double> lo{-0.2, -0.5, -0.5}, hi{0.4, 0.5, 0.5}, slo{0.0, -1.0, -1.0}, shi{0.2, 1.0, 1.0};
  const auto p = make_box(lo, hi), spec = make_box(slo, shi);
  const auto n = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(empirical_error(p, spec, dist, n, 7, 0.95, mode(state)));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_VerifierAssess(benchmark::State& state) {
  const auto dist = InputDistribution::uniform_box({-1.0, -1.0}, {1.0, 1.0});
  const std::vector<double> slo{0.0, -1.0}, shi{0.2, 1.0}, lo{-0.1, -0.9}, hi{0.15, 0.8};
  const auto spec = make_box(slo, shi);
  VerifierConfig cfg;
  cfg.samples = static_cast<std::size_t>(state.range(1));
  cfg.seed = 3;
  cfg.execution = mode(state);
  const Verifier v(dist,
                   Postcondition::parse("Pr[ret == 1 && x1 <= 0] / Pr[x1 <= 0] >= Pr[ret == 1 && x1 >= 0] / Pr[x1 >= 0]"
                                        " && Pr[ret == 1] >= 0.1",
                                        {"x1", "x2"}, 0),
                   spec, cfg);
  const auto p = make_box(lo, hi);
  for (auto _ : state) benchmark::DoNotOptimize(v.assess(p));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_EnumeratedDichotomies(benchmark::State& state) {
  const auto dist = InputDistribution::uniform_box({-1.0, -1.0}, {1.0, 1.0});
  const auto s = sample(dist, 11, 20);
  const BoxSynthesizer synth(box_family(2));
  const auto prefix = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(analysis::count_dichotomies_enumerated(synth, s, prefix, mode(state)));
}

}  // namespace

BENCHMARK(BM_EmpiricalError)->ArgsProduct({{0, 1}, {10000, 1000000}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_VerifierAssess)->ArgsProduct({{0, 1}, {10000, 1000000}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EnumeratedDichotomies)->ArgsProduct({{0, 1}, {10, 14}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
