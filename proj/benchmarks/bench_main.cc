// Timings of the inner kernels: exact worst-case residual, the equalizer and
// precoder SDPs, and a complete max-min design.
#include <benchmark/benchmark.h>

#include "rsma/ao.h"
#include "rsma/experiment.h"
#include "rsma/wmse.h"

using namespace rsma;

namespace {

DesignSpec spec_for(int users, double delta, Strategy s) {
  DesignSpec spec;
  spec.strategy = s;
  for (const auto& i : draw_channel(7, 0, users, users).at(delta)) spec.regions.push_back(i.region);
  return spec;
}

void BM_WorstCaseResidual(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DesignSpec spec = spec_for(n, 0.1, Strategy::RS);
  const Precoder p = mrt_init(spec, 100.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        worst_case_residual(spec.regions[0].h_hat, 0.1, p.full(), Complex(0.1, 0.05), 0));
  }
}
BENCHMARK(BM_WorstCaseResidual)->Arg(2)->Arg(3)->Arg(4);

void BM_EqualizerStep(benchmark::State& state) {
  const DesignSpec spec = spec_for(3, 0.1, Strategy::RS);
  const Precoder p = mrt_init(spec, 100.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(equalizer_step(spec.regions[0], p, 1.0, 0, Stream::Common));
  }
}
BENCHMARK(BM_EqualizerStep)->Unit(benchmark::kMillisecond);

void BM_PrecoderStepRate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Strategy s = state.range(1) ? Strategy::RS : Strategy::NoRS;
  const DesignSpec spec = spec_for(n, 0.1, s);
  const DesignResult warm = run_ao(spec, Objective::max_min_rate(100.0), [] {
    AoConfig c;
    c.max_iter = 1;
    return c;
  }());
  for (auto _ : state) {
    benchmark::DoNotOptimize(precoder_step_rate(spec, warm.wmse_state, 100.0));
  }
}
BENCHMARK(BM_PrecoderStepRate)
    ->Args({2, 0})
    ->Args({2, 1})
    ->Args({3, 0})
    ->Args({3, 1})
    ->Unit(benchmark::kMillisecond);

void BM_MaxMinDesign(benchmark::State& state) {
  const DesignSpec spec = spec_for(3, 0.1, Strategy::RS);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_ao(spec, Objective::max_min_rate(100.0)));
  }
}
BENCHMARK(BM_MaxMinDesign)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
