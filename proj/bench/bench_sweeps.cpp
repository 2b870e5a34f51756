// Serial reference vs OpenMP for the three parallel kernels: transmission and fluorescence
// sweeps over detuning, and the Allan sweep over (N, gamma0).

#include <benchmark/benchmark.h>

#include "cpt/metrology.hpp"
#include "cpt/parallel.hpp"
#include "cpt/spectra.hpp"

namespace {

using namespace cpt;

const LambdaParams kFig8{two_pi * 6.37e6, two_pi * 6.37e6, 0.0, two_pi * 500e6, 0.0};

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp x" + std::to_string(thread_count()));
}

void BM_TransmissionNumeric(benchmark::State& state) {
  LambdaParams p{two_pi * 31.8e3, two_pi * 6.37e6, 0.0, 0.0, 0.0};
  p.gamma = 200.0 / (1e-6 - 0.4 * pi / p.rabi());
  const PulseSequence seq = PulseSequence::from_area(p, 15, 1e-6, 0.4 * pi);
  const auto grid = spectra::DetuningGrid::fsr_span(seq.dt, 1.5, 1001);
  spectra::SweepOptions opt;
  opt.exec = mode(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(spectra::transmission_spectrum(p, seq, grid, spectra::Sampling::PulseEnd,
                                                            spectra::Engine::Numeric, opt));
  label(state);
}

void BM_Fluorescence(benchmark::State& state) {
  const PulseSequence seq{54, 15e-6 / 54, 11e-9, 1.0};
  const auto grid = spectra::DetuningGrid::fsr_span(seq.dt, 0.5, 401);
  spectra::SweepOptions opt;
  opt.exec = mode(state);
  opt.initial = BlochState::dark(kFig8);
  for (auto _ : state) benchmark::DoNotOptimize(spectra::fluorescence_spectrum(kFig8, seq, grid, opt));
  label(state);
}

void BM_AllanSweep(benchmark::State& state) {
  const metrology::PulsedTemplate t{kFig8, 11e-9, 1.0};
  const metrology::AllanConfig cfg;
  const std::vector<int> ns = metrology::log_spaced_counts(2, 200, 8);
  const std::vector<double> g0{0.0, two_pi * 12.74e3, two_pi * 25.48e3};
  for (auto _ : state) benchmark::DoNotOptimize(metrology::pulsed_cpt_sweep(t, cfg, ns, g0, mode(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_TransmissionNumeric)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Fluorescence)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AllanSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
