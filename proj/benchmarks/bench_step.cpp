#include "tclsim/population.hpp"
#include "tclsim/rng.hpp"
#include "tclsim/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace tclsim;

namespace {

PopulationSpec bench_spec(std::int64_t n, double noise) {
    PopulationSpec spec;
    spec.n = n;
    spec.noise_sigma = noise;
    return spec;
}

// Device-steps per second of the core loop. The desk-scale budget is
// 10^4 devices * 86400 one-second steps in under two minutes on one core,
// i.e. at least 7.2e6 device-steps per second.
void BM_StepNoisy(benchmark::State& state) {
    Simulator sim(bench_spec(state.range(0), 0.052), 1.0 / 60.0, 1);
    sim.init_steady_state();
    for (auto _ : state) {
        sim.advance_steps(30);
    }
    state.SetItemsProcessed(state.iterations() * 30 * state.range(0));
}
BENCHMARK(BM_StepNoisy)->Arg(1000)->Arg(10000);

void BM_StepNoiseless(benchmark::State& state) {
    Simulator sim(bench_spec(state.range(0), 0.0), 1.0 / 60.0, 1);
    sim.init_steady_state();
    for (auto _ : state) {
        sim.advance_steps(30);
    }
    state.SetItemsProcessed(state.iterations() * 30 * state.range(0));
}
BENCHMARK(BM_StepNoiseless)->Arg(10000);

void BM_StepNoisyThreaded(benchmark::State& state) {
    Simulator sim(bench_spec(10000, 0.052), 1.0 / 60.0, static_cast<int>(state.range(0)));
    sim.init_steady_state();
    for (auto _ : state) {
        sim.advance_steps(30);
    }
    state.SetItemsProcessed(state.iterations() * 30 * 10000);
}
BENCHMARK(BM_StepNoisyThreaded)->Arg(2)->Arg(4)->Arg(8);

void BM_GaussianDraw(benchmark::State& state) {
    std::uint64_t k = 0;
    double acc = 0.0;
    for (auto _ : state) {
        acc += rng::gaussian(1, 0, 7, k++);
    }
    benchmark::DoNotOptimize(acc);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GaussianDraw);

void BM_Aggregate(benchmark::State& state) {
    Simulator sim(bench_spec(10000, 0.052), 1.0 / 60.0, 1);
    sim.init_steady_state();
    for (auto _ : state) {
        benchmark::DoNotOptimize(aggregate(sim.ensemble()));
    }
    state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_Aggregate);

} // namespace

BENCHMARK_MAIN();
