#include <benchmark/benchmark.h>

#include "traplab/besq.hpp"
#include "traplab/environment.hpp"
#include "traplab/fin_diffusion.hpp"
#include "traplab/ray_knight.hpp"
#include "traplab/rng.hpp"
#include "traplab/trap_walk.hpp"

using namespace traplab;

static void BM_StableIncrement(benchmark::State& state) {
    Rng rng(1);
    const double alpha = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) benchmark::DoNotOptimize(stable_increment(1.0, alpha, rng));
}
BENCHMARK(BM_StableIncrement)->Arg(3)->Arg(5)->Arg(8);

static void BM_BesqTransition(benchmark::State& state) {
    Rng rng(2);
    double y = 1.0;
    for (auto _ : state) {
        y = besq_transition(2, y, 0.01, rng);
        benchmark::DoNotOptimize(y);
    }
}
BENCHMARK(BM_BesqTransition);

static void BM_PoissonLargeMean(benchmark::State& state) {
    Rng rng(3);
    for (auto _ : state) benchmark::DoNotOptimize(rng.poisson(1000.0));
}
BENCHMARK(BM_PoissonLargeMean);

static void BM_TrapWalkEndpoint(benchmark::State& state) {
    Rng rng(4);
    for (auto _ : state) {
        TrapEnvironment env = sample_trap_depths(0.5, -8, 8, rng);
        benchmark::DoNotOptimize(btm_endpoint_at(env, 100.0, rng));
    }
}
BENCHMARK(BM_TrapWalkEndpoint);

static void BM_FinAnnealedEndpoint(benchmark::State& state) {
    Rng rng(5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fin_annealed_endpoint(0.5, 1e-3, 20.0, 1.0, rng));
    }
}
BENCHMARK(BM_FinAnnealedEndpoint);

static void BM_CrossingProfile(benchmark::State& state) {
    Rng rng(6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(local_time_profile_at_hit(1.0, 0.05, 1e-3, rng));
    }
}
BENCHMARK(BM_CrossingProfile);

BENCHMARK_MAIN();
