// Solver and full-step cost on the grids the studies use.

#include <benchmark/benchmark.h>

#include "chns/ic.hpp"
#include "chns/linsolve.hpp"
#include "chns/rng.hpp"
#include "chns/stepper.hpp"

using namespace chns;

namespace {

ScalarField zero_mean_rhs(const Grid& g, std::uint64_t seed) {
    SplitMix64 rng(seed);
    ScalarField f(g);
    for (int k = 0; k < f.size(); ++k) f.data()[k] = rng.next_symmetric();
    const double m = field_mean(f);
    for (int k = 0; k < f.size(); ++k) f.data()[k] -= m;
    return f;
}

void BM_PoissonCG(benchmark::State& state) {
    Grid g(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 1.0,
           1.0, BcMode::paper);
    const ScalarField rhs = zero_mean_rhs(g, 5);
    SolverConfig cfg;
    for (auto _ : state) {
        ScalarField x = solve_pressure_poisson(rhs, cfg);
        benchmark::DoNotOptimize(x.data());
    }
}

void BM_PoissonSpectral(benchmark::State& state) {
    Grid g(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 1.0,
           1.0, BcMode::paper);
    const ScalarField rhs = zero_mean_rhs(g, 5);
    SpectralHelmholtz sp(g, 0.0, 1.0);
    ScalarField x(g);
    for (auto _ : state) {
        sp.solve(rhs, x);
        benchmark::DoNotOptimize(x.data());
    }
}

void BM_Advance(benchmark::State& state) {
    Grid g(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 1.0,
           1.0, BcMode::paper);
    SimParams p;
    IcSpec ic;
    State s = build_initial_state(g, ic, p);
    Stepper stepper(g, p);
    for (auto _ : state) {
        stepper.advance(s);
        benchmark::DoNotOptimize(s.phi.data());
    }
}

} // namespace

BENCHMARK(BM_PoissonCG)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PoissonSpectral)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_Advance)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
