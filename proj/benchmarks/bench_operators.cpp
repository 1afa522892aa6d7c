// Stencil-kernel throughput on desk-scale grids.

#include <benchmark/benchmark.h>

#include "chns/grid.hpp"
#include "chns/rng.hpp"

using namespace chns;

namespace {

ScalarField make_scalar(const Grid& g, std::uint64_t seed) {
    SplitMix64 rng(seed);
    ScalarField f(g);
    for (int k = 0; k < f.size(); ++k) f.data()[k] = rng.next_symmetric();
    return f;
}

VectorField make_vector(const Grid& g, std::uint64_t seed) {
    SplitMix64 rng(seed);
    VectorField w(g);
    for (int k = 0; k < w.u_size(); ++k) w.u_data()[k] = rng.next_symmetric();
    for (int k = 0; k < w.v_size(); ++k) w.v_data()[k] = rng.next_symmetric();
    w.enforce_bc();
    return w;
}

void BM_Laplacian(benchmark::State& state) {
    Grid g(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 1.0,
           1.0, BcMode::paper);
    const ScalarField f = make_scalar(g, 1);
    ScalarField out(g);
    for (auto _ : state) {
        laplacian_into(f, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * g.cell_count());
}

void BM_Advect(benchmark::State& state) {
    Grid g(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 1.0,
           1.0, BcMode::paper);
    const ScalarField f = make_scalar(g, 1);
    const VectorField w = make_vector(g, 2);
    for (auto _ : state) {
        ScalarField a = advect(w, f);
        benchmark::DoNotOptimize(a.data());
    }
    state.SetItemsProcessed(state.iterations() * g.cell_count());
}

void BM_Divergence(benchmark::State& state) {
    Grid g(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 1.0,
           1.0, BcMode::paper);
    const VectorField w = make_vector(g, 3);
    for (auto _ : state) {
        ScalarField d = divergence(w);
        benchmark::DoNotOptimize(d.data());
    }
    state.SetItemsProcessed(state.iterations() * g.cell_count());
}

} // namespace

BENCHMARK(BM_Laplacian)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_Advect)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_Divergence)->Arg(64)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
