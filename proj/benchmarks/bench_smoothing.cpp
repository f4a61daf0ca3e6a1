#include <benchmark/benchmark.h>

#include "polyspec/smoothing.hpp"

namespace {

void BM_BuildKernel(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(polyspec::build_kernel(2).cutoff_radius());
}
BENCHMARK(BM_BuildKernel)->Unit(benchmark::kMillisecond);

void BM_ProfileLookup(benchmark::State& state) {
    const auto kernel = polyspec::build_kernel(2);
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernel.profile(t));
        t = t > 40.0 ? 0.0 : t + 0.37;
    }
}
BENCHMARK(BM_ProfileLookup);

void BM_LatticeSum(benchmark::State& state) {
    const auto kernel = polyspec::build_kernel(2);
    const polyspec::ConeVector tau = polyspec::ConeVector({3, 4, 5}).scaled(static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(polyspec::smoothed_lattice_sum(2, kernel, tau, 1));
}
BENCHMARK(BM_LatticeSum)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
