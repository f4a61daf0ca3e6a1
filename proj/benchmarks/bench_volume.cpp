#include <benchmark/benchmark.h>

#include "polyspec/polygon_volume.hpp"

namespace {

using polyspec::AmbientSpec;
using polyspec::ConeVector;

void BM_QuadratureK2(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    const ConeVector tau({3, 4, 5});
    for (auto _ : state) benchmark::DoNotOptimize(polyspec::leray_volume(AmbientSpec::make(n, 2), tau).value);
}
BENCHMARK(BM_QuadratureK2)->Arg(2)->Arg(3)->Arg(5);

void BM_QuadratureK3(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    const ConeVector tau({3, 4, 5, 6.5});
    for (auto _ : state) benchmark::DoNotOptimize(polyspec::leray_volume(AmbientSpec::make(n, 3), tau).value);
}
BENCHMARK(BM_QuadratureK3)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
    polyspec::VolumeOptions opts;
    opts.method = polyspec::VolumeMethod::MonteCarlo;
    opts.samples = static_cast<std::uint64_t>(state.range(0));
    opts.seed = 1;
    const ConeVector tau({3, 4, 5, 6.5});
    for (auto _ : state)
        benchmark::DoNotOptimize(polyspec::leray_volume(AmbientSpec::make(3, 3), tau, opts).value);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarlo)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

}  // namespace
