#include <benchmark/benchmark.h>

#include <random>

#include "polyspec/cones.hpp"

namespace {

void BM_ClassifyRandom(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    std::vector<polyspec::ConeVector> inputs;
    for (int i = 0; i < 256; ++i) {
        std::vector<double> tau(k + 1);
        for (auto& t : tau) t = u(rng);
        inputs.emplace_back(tau);
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(polyspec::classify(inputs[i++ % inputs.size()]));
    }
}
BENCHMARK(BM_ClassifyRandom)->Arg(2)->Arg(4)->Arg(8)->Arg(12);

void BM_ClassifyDegenerate(benchmark::State& state) {
    const polyspec::ConeVector tau({2, 3, 4, 5});
    for (auto _ : state) benchmark::DoNotOptimize(polyspec::classify(tau));
}
BENCHMARK(BM_ClassifyDegenerate);

}  // namespace
