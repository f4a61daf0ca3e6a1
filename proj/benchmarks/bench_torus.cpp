#include <benchmark/benchmark.h>

#include "polyspec/torus_measure.hpp"

namespace {

void BM_JointMeasureK2(benchmark::State& state) {
    const double R = static_cast<double>(state.range(0));
    const std::vector<polyspec::FrequencyInterval> w{{0, R}, {0, R}, {0, 2 * R}};
    std::size_t atoms = 0;
    for (auto _ : state) atoms = polyspec::joint_measure(2, 2, w).atoms().size();
    state.counters["atoms"] = static_cast<double>(atoms);
}
BENCHMARK(BM_JointMeasureK2)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_JointMeasureK3(benchmark::State& state) {
    const double R = static_cast<double>(state.range(0));
    const std::vector<polyspec::FrequencyInterval> w{{0, R}, {0, R}, {0, R}, {0, 3 * R}};
    std::size_t atoms = 0;
    for (auto _ : state) atoms = polyspec::joint_measure(2, 3, w).atoms().size();
    state.counters["atoms"] = static_cast<double>(atoms);
}
BENCHMARK(BM_JointMeasureK3)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace
