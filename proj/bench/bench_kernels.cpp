// Serial reference vs OpenMP pair-counting kernels on a random 3D cloud.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sdde/kernels.hpp"

namespace {

std::vector<double> cloud(std::size_t n, std::size_t dim) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g;
    std::vector<double> out(n * dim);
    for (double& x : out) x = g(rng);
    return out;
}

std::vector<double> radii() {
    std::vector<double> r;
    for (double x = 0.05; x < 4.0; x *= 1.25) r.push_back(x);
    return r;
}

template <auto Kernel>
void all_pairs(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto coords = cloud(n, 3);
    const auto r = radii();
    const sdde::PointView view{coords, 3};
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(view, r));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * (n - 1) / 2));
}

template <auto Kernel>
void listed_pairs(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto coords = cloud(n, 3);
    const auto r = radii();
    const sdde::PointView view{coords, 3};
    const auto pairs = sdde::sample_pairs(n, 1000000, 7);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(view, pairs, r));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * pairs.size()));
}

}  // namespace

BENCHMARK(all_pairs<sdde::count_pairs_serial>)->Name("count_pairs/serial")->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(all_pairs<sdde::count_pairs_parallel>)->Name("count_pairs/openmp")->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(listed_pairs<sdde::count_listed_pairs_serial>)->Name("count_listed_pairs/serial")->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(listed_pairs<sdde::count_listed_pairs_parallel>)->Name("count_listed_pairs/openmp")->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
