#include <benchmark/benchmark.h>

#include "levyfp/rng.hpp"
#include "levyfp/stable.hpp"

namespace {

void BM_StableDraw(benchmark::State& state) {
    const auto p = levyfp::StableParams::make(1.5, -1.0);
    levyfp::RngStream rng(42, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(levyfp::sample_stable(p, rng));
    }
}
BENCHMARK(BM_StableDraw);

void BM_StableDensity(benchmark::State& state) {
    const auto p = levyfp::StableParams::make(1.5, -1.0);
    double x = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(levyfp::stable_density(p, x));
        x = (x < 4.0) ? x + 0.37 : 0.1;
    }
}
BENCHMARK(BM_StableDensity);

} // namespace

BENCHMARK_MAIN();
