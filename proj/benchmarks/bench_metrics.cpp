#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "gazebc/metrics.hpp"
#include "gazebc/rng.hpp"

namespace {

using namespace gazebc;

std::vector<double> noisy_sine(std::size_t length) {
    Rng rng(5);
    std::vector<double> series(length);
    for (std::size_t t = 0; t < length; ++t) {
        series[t] = std::sin(0.08 * static_cast<double>(t)) + rng.normal(0.0, 0.01);
    }
    return series;
}

void BM_Sparc(benchmark::State& state) {
    const auto series = noisy_sine(static_cast<std::size_t>(state.range(0)));
    SparcConfig config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sparc(series, config));
    }
}
BENCHMARK(BM_Sparc)->Arg(50)->Arg(100)->Arg(1000);

void BM_RSquared(benchmark::State& state) {
    const auto truth = noisy_sine(static_cast<std::size_t>(state.range(0)));
    auto pred = truth;
    for (double& v : pred) v += 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(r_squared(pred, truth));
    }
}
BENCHMARK(BM_RSquared)->Arg(100)->Arg(1000);

}  // namespace
