#include <benchmark/benchmark.h>

#include "xmrsa/features.hpp"
#include "xmrsa/rng.hpp"

namespace {

std::vector<double> random_series(std::size_t n) {
    xmrsa::CounterRng rng(11, {1});
    std::vector<double> v(n);
    for (double& x : v) x = rng.next_gaussian();
    return v;
}

void BM_Enrich(benchmark::State& state) {
    const auto series = random_series(static_cast<std::size_t>(state.range(0)));
    const xmrsa::FeatureConfig cfg;  // defaults: 30 feature columns
    for (auto _ : state)
        benchmark::DoNotOptimize(xmrsa::enrich_electrode(series, cfg));
}
BENCHMARK(BM_Enrich)->Arg(64)->Arg(256)->Arg(1024);

void BM_BandPowers(benchmark::State& state) {
    const auto series = random_series(256);
    const auto spec = xmrsa::BandSpec::log_spaced_default();
    for (auto _ : state)
        benchmark::DoNotOptimize(xmrsa::band_powers(
            series, static_cast<std::size_t>(state.range(0)), spec));
}
BENCHMARK(BM_BandPowers)->Arg(8)->Arg(16)->Arg(32);

void BM_ElectrodeSimilarity(benchmark::State& state) {
    xmrsa::CounterRng rng(13, {2});
    const std::size_t t = 128;
    xmrsa::Mat eeg(t, static_cast<std::size_t>(state.range(0)));
    for (double& v : eeg.data) v = rng.next_gaussian();
    xmrsa::Mat llm(t, 20);
    for (double& v : llm.data) v = rng.next_gaussian();
    const xmrsa::FeatureConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(xmrsa::electrode_similarity(eeg, llm, cfg));
}
BENCHMARK(BM_ElectrodeSimilarity)->Arg(8)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
