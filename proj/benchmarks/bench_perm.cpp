#include <benchmark/benchmark.h>

#include "xmrsa/rng.hpp"
#include "xmrsa/significance.hpp"

namespace {

xmrsa::Mat random_mat(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    xmrsa::CounterRng rng(seed, {1});
    xmrsa::Mat m(rows, cols);
    for (double& v : m.data) v = rng.next_gaussian();
    return m;
}

void BM_PermTest(benchmark::State& state, xmrsa::Metric metric) {
    const auto x = random_mat(60, 20, 5);
    const auto y = random_mat(60, 20, 6);
    xmrsa::PermTestOptions opts;
    opts.n_threads = static_cast<unsigned>(state.range(1));
    for (auto _ : state)
        benchmark::DoNotOptimize(xmrsa::perm_test(
            x, y, metric, static_cast<std::size_t>(state.range(0)), 7, opts));
}
BENCHMARK_CAPTURE(BM_PermTest, spearman, xmrsa::Metric::SpearmanRSA)
    ->Args({100, 1})
    ->Args({500, 1})
    ->Args({500, 2});
BENCHMARK_CAPTURE(BM_PermTest, cka_linear, xmrsa::Metric::CKALinear)
    ->Args({100, 1})
    ->Args({500, 2});

void BM_Shuffle(benchmark::State& state) {
    xmrsa::CounterRng rng(3, {4});
    for (auto _ : state)
        benchmark::DoNotOptimize(
            rng.permutation(static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_Shuffle)->Arg(100)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
