#include <benchmark/benchmark.h>

#include "xmrsa/metrics.hpp"
#include "xmrsa/rdm.hpp"
#include "xmrsa/rng.hpp"

namespace {

xmrsa::Mat random_mat(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    xmrsa::CounterRng rng(seed, {1});
    xmrsa::Mat m(rows, cols);
    for (double& v : m.data) v = rng.next_gaussian();
    return m;
}

void BM_BuildRdm(benchmark::State& state) {
    const auto m = random_mat(state.range(0), 20, 3);
    for (auto _ : state) benchmark::DoNotOptimize(xmrsa::build_rdm(m));
}
BENCHMARK(BM_BuildRdm)->Arg(50)->Arg(100)->Arg(200);

void BM_Metric(benchmark::State& state, xmrsa::Metric metric) {
    const auto x = random_mat(state.range(0), 20, 5);
    const auto y = random_mat(state.range(0), 20, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(xmrsa::eval_metric(metric, x, y));
}
BENCHMARK_CAPTURE(BM_Metric, pearson_rsa, xmrsa::Metric::PearsonRSA)
    ->Arg(50)
    ->Arg(100)
    ->Arg(200);
BENCHMARK_CAPTURE(BM_Metric, spearman_rsa, xmrsa::Metric::SpearmanRSA)
    ->Arg(50)
    ->Arg(100)
    ->Arg(200);
BENCHMARK_CAPTURE(BM_Metric, kendall_tau_b, xmrsa::Metric::KendallTauB)
    ->Arg(50)
    ->Arg(100)
    ->Arg(200);
BENCHMARK_CAPTURE(BM_Metric, dcor, xmrsa::Metric::DCor)->Arg(50)->Arg(200);
BENCHMARK_CAPTURE(BM_Metric, rv, xmrsa::Metric::RV)->Arg(50)->Arg(200);
BENCHMARK_CAPTURE(BM_Metric, cka_rbf, xmrsa::Metric::CKARBF)
    ->Arg(50)
    ->Arg(200);

// O(n log n) Kendall on long tied vectors (the RDM-vector regime)
void BM_KendallLong(benchmark::State& state) {
    xmrsa::CounterRng rng(9, {2});
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<double> a(n), b(n);
    for (double& v : a) v = std::round(rng.next_gaussian() * 100.0);
    for (double& v : b) v = std::round(rng.next_gaussian() * 100.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(xmrsa::kendall_tau_b(a, b));
}
BENCHMARK(BM_KendallLong)->Arg(1000)->Arg(10000)->Arg(20000);

}  // namespace

BENCHMARK_MAIN();
