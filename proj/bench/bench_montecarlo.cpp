#include <benchmark/benchmark.h>

#include <omp.h>

#include "extqv/estimators.hpp"
#include "extqv/montecarlo.hpp"
#include "extqv/rng.hpp"

using namespace extqv;

namespace {

ExperimentConfig cell_config() {
    ExperimentConfig c;
    c.model_id = "toy_ou";
    c.epsilons = {0.1};
    c.ns = {10000};
    c.M = 64;
    c.estimators = {EstimatorSpec{EstimatorKind::extqv}, EstimatorSpec{EstimatorKind::qv}};
    return c;
}

std::vector<double> walk(std::size_t n) {
    auto rng = make_rng(1, 0);
    std::vector<double> x(n + 1);
    for (std::size_t i = 1; i <= n; ++i) x[i] = x[i - 1] + rng.normal();
    return x;
}

void BM_cell_reference(benchmark::State& state) {
    const auto c = cell_config();
    for (auto _ : state) benchmark::DoNotOptimize(run_cell_reference(c, 0.1, 10000));
    state.SetItemsProcessed(state.iterations() * c.M);
}
BENCHMARK(BM_cell_reference)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_cell_openmp(benchmark::State& state) {
    const auto c = cell_config();
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_cell(c, 0.1, 10000, RunOptions{workers}));
    state.SetItemsProcessed(state.iterations() * c.M);
}
BENCHMARK(BM_cell_openmp)
    ->Arg(1)
    ->Arg(2)
    ->Arg(4)
    ->Arg(omp_get_max_threads())
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);

void BM_ext_qv(benchmark::State& state) {
    const auto x = walk(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(ext_qv(x));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ext_qv)->Arg(1 << 10)->Arg(1 << 17);

void BM_ext_qv_crossterm(benchmark::State& state) {
    const auto x = walk(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(ext_qv_crossterm(x));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ext_qv_crossterm)->Arg(1 << 10)->Arg(1 << 17);

void BM_total_2_variation(benchmark::State& state) {
    const auto x = walk(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(total_2_variation(x));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_total_2_variation)->Arg(1 << 8)->Arg(1 << 11);

}  // namespace

BENCHMARK_MAIN();
