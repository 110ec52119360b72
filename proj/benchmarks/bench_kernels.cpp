#include <benchmark/benchmark.h>

#include "alphaforge/corpus.hpp"
#include "alphaforge/evaluate.hpp"
#include "alphaforge/kernels.hpp"

using namespace alphaforge;

namespace {

const MarketData& bench_market() {
    static const MarketData market = generate_synthetic(11, 600, 200);
    return market;
}

void bm_cs_rank(benchmark::State& state) {
    const Panel& close = bench_market().close;
    for (auto _ : state) benchmark::DoNotOptimize(ops::cs_rank(close));
}
BENCHMARK(bm_cs_rank);

void bm_ts_correlation(benchmark::State& state) {
    const MarketData& m = bench_market();
    for (auto _ : state)
        benchmark::DoNotOptimize(ops::ts_correlation(m.close, m.volume, 20, 1e-12));
}
BENCHMARK(bm_ts_correlation);

void bm_decay_linear(benchmark::State& state) {
    const Panel& close = bench_market().close;
    for (auto _ : state) benchmark::DoNotOptimize(ops::decay_linear(close, 10));
}
BENCHMARK(bm_decay_linear);

void bm_single_alpha(benchmark::State& state) {
    const MarketData& m = bench_market();
    const ValidatedExpr v = validate(parse(load_corpus()[0].source));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate(v, m));
}
BENCHMARK(bm_single_alpha);

void bm_full_corpus(benchmark::State& state) {
    const MarketData& m = bench_market();
    const auto& defs = load_corpus();
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_corpus(defs, m));
}
BENCHMARK(bm_full_corpus)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
