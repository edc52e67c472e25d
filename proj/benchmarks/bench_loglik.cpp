#include <benchmark/benchmark.h>

#include "batchrisk/mcmc.hpp"
#include "batchrisk/model.hpp"
#include "batchrisk/synth.hpp"

using namespace batchrisk;

namespace {

SynthResult make_data(std::int64_t n_baseline) {
    GroundTruth truth = calibrated_default();
    truth.n_baseline_batches = n_baseline;
    return generate(truth, 1);
}

}  // namespace

static void BM_LoglikBaseline(benchmark::State& state) {
    const auto data = make_data(state.range(0));
    const CountryParams p{0.15, 2.4, 0.66, 0.74, 85.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(loglik_baseline(p, data.baseline, false));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LoglikBaseline)->Range(256, 16384)->Complexity();

static void BM_LoglikSummaries(benchmark::State& state) {
    const auto data = make_data(64);
    const CountryParams p{0.15, 2.4, 0.66, 0.74, 85.0};
    const std::size_t nj = data.summaries.batches.size();
    std::vector<double> mus(nj, 2.4), ps(nj, 0.97);
    for (auto _ : state) {
        benchmark::DoNotOptimize(loglik_summaries(p, mus, ps, data.summaries));
    }
}
BENCHMARK(BM_LoglikSummaries);

static void BM_FitCombined(benchmark::State& state) {
    const auto data = make_data(617);
    SurveyData sd;
    sd.baseline = data.baseline;
    sd.summaries = data.summaries;
    McmcConfig cfg;
    cfg.n_iterations = state.range(0);
    cfg.n_burnin = state.range(0) / 4;
    cfg.thin = 4;
    cfg.n_chains = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fit(ModelKind::combined, sd, PriorSpec{}, cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitCombined)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);
