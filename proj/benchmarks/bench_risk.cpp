#include <benchmark/benchmark.h>

#include "batchrisk/risk.hpp"
#include "batchrisk/rng.hpp"

using namespace batchrisk;

namespace {

PosteriorSample point_posterior(std::int64_t n) {
    PosteriorSample s;
    ChainDraws cd;
    cd.params.assign(std::size_t(n), CountryParams{0.15, 2.4, 0.66, 0.74, 85.0});
    s.chains.push_back(std::move(cd));
    return s;
}

}  // namespace

static void BM_ParamRiskEval(benchmark::State& state) {
    const CountryParams p{0.15, 2.4, 0.66, 0.74, 85.0};
    const MonteCarloPlan plan{state.range(0), 10};
    const QmraSpec spec;
    const Criterion crit{5, 1, 1000.0};
    Rng rng = make_rng(1, {1});
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval_param_risk(p, crit, plan, spec, rng));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 10);
}
BENCHMARK(BM_ParamRiskEval)->Arg(10)->Arg(40)->Arg(160);

static void BM_PosteriorRr(benchmark::State& state) {
    const auto posterior = point_posterior(state.range(0));
    const MonteCarloPlan plan{40, 10};
    const QmraSpec spec;
    for (auto _ : state) {
        benchmark::DoNotOptimize(posterior_rr(
            posterior, Criterion{5, 1, 1000.0}, plan, spec, 3, 1));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PosteriorRr)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_Rpr(benchmark::State& state) {
    const auto posterior = point_posterior(state.range(0));
    const MonteCarloPlan plan{40, 10};
    const QmraSpec spec;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            rpr(posterior, Criterion{5, 1, 1000.0}, plan, spec, 3));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Rpr)->Arg(500)->Unit(benchmark::kMillisecond);
