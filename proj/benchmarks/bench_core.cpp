#include <benchmark/benchmark.h>

#include "mvts/config.hpp"
#include "mvts/environment.hpp"
#include "mvts/harness.hpp"
#include "mvts/policies.hpp"
#include "mvts/posterior.hpp"

using namespace mvts;

namespace {

std::vector<ArmPosterior> warm_states(std::size_t arms, std::size_t dim, RngSampler& sampler) {
    std::vector<ArmPosterior> states(arms, ArmPosterior(dim));
    for (auto& state : states) {
        for (int i = 0; i < 20; ++i) {
            const auto contexts = gen_contexts(1, dim, sampler);
            state.observe(contexts.row(0), sampler.standard_normal());
        }
    }
    return states;
}

void BM_Observe(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    RngSampler sampler(1);
    const auto contexts = gen_contexts(64, dim, sampler);
    ArmPosterior arm(dim);
    std::size_t i = 0;
    for (auto _ : state) {
        arm.observe(contexts.row(i++ % 64), 0.25);
        benchmark::DoNotOptimize(arm.rate());
    }
}
BENCHMARK(BM_Observe)->Arg(2)->Arg(8)->Arg(32);

void BM_ShermanMorrison(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    RngSampler sampler(2);
    const auto contexts = gen_contexts(64, dim, sampler);
    Matrix a_inv = Matrix::identity(dim);
    std::size_t i = 0;
    for (auto _ : state) {
        sherman_morrison_inplace(a_inv, contexts.row(i++ % 64));
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_ShermanMorrison)->Arg(8)->Arg(32);

void BM_SampleGamma(benchmark::State& state) {
    const double shape = static_cast<double>(state.range(0)) / 2.0;
    RngStream rng(3);
    for (auto _ : state) benchmark::DoNotOptimize(sample_gamma(shape, 1.0, rng));
}
BENCHMARK(BM_SampleGamma)->Arg(1)->Arg(20)->Arg(2000);

void BM_ChooseMvtsD(benchmark::State& state) {
    RngSampler sampler(4);
    const auto states = warm_states(10, 8, sampler);
    const auto contexts = gen_contexts(10, 8, sampler);
    for (auto _ : state) benchmark::DoNotOptimize(choose_mvts_d(states, contexts, 1.0, sampler).arm);
}
BENCHMARK(BM_ChooseMvtsD);

void BM_ChooseTsA(benchmark::State& state) {
    RngSampler sampler(5);
    const auto states = warm_states(10, 8, sampler);
    const auto contexts = gen_contexts(10, 8, sampler);
    for (auto _ : state) benchmark::DoNotOptimize(choose_ts_a(states, contexts, 1.0, sampler).arm);
}
BENCHMARK(BM_ChooseTsA);

// One replication of all five policies over 1000 rounds.
void BM_Replication(benchmark::State& state) {
    ExperimentConfig config;
    config.horizon = 1000;
    config.replications = 1;
    config.dn_u = 1.0;
    config.dn_v = 1.0;
    config.ts_a_v = 1.0;
    const auto truths = resolve_truths(config);
    std::size_t rep = 0;
    for (auto _ : state) {
        const auto result = run_replication(config, truths, rep++, false);
        benchmark::DoNotOptimize(result.traces.front().cum_regret.back());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.horizon));
}
BENCHMARK(BM_Replication)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
