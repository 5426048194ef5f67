#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include <bincover/chain.hpp>
#include <bincover/distribution.hpp>
#include <bincover/dnf.hpp>
#include <bincover/families.hpp>
#include <bincover/offline.hpp>
#include <bincover/rng.hpp>

namespace {

using namespace bincover;

DiscreteDistribution two_thirds() {
    return DiscreteDistribution::make({Rational(1, 3), Rational(2, 3)},
                                      {Rational(1, 2), Rational(1, 2)});
}

void bench_dnf_pass(benchmark::State& state) {
    const auto L = realizing_list(two_thirds(), static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(dnf_bins(L));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bench_dnf_pass)->Arg(1000)->Arg(10000)->Arg(100000);

void bench_sampler_draw(benchmark::State& state) {
    const auto F = family_uniform_discrete(static_cast<std::uint32_t>(state.range(0)));
    const Sampler s(F);
    Rng rng(RandomSeed{1, 0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(s.draw(rng));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bench_sampler_draw)->Arg(2)->Arg(20)->Arg(80);

void bench_excursions(benchmark::State& state) {
    const auto F = two_thirds();
    std::uint64_t stream = 0;
    for (auto _ : state) {
        auto stats = simulate_excursions(F, static_cast<std::uint64_t>(state.range(0)),
                                         RandomSeed{kDefaultSeed, stream++}, 1);
        benchmark::DoNotOptimize(stats.sum_items);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bench_excursions)->Arg(10000)->Arg(100000);

void bench_chain_analysis(benchmark::State& state) {
    const auto F = family_uniform_discrete(static_cast<std::uint32_t>(state.range(0)));
    for (auto _ : state) {
        auto res = aecr_exact(F);
        benchmark::DoNotOptimize(res.value_f);
    }
}
BENCHMARK(bench_chain_analysis)->Arg(10)->Arg(40)->Arg(80);

void bench_offline_opt(benchmark::State& state) {
    Rng rng(RandomSeed{7, 0});
    std::vector<Rational> xs;
    for (int i = 0; i < state.range(0); ++i)
        xs.emplace_back(static_cast<long>(1 + rng.below(10)), 10);
    const ItemList L(std::move(xs));
    for (auto _ : state) {
        benchmark::DoNotOptimize(opt_exact(L));
    }
}
BENCHMARK(bench_offline_opt)->Arg(8)->Arg(12)->Arg(16);

void bench_covering_rate(benchmark::State& state) {
    const auto F = DiscreteDistribution::make({Rational(2, 5), Rational(1, 2)},
                                              {Rational(1, 2), Rational(1, 2)});
    for (auto _ : state) {
        auto g = gamma_rate(F);
        benchmark::DoNotOptimize(g.lower);
    }
}
BENCHMARK(bench_covering_rate);

} // namespace

BENCHMARK_MAIN();
