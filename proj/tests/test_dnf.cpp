#include <doctest.h>

#include <cstdint>
#include <vector>

#include <bincover/distribution.hpp>
#include <bincover/dnf.hpp>
#include <bincover/errors.hpp>
#include <bincover/rng.hpp>

#include "test_helpers.hpp"

using namespace bincover;
using bctest::list_of;
using bctest::point;
using bctest::rat;
using bctest::uniform2;

namespace {

ItemList random_list(Rng& rng, size_t len, long denom) {
    std::vector<Rational> xs;
    xs.reserve(len);
    for (size_t i = 0; i < len; ++i)
        xs.emplace_back(static_cast<long>(rng.below(static_cast<std::uint64_t>(denom) + 1)),
                        denom);
    return ItemList(std::move(xs));
}

Rational overshoot_total(const DnfRun& run) {
    Rational s;
    for (const auto& e : run.close_events) s += e.overshoot;
    return s;
}

} // namespace

TEST_CASE("a single pass closes bins exactly at level one") {
    auto r1 = dnf_run(list_of({rat(1)}));
    CHECK(r1.bins_closed == 1);
    REQUIRE(r1.close_events.size() == 1);
    CHECK(r1.close_events[0].item_index == 1);
    CHECK(r1.close_events[0].overshoot.is_zero());
    CHECK(r1.final_level.is_zero());

    auto r2 = dnf_run(list_of({rat(3, 5), rat(3, 5), rat(3, 5), rat(3, 5)}));
    CHECK(r2.bins_closed == 2);
    REQUIRE(r2.close_events.size() == 2);
    CHECK(r2.close_events[0].item_index == 2);
    CHECK(r2.close_events[0].overshoot == rat(1, 5));
    CHECK(r2.close_events[1].item_index == 4);
    CHECK(r2.close_events[1].overshoot == rat(1, 5));
    CHECK(r2.final_level.is_zero());

    auto r3 = dnf_run(list_of({rat(2, 5), rat(3, 10), rat(1, 5), rat(3, 10)}));
    CHECK(r3.bins_closed == 1);
    REQUIRE(r3.close_events.size() == 1);
    CHECK(r3.close_events[0].item_index == 4);
    CHECK(r3.close_events[0].overshoot == rat(1, 5));
    CHECK(r3.final_level.is_zero());

    auto r4 = dnf_run(list_of({rat(1, 2)}));
    CHECK(r4.bins_closed == 0);
    CHECK(r4.final_level == rat(1, 2));
}

TEST_CASE("a nonzero start level is part of the first bin") {
    auto r = dnf_run(rat(1, 2), list_of({rat(1, 2)}));
    CHECK(r.bins_closed == 1);
    CHECK(r.final_level.is_zero());

    auto s = dnf_run(rat(1, 2), list_of({rat(3, 4)}));
    CHECK(s.bins_closed == 1);
    REQUIRE(s.close_events.size() == 1);
    CHECK(s.close_events[0].overshoot == rat(1, 4));
}

TEST_CASE("volume conservation holds exactly on every run") {
    Rng rng(RandomSeed{2024, 0});
    for (int round = 0; round < 100; ++round) {
        auto L = random_list(rng, 1 + rng.below(30), 12);
        auto run = dnf_run(L);
        CHECK(L.total() == Rational(static_cast<long>(run.bins_closed)) + overshoot_total(run) +
                               run.final_level);
        CHECK(dnf_bins(L) == run.bins_closed);
        for (const auto& e : run.close_events) {
            CHECK(e.overshoot >= rat(0));
            CHECK(e.overshoot < rat(1));
        }
    }
}

TEST_CASE("closed bins plus one bound half the total volume") {
    Rng rng(RandomSeed{2024, 1});
    for (int round = 0; round < 100; ++round) {
        auto L = random_list(rng, 1 + rng.below(40), 10);
        auto bins = dnf_bins(L);
        CHECK(Rational(2) * Rational(static_cast<long>(bins + 1)) > L.total());
    }
}

TEST_CASE("waste accounts the uncovered volume") {
    CHECK(waste(1, list_of({rat(3, 5), rat(3, 5)})) == rat(1, 5));
    CHECK(waste(2, list_of({rat(3, 5), rat(3, 5), rat(3, 5), rat(3, 5)})) == rat(2, 5));
    CHECK(waste(1, list_of({rat(1)})).is_zero());
    CHECK_THROWS_AS(waste(3, list_of({rat(3, 5), rat(3, 5)})), ValidationError);

    Rng rng(RandomSeed{2024, 2});
    for (int round = 0; round < 50; ++round) {
        auto L = random_list(rng, 1 + rng.below(25), 8);
        CHECK(waste(dnf_bins(L), L) >= rat(0));
    }
}

TEST_CASE("stopping samples follow the excursion law") {
    for (std::uint64_t stream : {0, 1, 2}) {
        auto s = stopping_time_sample(point(rat(1, 2)), RandomSeed{11, stream});
        CHECK(s.items == 2);
        CHECK(s.overshoot.is_zero());

        auto t = stopping_time_sample(point(rat(2, 5)), RandomSeed{11, stream});
        CHECK(t.items == 3);
        CHECK(t.overshoot == rat(1, 5));

        auto u = stopping_time_sample(point(rat(1)), RandomSeed{11, stream});
        CHECK(u.items == 1);
        CHECK(u.overshoot.is_zero());
    }

    auto Z = DiscreteDistribution::make({rat(0)}, {rat(1)}, true);
    CHECK_THROWS_AS(stopping_time_sample(Z, RandomSeed{11, 0}), NeverClosesError);

    auto F = uniform2(rat(1, 3), rat(2, 3));
    auto a = stopping_time_sample(F, RandomSeed{77, 3});
    auto b = stopping_time_sample(F, RandomSeed{77, 3});
    CHECK(a.items == b.items);
    CHECK(a.overshoot == b.overshoot);
}

TEST_CASE("excursion aggregates are exact and independent of the worker count") {
    auto F = uniform2(rat(1, 3), rat(2, 3));
    RandomSeed seed{42, 7};
    auto one = simulate_excursions(F, 500, seed, 1);
    auto four = simulate_excursions(F, 500, seed, 4);
    CHECK(one.trials == 500);
    CHECK(one.sum_items == four.sum_items);
    CHECK(one.sum_items_sq == four.sum_items_sq);
    CHECK(one.sum_overshoot == four.sum_overshoot);
    CHECK(one.sum_overshoot_sq == four.sum_overshoot_sq);

    // Trial t is exactly the single-excursion sampler at stream + t.
    mpz_class items = 0, items_sq = 0;
    Rational over, over_sq;
    for (std::uint64_t t = 0; t < 500; ++t) {
        auto s = stopping_time_sample(F, RandomSeed{seed.seed, seed.stream + t});
        items += s.items;
        items_sq += mpz_class(s.items) * mpz_class(s.items);
        over += s.overshoot;
        over_sq += s.overshoot * s.overshoot;
    }
    CHECK(items == one.sum_items);
    CHECK(items_sq == one.sum_items_sq);
    CHECK(over == one.sum_overshoot);
    CHECK(over_sq == one.sum_overshoot_sq);

    CHECK(one.stderr_items() > 0.0);
    CHECK(one.mean_overshoot() >= 0.0);
}

TEST_CASE("the two-atom excursion mean matches the exact expectation") {
    auto F = uniform2(rat(1, 3), rat(2, 3));
    auto stats = simulate_excursions(F, 1000000, RandomSeed{kDefaultSeed, 0});
    CHECK(stats.mean_items() > 2.25 - 0.01);
    CHECK(stats.mean_items() < 2.25 + 0.01);
    CHECK(stats.mean_overshoot() > 0.125 - 0.01);
    CHECK(stats.mean_overshoot() < 0.125 + 0.01);
}

TEST_CASE("excursions stay exact with huge size denominators") {
    mpz_class p35 = mpz_class(1) << 35;
    mpz_class p22;
    mpz_ui_pow_ui(p22.get_mpz_t(), 3, 22);
    auto F = DiscreteDistribution::make(
        {Rational(mpz_class(1), p35), Rational(p22 - 1, p22)}, {rat(1, 2), rat(1, 2)});
    auto one = simulate_excursions(F, 50, RandomSeed{5, 0}, 1);
    auto two = simulate_excursions(F, 50, RandomSeed{5, 0}, 2);
    CHECK(one.sum_items == two.sum_items);
    CHECK(one.sum_overshoot == two.sum_overshoot);
    CHECK(one.sum_overshoot >= rat(0));
    CHECK(one.sum_overshoot < rat(50));
}
