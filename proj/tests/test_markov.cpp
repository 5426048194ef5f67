#include <doctest.h>

#include <cstdint>
#include <vector>

#include <bincover/bounds.hpp>
#include <bincover/chain.hpp>
#include <bincover/distribution.hpp>
#include <bincover/errors.hpp>
#include <bincover/families.hpp>
#include <bincover/options.hpp>

#include "test_helpers.hpp"

using namespace bincover;
using bctest::point;
using bctest::rat;
using bctest::uniform2;

namespace {

Rational edge_prob(const ChainRow& row, std::uint32_t to) {
    for (const auto& [v, p] : row.open_edges)
        if (v == to) return p;
    return rat(0);
}

} // namespace

TEST_CASE("the chain enumerates exactly the reachable levels") {
    auto c1 = build_chain(point(rat(1, 2)));
    REQUIRE(c1.size() == 2);
    CHECK(c1.states()[0].is_zero());
    CHECK(c1.states()[1] == rat(1, 2));
    CHECK(edge_prob(c1.rows()[0], 1) == rat(1));
    CHECK(c1.rows()[0].close_mass.is_zero());
    CHECK(c1.rows()[1].open_edges.empty());
    CHECK(c1.rows()[1].close_mass == rat(1));
    CHECK(c1.rows()[1].close_excess.is_zero());

    auto c2 = build_chain(uniform2(rat(1, 3), rat(2, 3)));
    REQUIRE(c2.size() == 3);
    CHECK(c2.states()[1] == rat(1, 3));
    CHECK(c2.states()[2] == rat(2, 3));
    CHECK(edge_prob(c2.rows()[0], 1) == rat(1, 2));
    CHECK(edge_prob(c2.rows()[0], 2) == rat(1, 2));
    // From 1/3: a small item moves to 2/3, a large one closes with no excess.
    CHECK(edge_prob(c2.rows()[1], 2) == rat(1, 2));
    CHECK(c2.rows()[1].close_mass == rat(1, 2));
    CHECK(c2.rows()[1].close_excess.is_zero());
    // From 2/3 every item closes; only the large one overshoots, by 1/3.
    CHECK(c2.rows()[2].open_edges.empty());
    CHECK(c2.rows()[2].close_mass == rat(1));
    CHECK(c2.rows()[2].close_excess == rat(1, 6));
}

TEST_CASE("chain construction enforces its caps and rejects zero atoms") {
    auto F = uniform2(rat(1, 3), rat(2, 3));
    CHECK(build_chain(F, 3).size() == 3);
    CHECK_THROWS_AS(build_chain(F, 2), StateExplosionError);

    auto Z = DiscreteDistribution::make({rat(0), rat(1)}, {rat(1, 2), rat(1, 2)}, true);
    CHECK_THROWS_AS(build_chain(Z), ValidationError);
}

TEST_CASE("a deep geometric family overflows a one-million-state cap") {
    CHECK_THROWS_AS(build_chain(family_fmk(10, 10), 1000000), StateExplosionError);
}

TEST_CASE("the period detector finds fixed cycle lengths") {
    CHECK(period(build_chain(point(rat(1)))) == 1);
    CHECK(period(build_chain(point(rat(1, 2)))) == 2);
    CHECK(period(build_chain(point(rat(2, 5)))) == 3);
    CHECK(period(build_chain(uniform2(rat(1, 3), rat(2, 5)))) == 3);
    CHECK(period(build_chain(uniform2(rat(1, 3), rat(2, 3)))) == 1);
    CHECK(period(build_chain(family_fmk(2, 3))) == 1);
}

TEST_CASE("the stationary sweep solves known chains exactly") {
    auto chain = build_chain(uniform2(rat(1, 3), rat(2, 3)));
    auto st = stationary(chain);
    REQUIRE(st.exact);
    REQUIRE(st.probs.size() == 3);
    CHECK(st.probs[0] == rat(4, 9));
    CHECK(st.probs[1] == rat(2, 9));
    CHECK(st.probs[2] == rat(3, 9));
    CHECK(st.residual <= 1e-12);

    auto c2 = build_chain(uniform2(rat(1, 2), rat(1)));
    auto st2 = stationary(c2);
    REQUIRE(st2.exact);
    CHECK(st2.probs[0] == rat(2, 3));
    CHECK(st2.probs[1] == rat(1, 3));
}

TEST_CASE("the stationary solver refuses periodic chains") {
    CHECK_THROWS_AS(stationary(build_chain(point(rat(1, 2)))), PeriodicError);
}

TEST_CASE("the float fallback carries a residual certificate") {
    auto chain = build_chain(uniform2(rat(1, 3), rat(2, 3)));
    auto st = stationary(chain, 1); // exact cap below the state count
    CHECK_FALSE(st.exact);
    CHECK(st.probs.empty());
    REQUIRE(st.probs_f.size() == 3);
    CHECK(st.residual <= 1e-12);
    double total = st.probs_f[0] + st.probs_f[1] + st.probs_f[2];
    CHECK(total > 1.0 - 1e-9);
    CHECK(total < 1.0 + 1e-9);
    CHECK(st.probs_f[0] > 4.0 / 9.0 - 1e-9);
    CHECK(st.probs_f[0] < 4.0 / 9.0 + 1e-9);
}

TEST_CASE("gaussian elimination agrees with the forward sweep") {
    std::vector<DiscreteDistribution> fs = {
        uniform2(rat(1, 3), rat(2, 3)),
        uniform2(rat(2, 5), rat(1, 2)),
        family_uniform_discrete(6),
        family_fmk(2, 3),
        family_pptwo({{rat(9, 10), rat(1, 10)}, {rat(3, 5), rat(2, 5)}}),
    };
    for (const auto& F : fs) {
        auto chain = build_chain(F);
        auto sweep = stationary(chain);
        REQUIRE(sweep.exact);
        CHECK(stationary_gaussian(chain) == sweep.probs);
    }
}

TEST_CASE("hitting times and overshoots solve exactly") {
    CHECK(expected_items_per_bin(build_chain(point(rat(1, 2)))) == rat(2));
    CHECK(expected_items_per_bin(build_chain(point(rat(2, 5)))) == rat(3));
    CHECK(expected_items_per_bin(build_chain(uniform2(rat(1, 3), rat(2, 3)))) == rat(9, 4));
    CHECK(expected_items_per_bin(build_chain(family_fmk(1, 3))) == rat(9, 4));
    auto pt = family_pptwo({{rat(9, 10), rat(1, 10)}, {rat(3, 5), rat(2, 5)}});
    CHECK(expected_items_per_bin(build_chain(pt)) <= rat(3));

    CHECK(expected_overshoot(build_chain(point(rat(1, 2)))).is_zero());
    CHECK(expected_overshoot(build_chain(point(rat(2, 5)))) == rat(1, 5));
    CHECK(expected_overshoot(build_chain(uniform2(rat(1, 3), rat(2, 3)))) == rat(1, 8));
}

TEST_CASE("wald's identity ties overshoot, items, and mean size") {
    std::vector<DiscreteDistribution> fs = {
        uniform2(rat(1, 3), rat(2, 3)),
        family_uniform_discrete(5),
        family_fmk(2, 4),
        point(rat(2, 5)),
    };
    for (const auto& F : fs) {
        auto chain = build_chain(F);
        CHECK(rat(1) + expected_overshoot(chain) ==
              expected_items_per_bin(chain) * F.expected_size());
    }
}

TEST_CASE("survival probabilities match elementary counting") {
    auto chain = build_chain(uniform2(rat(1, 3), rat(2, 3)));
    CHECK(survival_probability(chain, 0) == rat(1));
    CHECK(survival_probability(chain, 1) == rat(1));
    CHECK(survival_probability(chain, 2) == rat(1, 4));
    CHECK(survival_probability(chain, 3).is_zero());
}

TEST_CASE("the geometric family tail formula matches the chain exactly") {
    for (std::uint32_t m : {1u, 2u, 3u}) {
        auto chain = build_chain(family_fmk(m, 10));
        for (std::uint64_t i = 2; i <= 9; ++i) {
            CHECK(survival_probability(chain, i) == fmk_tail(m, 10, i));
        }
    }
}

TEST_CASE("the paired family tail formula dominates the chain tail") {
    auto pt = family_pptwo({{rat(9, 10), rat(1, 10)}, {rat(3, 5), rat(2, 5)}});
    auto chain = build_chain(pt);
    CHECK(survival_probability(chain, 2) == pptwo_tail(2, 2));
    for (std::uint64_t i = 3; i <= 8; ++i) {
        CHECK(survival_probability(chain, i) <= pptwo_tail(2, i));
    }
}

TEST_CASE("analysis routes periodic, exact, and float chains") {
    auto periodic = analyze_chain(build_chain(uniform2(rat(1, 3), rat(2, 5))));
    CHECK(periodic.period == 3);
    CHECK(periodic.exact);
    REQUIRE(periodic.expected_T.has_value());
    CHECK(*periodic.expected_T == rat(3));
    REQUIRE(periodic.expected_R.has_value());
    CHECK(*periodic.expected_R == rat(1, 10));
    CHECK_FALSE(periodic.stationary.has_value());

    auto exact = analyze_chain(build_chain(uniform2(rat(1, 3), rat(2, 3))));
    CHECK(exact.period == 1);
    CHECK(exact.exact);
    REQUIRE(exact.stationary.has_value());
    REQUIRE(exact.expected_T.has_value());
    CHECK(*exact.expected_T == rat(9, 4));
    CHECK(*exact.expected_R == rat(1, 8));
    CHECK(exact.expected_size == rat(1, 2));
    CHECK(exact.solve_residual <= 1e-12);

    AnalysisOptions tiny;
    tiny.exact_solve_cap = 2;
    auto flt = analyze_chain(build_chain(uniform2(rat(1, 3), rat(2, 3))), tiny);
    CHECK_FALSE(flt.exact);
    CHECK_FALSE(flt.expected_T.has_value());
    CHECK(flt.expected_T_f > 2.25 - 1e-9);
    CHECK(flt.expected_T_f < 2.25 + 1e-9);
    CHECK(flt.solve_residual <= 1e-12);
}

TEST_CASE("the headline ratio selects the right provenance") {
    auto pp = aecr_exact(uniform2(rat(1, 3), rat(2, 3)));
    CHECK(pp.provenance == AecrProvenance::perfect_packing);
    REQUIRE(pp.value.has_value());
    CHECK(*pp.value == rat(8, 9));
    CHECK(pp.value_f > 8.0 / 9.0 - 1e-12);
    CHECK(pp.value_f < 8.0 / 9.0 + 1e-12);

    auto per = aecr_exact(uniform2(rat(1, 3), rat(2, 5)));
    CHECK(per.provenance == AecrProvenance::periodic);
    REQUIRE(per.value.has_value());
    CHECK(*per.value == rat(1));

    auto per2 = aecr_exact(point(rat(2, 5)));
    CHECK(per2.provenance == AecrProvenance::periodic);
    CHECK(*per2.value == rat(1));

    auto gb = aecr_exact(uniform2(rat(2, 5), rat(1, 2)));
    CHECK(gb.provenance == AecrProvenance::gamma_bounded);
    REQUIRE(gb.value.has_value());
    CHECK(*gb.value == rat(48, 55));
    REQUIRE(gb.gamma_upper.has_value());
    CHECK(*gb.gamma_upper == rat(5, 12));
    REQUIRE(gb.gamma_mc_lower.has_value());
    CHECK(*gb.gamma_mc_lower > 0.0);
    REQUIRE(gb.upper_hint.has_value());
    CHECK(*gb.upper_hint >= gb.value_f - 1e-12);
    REQUIRE(gb.analysis.expected_T.has_value());
    CHECK(*gb.analysis.expected_T == rat(11, 4));
}

TEST_CASE("the certified route and the hint route give the same ratio") {
    auto hinted = family_fmk(2, 3);
    REQUIRE(hinted.packing_hint().has_value());
    AnalysisOptions no_hints;
    no_hints.use_hints = false;
    auto a = aecr_exact(hinted);
    auto b = aecr_exact(hinted, no_hints);
    CHECK(a.provenance == AecrProvenance::perfect_packing);
    CHECK(b.provenance == AecrProvenance::perfect_packing);
    REQUIRE(a.value.has_value());
    REQUIRE(b.value.has_value());
    CHECK(*a.value == *b.value);
}

TEST_CASE("exact ratios stay inside the proven range") {
    for (std::uint32_t k : {1u, 2u, 3u, 5u, 8u}) {
        auto res = aecr_exact(family_uniform_discrete(k));
        REQUIRE(res.value.has_value());
        CHECK(*res.value >= rat(1, 2));
        CHECK(*res.value <= rat(1));
    }
}
