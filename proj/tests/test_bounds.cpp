#include <doctest.h>

#include <cstdint>

#include <bincover/bounds.hpp>
#include <bincover/errors.hpp>
#include <bincover/rational.hpp>
#include <bincover/rng.hpp>

#include "test_helpers.hpp"

using namespace bincover;
using bctest::rat;
using bctest::uniform2;

TEST_CASE("the factorial recursion matches its closed form") {
    CHECK(ttilde(1) == rat(1));
    CHECK(ttilde(2) == rat(5, 2));
    CHECK(ttilde(3) == rat(143, 36));
    CHECK(ttilde(4) == rat(4657, 864));
    for (std::uint64_t m = 1; m <= 40; ++m) CHECK(ttilde(m) == ttilde_closed_form(m));
    CHECK_THROWS_AS(ttilde(0), ValidationError);
}

TEST_CASE("the power recursion matches its closed form and splits at m = 4") {
    CHECK(pp1_lower_recursion(1) == rat(1));
    CHECK(pp1_lower_recursion(2) == rat(5, 2));
    CHECK(pp1_lower_recursion(3) == rat(143, 36));
    CHECK(pp1_lower_recursion(4) == rat(9395, 1728));
    for (std::uint64_t m = 1; m <= 40; ++m)
        CHECK(pp1_lower_recursion(m) == pp1_lower_closed_form(m));

    // The two recursions agree through m = 3 and then separate for good.
    for (std::uint64_t m = 1; m <= 3; ++m) CHECK(ttilde(m) == pp1_lower_recursion(m));
    CHECK(ttilde(4) != pp1_lower_recursion(4));
    CHECK(ttilde(4) < pp1_lower_recursion(4));
}

TEST_CASE("the upper series constant carries a rigorous enclosure") {
    auto c = pp1_upper_constant(30);
    CHECK(c.value_low <= c.value);
    CHECK(c.value <= c.value_high);
    CHECK(c.value > 0.7357819 - 1e-6);
    CHECK(c.value < 0.7357820 + 1e-6);
    CHECK(c.series.terms_used == 30);
    CHECK(c.series.tail_bound > rat(0));

    // More terms can only tighten the enclosure, and enclosures must overlap.
    auto d = pp1_upper_constant(60);
    CHECK(d.value_high - d.value_low <= c.value_high - c.value_low);
    CHECK(d.value_low <= c.value_high);
    CHECK(c.value_low <= d.value_high);
}

TEST_CASE("the lower series constant converges from its partial sums") {
    auto c = pp1_lower_constant(200);
    CHECK(c.value_low <= c.value);
    CHECK(c.value <= c.value_high);
    CHECK(c.value > 0.686777 - 1e-5);
    CHECK(c.value < 0.686779 + 1e-5);

    auto deep = pp1_lower_constant(2000);
    auto deeper = pp1_lower_constant(4000);
    CHECK(deep.value_low <= deeper.value_high);
    CHECK(deeper.value_low <= deep.value_high);
    CHECK(deeper.value_high - deeper.value_low <= deep.value_high - deep.value_low);
}

TEST_CASE("the ratio floor for a known largest item") {
    CHECK(lorden_ratio_bound(rat(1, 2)) == rat(2, 3));
    CHECK(lorden_ratio_bound(rat(3, 4)) == rat(8, 13));
    CHECK(lorden_ratio_bound(rat(1)) == rat(1, 2));
    CHECK_THROWS_AS(lorden_ratio_bound(rat(1, 4)), ValidationError);
    CHECK_THROWS_AS(lorden_ratio_bound(rat(3, 2)), ValidationError);
}

TEST_CASE("the overshoot ceiling from the renewal bound") {
    CHECK(lorden_overshoot_bound(uniform2(rat(1, 3), rat(2, 3))) == rat(5, 9));
    CHECK(lorden_overshoot_bound(bctest::point(rat(1, 2))) == rat(1, 2));
}

TEST_CASE("the geometric tail formula and its validity window") {
    CHECK(fmk_tail(1, 10, 2) == rat(1, 4));
    CHECK(fmk_tail(2, 3, 2) == rat(3, 8));
    CHECK(fmk_tail(2, 10, 3) == rat(11, 64));
    CHECK_THROWS_AS(fmk_tail(2, 10, 1), OutOfValidatedRangeError);
    CHECK_THROWS_AS(fmk_tail(2, 10, 10), OutOfValidatedRangeError);
    CHECK_THROWS_AS(fmk_tail(2, 10, 11), OutOfValidatedRangeError);
    CHECK_THROWS_AS(fmk_tail(0, 10, 2), ValidationError);
    CHECK_THROWS_AS(fmk_tail(2, 1, 2), ValidationError);
}

TEST_CASE("the truncated tail sum bounds the stopping mean from below") {
    CHECK(fmk_lower_ET(2, 3) == rat(19, 8));
    CHECK(fmk_lower_ET(10, 10) >= rat(57, 20));
    // Adding tail terms only increases the bound in k.
    CHECK(fmk_lower_ET(10, 12) >= fmk_lower_ET(10, 10));
}

TEST_CASE("the paired-family tails are geometrically dominated") {
    CHECK(pptwo_tail(1, 2) == rat(1, 4));
    CHECK(pptwo_tail(2, 2) == rat(3, 8));
    for (std::uint64_t m = 1; m <= 6; ++m)
        for (std::uint64_t i = 2; i <= 40; ++i)
            CHECK(pptwo_tail(m, i) <= pow_rational(rat(1, 2), static_cast<unsigned long>(i - 1)));
    CHECK_THROWS_AS(pptwo_tail(2, 1), ValidationError);
}

TEST_CASE("the paired-family stopping mean never exceeds three") {
    for (std::uint64_t m : {1, 2, 3, 5, 9}) {
        auto s = pptwo_ET_upper(m, 60);
        CHECK(s.truncated_sum + s.tail_bound <= rat(3));
        CHECK(s.terms_used == 59);
    }
    // At the dominating geometric rate the total is exactly three.
    Rational total = rat(5, 2);
    for (std::uint64_t i = 2; i <= 59; ++i)
        total += pow_rational(rat(1, 2), static_cast<unsigned long>(i));
    total += pow_rational(rat(1, 2), 59);
    CHECK(total == rat(3));
}

TEST_CASE("covering vectors are recognized by their order statistics") {
    CHECK(covers({2, 2, 3}, 3));
    CHECK(covers({1, 2, 3}, 3));
    CHECK(covers({3, 3, 3}, 3));
    CHECK_FALSE(covers({1, 1, 3}, 3));
    CHECK_FALSE(covers({2, 2, 2}, 3));
    CHECK(covers({1, 1, 2, 4, 4}, 4));
    CHECK_FALSE(covers({1, 1, 1, 4, 4}, 4));
    CHECK_THROWS_AS(covers({1, 2}, 3), ValidationError);
    CHECK_THROWS_AS(covers({0, 1, 2}, 2), ValidationError);
    CHECK_THROWS_AS(covers({1, 4}, 2), ValidationError);
}

TEST_CASE("parking counts match the closed formula") {
    CHECK(parking_count(1) == 1);
    CHECK(parking_count(2) == 3);
    CHECK(parking_count(3) == 16);
    CHECK(parking_count(4) == 125);
    CHECK(parking_count(5) == 1296);
    CHECK(parking_count(6) == 16807);
    CHECK(parking_formula(7) == 262144);
    CHECK(parking_count(8) == parking_formula(8));
}

TEST_CASE("the failure bound and its sampled counterpart") {
    auto b = cover_fail_bound(5);
    CHECK(b > 0.0431042);
    CHECK(b < 0.0431043);
    CHECK(cover_fail_bound(6) < b);
    CHECK_THROWS_AS(cover_fail_bound(4), ValidationError);

    auto one = cover_fail_rate_mc(8, 5, 2000, RandomSeed{kDefaultSeed, 3}, 1);
    auto four = cover_fail_rate_mc(8, 5, 2000, RandomSeed{kDefaultSeed, 3}, 4);
    CHECK(one.rate == four.rate);
    CHECK(one.trials == 2000);
    CHECK(one.rate >= 0.0);
    CHECK(one.rate <= 1.0);
    CHECK(one.rate <= b + 4.0 * one.std_error + 1e-12);
}
