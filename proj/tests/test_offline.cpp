#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <variant>
#include <vector>

#include <bincover/distribution.hpp>
#include <bincover/dnf.hpp>
#include <bincover/errors.hpp>
#include <bincover/families.hpp>
#include <bincover/offline.hpp>
#include <bincover/options.hpp>
#include <bincover/rng.hpp>
#include <bincover/simplex.hpp>

#include "test_helpers.hpp"

using namespace bincover;
using bctest::list_of;
using bctest::point;
using bctest::rat;
using bctest::uniform2;

namespace {

ItemList random_list(Rng& rng, size_t len, long denom) {
    std::vector<Rational> xs;
    for (size_t i = 0; i < len; ++i)
        xs.emplace_back(static_cast<long>(rng.below(static_cast<std::uint64_t>(denom) + 1)),
                        denom);
    return ItemList(std::move(xs));
}

std::set<std::vector<std::uint32_t>> config_counts(const std::vector<PackingConfiguration>& cs) {
    std::set<std::vector<std::uint32_t>> out;
    for (const auto& c : cs) out.insert(c.counts);
    return out;
}

Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    Rational s;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<Rational> mixture(const PerfectPackingCertificate& cert, size_t m) {
    std::vector<Rational> mix(m);
    for (size_t j = 0; j < cert.configurations.size(); ++j)
        for (size_t i = 0; i < m; ++i)
            mix[i] += cert.coefficients[j] *
                      Rational(static_cast<long>(cert.configurations[j].counts[i]));
    return mix;
}

} // namespace

TEST_CASE("the exact covering optimum on small lists") {
    CHECK(opt_exact(list_of({rat(1, 2), rat(1, 2), rat(1, 2)})) == 1);
    CHECK(opt_exact(list_of({rat(9, 10), rat(1, 10), rat(6, 10), rat(4, 10), rat(3, 5),
                             rat(2, 5)})) == 3);
    CHECK(opt_exact(list_of({rat(3, 5), rat(3, 5), rat(3, 5), rat(3, 5)})) == 2);
    CHECK(opt_exact(list_of({rat(2, 5), rat(2, 5), rat(2, 5), rat(2, 5), rat(2, 5)})) == 1);
    CHECK(opt_exact(list_of({rat(1)})) == 1);
    CHECK(opt_exact(list_of({rat(1, 4)})) == 0);
    CHECK(opt_exact(ItemList{std::vector<Rational>{}}) == 0);
}

TEST_CASE("the optimum respects its size cap but ignores zero items") {
    std::vector<Rational> seventeen(17, rat(1, 2));
    CHECK_THROWS_AS(opt_exact(ItemList(seventeen)), TooLargeError);

    std::vector<Rational> padded(15, rat(1, 2));
    padded.push_back(rat(0));
    padded.push_back(rat(0));
    CHECK(opt_exact(ItemList(padded)) == 7);
}

TEST_CASE("the optimum is volume-bounded and superadditive") {
    Rng rng(RandomSeed{31, 0});
    for (int round = 0; round < 120; ++round) {
        auto A = random_list(rng, 1 + rng.below(6), 10);
        auto B = random_list(rng, 1 + rng.below(6), 10);
        auto a = opt_exact(A);
        auto b = opt_exact(B);
        auto ab = opt_exact(A.concat(B));
        CHECK(ab >= a + b);
        CHECK(Rational(static_cast<long>(ab)) <= A.total() + B.total());
        CHECK(ab >= dnf_bins(A.concat(B)));
    }
}

TEST_CASE("an optimal packing certifies its own count") {
    auto L = list_of({rat(9, 10), rat(1, 10), rat(6, 10), rat(4, 10), rat(3, 5), rat(2, 5)});
    auto p = opt_packing(L);
    CHECK(p.bins == 3);
    REQUIRE(p.groups.size() == 3);

    Rng rng(RandomSeed{31, 1});
    for (int round = 0; round < 60; ++round) {
        auto M = random_list(rng, 1 + rng.below(8), 8);
        auto pk = opt_packing(M);
        CHECK(pk.bins == opt_exact(M));
        CHECK(pk.groups.size() == pk.bins);
        std::set<std::size_t> used;
        for (const auto& g : pk.groups) {
            Rational s;
            for (auto idx : g) {
                REQUIRE(idx < M.length());
                CHECK(used.insert(idx).second); // disjoint
                s += M.items()[idx];
            }
            CHECK(s >= rat(1));
        }
    }
}

TEST_CASE("perfect configurations enumerate exactly the unit-volume mixes") {
    auto cs = enumerate_perfect_configs(uniform2(rat(1, 3), rat(2, 3)));
    CHECK(config_counts(cs) ==
          std::set<std::vector<std::uint32_t>>{{1, 1}, {3, 0}});
    for (const auto& c : cs) {
        CHECK(c.kind == PackingConfiguration::Kind::perfect);
        CHECK(c.weight(uniform2(rat(1, 3), rat(2, 3)).sizes()) == rat(1));
    }

    CHECK(config_counts(enumerate_perfect_configs(point(rat(1, 3)))) ==
          std::set<std::vector<std::uint32_t>>{{3}});
    CHECK(enumerate_perfect_configs(point(rat(2, 5))).empty());
    CHECK(config_counts(enumerate_perfect_configs(uniform2(rat(2, 5), rat(1, 2)))) ==
          std::set<std::vector<std::uint32_t>>{{0, 2}});

    auto Z = DiscreteDistribution::make({rat(0), rat(1)}, {rat(1, 2), rat(1, 2)}, true);
    CHECK_THROWS_AS(enumerate_perfect_configs(Z), ValidationError);

    CHECK_THROWS_AS(enumerate_perfect_configs(family_uniform_discrete(10), 10),
                    CapExceededError);
}

TEST_CASE("covering configurations are exactly the minimal ones") {
    CHECK(config_counts(enumerate_covering_configs(point(rat(2, 5)))) ==
          std::set<std::vector<std::uint32_t>>{{3}});

    auto cs = enumerate_covering_configs(uniform2(rat(2, 5), rat(1, 2)));
    CHECK(config_counts(cs) ==
          std::set<std::vector<std::uint32_t>>{{0, 2}, {2, 1}, {3, 0}});

    auto sizes = uniform2(rat(2, 5), rat(1, 2)).sizes();
    for (const auto& c : cs) {
        CHECK(c.kind == PackingConfiguration::Kind::covering);
        CHECK(c.weight(sizes) >= rat(1));
        Rational smallest_used;
        for (size_t i = 0; i < c.counts.size(); ++i)
            if (c.counts[i] > 0) {
                smallest_used = sizes[i];
                break;
            }
        CHECK(c.weight(sizes) - smallest_used < rat(1));
    }

    CHECK(config_counts(enumerate_covering_configs(uniform2(rat(1, 3), rat(2, 3)))) ==
          std::set<std::vector<std::uint32_t>>{{0, 2}, {1, 1}, {3, 0}});
}

TEST_CASE("cone membership yields verifiable certificates") {
    auto F = uniform2(rat(1, 3), rat(2, 3));
    auto d = is_perfect_packing(F);
    REQUIRE(std::holds_alternative<PerfectPackingCertificate>(d));
    const auto& cert = std::get<PerfectPackingCertificate>(d);
    CHECK(mixture(cert, 2) == std::vector<Rational>{rat(1, 2), rat(1, 2)});
    for (const auto& a : cert.coefficients) CHECK(a >= rat(0));

    auto G = uniform2(rat(1, 4), rat(3, 4));
    auto dg = is_perfect_packing(G);
    REQUIRE(std::holds_alternative<PerfectPackingCertificate>(dg));
    CHECK(mixture(std::get<PerfectPackingCertificate>(dg), 2) ==
          std::vector<Rational>{rat(1, 2), rat(1, 2)});

    auto H = point(rat(1, 2));
    auto dh = is_perfect_packing(H);
    REQUIRE(std::holds_alternative<PerfectPackingCertificate>(dh));
}

TEST_CASE("cone refutations separate strictly") {
    auto F = uniform2(rat(2, 5), rat(1, 2));
    auto d = is_perfect_packing(F);
    REQUIRE(std::holds_alternative<PackingRefutation>(d));
    const auto& y = std::get<PackingRefutation>(d).separator;
    REQUIRE(y.size() == 2);
    CHECK(dot(y, F.probs()) > rat(0));
    for (const auto& c : enumerate_perfect_configs(F)) {
        std::vector<Rational> counts;
        for (auto b : c.counts) counts.push_back(rat(static_cast<long>(b)));
        CHECK(dot(y, counts) <= rat(0));
    }

    auto P = point(rat(2, 5));
    auto dp = is_perfect_packing(P);
    REQUIRE(std::holds_alternative<PackingRefutation>(dp));
    CHECK(dot(std::get<PackingRefutation>(dp).separator, P.probs()) > rat(0));
}

TEST_CASE("hint and simplex routes agree, and bad hints are not trusted") {
    auto hinted = family_fmk(2, 3);
    REQUIRE(hinted.packing_hint().has_value());
    auto via_hint = is_perfect_packing(hinted);
    REQUIRE(std::holds_alternative<PerfectPackingCertificate>(via_hint));
    CHECK(mixture(std::get<PerfectPackingCertificate>(via_hint), 4) == hinted.probs());

    AnalysisOptions no_hints;
    no_hints.use_hints = false;
    auto via_lp = is_perfect_packing(hinted, no_hints);
    REQUIRE(std::holds_alternative<PerfectPackingCertificate>(via_lp));
    CHECK(mixture(std::get<PerfectPackingCertificate>(via_lp), 4) == hinted.probs());

    // A wrong hint is rechecked against the probabilities and rejected
    // loudly instead of leaking into a certificate.
    auto F = uniform2(rat(1, 3), rat(2, 3));
    PackingHint bogus;
    PackingConfiguration c;
    c.kind = PackingConfiguration::Kind::perfect;
    c.counts = {3, 0};
    bogus.configs = {c};
    bogus.alphas = {rat(1, 3)}; // mixes to (1, 0), not (1/2, 1/2)
    F.attach_packing_hint(bogus);
    CHECK_THROWS_AS(is_perfect_packing(F), std::logic_error);
    auto d = is_perfect_packing(F, no_hints);
    REQUIRE(std::holds_alternative<PerfectPackingCertificate>(d));
    CHECK(mixture(std::get<PerfectPackingCertificate>(d), 2) ==
          std::vector<Rational>{rat(1, 2), rat(1, 2)});
}

TEST_CASE("the degree is the smallest certifying support") {
    auto one = degree(point(rat(1)));
    CHECK(one.degree == 1);
    REQUIRE(one.configurations.size() == 1);
    CHECK(one.configurations[0].counts == std::vector<std::uint32_t>{1});

    // (1/2, 1/2) is realized by the single mix {1/3, 2/3}.
    CHECK(degree(uniform2(rat(1, 3), rat(2, 3))).degree == 1);

    // Two uniform atoms at 1/2 and 1 need both configurations.
    CHECK(degree(family_uniform_discrete(2)).degree == 2);

    auto pt = family_pptwo({{rat(9, 10), rat(1, 10)}, {rat(3, 5), rat(2, 5)}});
    auto dg = degree(pt);
    CHECK(dg.degree == 2);
    CHECK(config_counts(dg.configurations) ==
          std::set<std::vector<std::uint32_t>>{{1, 0, 0, 1}, {0, 1, 1, 0}});

    CHECK_THROWS_AS(degree(uniform2(rat(2, 5), rat(1, 2))), ValidationError);
    CHECK_THROWS_AS(degree(family_uniform_discrete(10)), CapExceededError);
}

TEST_CASE("the covering rate is exact under perfect packing") {
    auto g = gamma_rate(uniform2(rat(1, 3), rat(2, 3)));
    CHECK(g.provenance == GammaProvenance::exact_perfect_packing);
    CHECK(g.upper == rat(1, 2));
    CHECK(g.lower == 0.5);
    CHECK(g.error_bar == 0.0);
}

TEST_CASE("the covering rate interval brackets non-perfect distributions") {
    auto g = gamma_rate(point(rat(2, 5)));
    CHECK(g.provenance == GammaProvenance::interval_bound);
    CHECK(g.upper == rat(1, 3));
    CHECK(g.lower > 0.2);
    CHECK(g.lower <= g.upper.as_double() + 2.0 * g.error_bar);
    // Every trial of a point mass draws the same list, so the spread is 0.
    CHECK(g.error_bar == 0.0);

    auto h = gamma_rate(uniform2(rat(2, 5), rat(1, 2)));
    CHECK(h.upper == rat(5, 12));

    auto again = gamma_rate(point(rat(2, 5)));
    CHECK(again.lower == g.lower);
}

TEST_CASE("the shrink construction reaches zero waste without growth") {
    auto L = list_of({rat(3, 5), rat(3, 5), rat(3, 5), rat(3, 5)});
    auto H = perfect_shrink(L);
    REQUIRE(H.length() == 4);
    CHECK(H.total() == rat(2));
    CHECK(opt_exact(H) == 2);
    std::multiset<Rational> got(H.items().begin(), H.items().end());
    CHECK(got == std::multiset<Rational>{rat(2, 5), rat(2, 5), rat(3, 5), rat(3, 5)});
    for (size_t i = 0; i < 4; ++i) CHECK(H.items()[i] <= L.items()[i]);

    auto M = list_of({rat(1, 2), rat(1, 2), rat(1, 3)});
    auto HM = perfect_shrink(M);
    CHECK(HM.items() == std::vector<Rational>{rat(1, 2), rat(1, 2), rat(0)});

    auto P = list_of({rat(1, 3), rat(2, 3)});
    CHECK(perfect_shrink(P).items() == P.items());
}

TEST_CASE("shrunk lists concatenate with exactly proportional optima") {
    auto H = perfect_shrink(list_of({rat(3, 5), rat(3, 5), rat(3, 5), rat(3, 5)}));
    CHECK(opt_exact(H.repeat(3), 16) == 6);
}

TEST_CASE("shrink postconditions hold on random instances") {
    Rng rng(RandomSeed{31, 2});
    int shrunk = 0;
    for (int round = 0; round < 300; ++round) {
        auto L = random_list(rng, 1 + rng.below(7), 9);
        auto opt = opt_exact(L);
        if (opt == 0) continue;
        ++shrunk;
        auto H = perfect_shrink(L);
        REQUIRE(H.length() == L.length());
        for (size_t i = 0; i < L.length(); ++i) {
            CHECK(H.items()[i] >= rat(0));
            CHECK(H.items()[i] <= L.items()[i]);
        }
        CHECK(H.total() == Rational(static_cast<long>(opt)));
        CHECK(opt_exact(H) == opt);
    }
    CHECK(shrunk > 100);
}

TEST_CASE("the exact simplex solves equalities and maximizations") {
    using namespace bincover::lp;

    auto feas = solve_equality_feasibility({{rat(1), rat(0)}, {rat(0), rat(1)}},
                                           {rat(1, 2), rat(1, 3)});
    REQUIRE(std::holds_alternative<EqFeasible>(feas));
    CHECK(std::get<EqFeasible>(feas).x == std::vector<Rational>{rat(1, 2), rat(1, 3)});

    auto infeas = solve_equality_feasibility({{rat(1), rat(1)}}, {rat(1, 2), rat(1, 3)});
    REQUIRE(std::holds_alternative<EqInfeasible>(infeas));
    const auto& y = std::get<EqInfeasible>(infeas).y;
    CHECK(dot(y, {rat(1, 2), rat(1, 3)}) > rat(0));
    CHECK(dot(y, {rat(1), rat(1)}) <= rat(0));

    auto mx = maximize_total_under({{rat(1), rat(0)}, {rat(0), rat(1)}}, {rat(1), rat(2)});
    CHECK(mx.value == rat(3));
    CHECK(mx.x == std::vector<Rational>{rat(1), rat(2)});

    auto tight = maximize_total_under({{rat(1), rat(1)}, {rat(1), rat(0)}}, {rat(1), rat(1)});
    CHECK(tight.value == rat(1));
}
