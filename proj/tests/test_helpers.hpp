#pragma once

// Shared shorthand for the test binaries only.

#include <initializer_list>
#include <utility>
#include <vector>

#include <bincover/distribution.hpp>
#include <bincover/rational.hpp>

namespace bctest {

inline bincover::Rational rat(long n, long d = 1) { return bincover::Rational(n, d); }

inline bincover::DiscreteDistribution point(const bincover::Rational& s) {
    return bincover::DiscreteDistribution::make({s}, {rat(1)});
}

inline bincover::DiscreteDistribution uniform2(const bincover::Rational& a,
                                               const bincover::Rational& b) {
    return bincover::DiscreteDistribution::make({a, b}, {rat(1, 2), rat(1, 2)});
}

inline bincover::ItemList list_of(std::initializer_list<bincover::Rational> xs) {
    return bincover::ItemList(std::vector<bincover::Rational>(xs));
}

} // namespace bctest
