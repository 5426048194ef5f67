#pragma once
// Closed-form evaluators for the series constants, stopping-time tail
// formulas, parking-function counts, and the covering failure bound. Every
// truncated series carries a rigorous tail certificate.

#include <cstdint>
#include <vector>

#include "bincover/distribution.hpp"
#include "bincover/rational.hpp"
#include "bincover/rng.hpp"

namespace bincover {

// The true series value lies in [truncated_sum, truncated_sum + tail_bound].
struct SeriesValue {
    Rational truncated_sum;
    std::uint64_t terms_used = 0;
    Rational tail_bound;
};

// A series together with its derived inverse-form constant. value is the
// midpoint of the rigorous enclosure [value_low, value_high]; the endpoints
// are nearest-rounded doubles of exact rational bounds.
struct ConstantEnclosure {
    SeriesValue series;
    double value = 0.0;
    double value_low = 0.0;
    double value_high = 0.0;
};

// sum_{i=1..terms} (i-1)!/i^i; the constant is the inverse of the full sum.
ConstantEnclosure pp1_upper_constant(std::uint64_t terms = 30);

// inner(n) = sum_{i=2..n} (1/i^2)(1-1/i)^(i-2); constant = 1/(1 + inner).
// Indices above 500 switch to outward-rounded double intervals, converted
// back to exact rationals, so the enclosure stays rigorous.
ConstantEnclosure pp1_lower_constant(std::uint64_t max_index = 200);

// Expected bins-to-close recursion T(m) = (m/(m-1)) T(m-1) + (m-1)!/m^(m-1),
// T(1) = 1, and its closed form m * sum_{i=1..m} (i-1)!/i^i.
Rational ttilde(std::uint64_t m);
Rational ttilde_closed_form(std::uint64_t m);

// Companion recursion U(m) = (m/(m-1)) U(m-1) + (m-1)^(m-2)/m^(m-1),
// U(1) = 1, whose closed form is m * (1 + sum_{i=2..m} (1/i^2)(1-1/i)^(i-2)).
Rational pp1_lower_recursion(std::uint64_t m);
Rational pp1_lower_closed_form(std::uint64_t m);

// 1/(1 + x^2 + (1-x)^2), defined for 1/2 <= x <= 1.
Rational lorden_ratio_bound(const Rational& x);

// E[X^2]/E[X]: an upper bound on the expected overshoot at a close.
Rational lorden_overshoot_bound(const DiscreteDistribution& F);

// P[T > i] = 1/2^i + (i/(2^i m^i)) sum_{j=1..m-1} j^(i-1); validated window
// 2 <= i <= k-1 only.
Rational fmk_tail(std::uint64_t m, std::uint64_t k, std::uint64_t i);

// 2 + sum_{i=2..k-1} fmk_tail(m, k, i): a lower bound on E[T].
Rational fmk_lower_ET(std::uint64_t m, std::uint64_t k);

// P[T > i] = 1/2^i + (1/(2m)^i) sum_{j=2..m} i (j-1)^(i-1) for i >= 2.
Rational pptwo_tail(std::uint64_t m, std::uint64_t i);

// 2 + sum_{i=2..terms} pptwo_tail(m, i) with geometric tail 2^(1-terms);
// the full enclosure stays below 3 for every m.
SeriesValue pptwo_ET_upper(std::uint64_t m, std::uint64_t terms = 60);

// True iff the i-th largest entry of v is >= n-i+1 for every i in 1..n.
bool covers(const std::vector<std::uint32_t>& v, std::uint32_t n);

// Number of covering vectors in {1..n}^n: brute force for n <= 7, checked
// against the closed form; formula-only above.
mpz_class parking_count(std::uint32_t n);
mpz_class parking_formula(std::uint32_t n); // (n+1)^(n-1)

// Analytic upper bound on the failure probability that a uniform vector in
// {1..n}^(an) does not cover; the derivation needs a >= 5.
double cover_fail_bound(std::uint32_t a);

struct CoverFailRate {
    double rate = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
};
// Monte Carlo estimate of the same failure probability.
CoverFailRate cover_fail_rate_mc(std::uint32_t n, std::uint32_t a, std::uint64_t trials,
                                 RandomSeed seed, unsigned threads = 0);

} // namespace bincover
