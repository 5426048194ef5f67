#include "bincover/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bincover/detail/parallel.hpp"
#include "bincover/errors.hpp"

namespace bincover {

namespace {

const Rational kOne(1);

Rational mpz_ratio(const mpz_class& num, const mpz_class& den) { return Rational(num, den); }

mpz_class pow_ui(std::uint64_t base, std::uint64_t exp) {
    mpz_class out;
    mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(base),
                  static_cast<unsigned long>(exp));
    return out;
}

// Inverse-enclosure helper: constant = 1/(shift + S) where the true S lies in
// [sum, sum + tail]. The midpoint is what lands within the printed 3-digit
// constants; the one-sided endpoints alone do not.
ConstantEnclosure make_enclosure(SeriesValue sv, const Rational& shift) {
    const Rational lo_den = shift + sv.truncated_sum;
    const Rational hi_den = lo_den + sv.tail_bound;
    const Rational high = kOne / lo_den;
    const Rational low = kOne / hi_den;
    ConstantEnclosure out;
    out.value = ((low + high) / Rational(2)).as_double();
    out.value_low = low.as_double();
    out.value_high = high.as_double();
    out.series = std::move(sv);
    return out;
}

// Directed-rounding interval arithmetic on positive doubles, for series too
// deep for exact rationals. Every operation rounds outward one ulp, which
// over-covers the correctly rounded result.
struct DInterval {
    double lo = 0.0;
    double hi = 0.0;
};

double down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
double up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

DInterval di_add(DInterval a, DInterval b) { return {down(a.lo + b.lo), up(a.hi + b.hi)}; }
DInterval di_mul(DInterval a, DInterval b) { return {down(a.lo * b.lo), up(a.hi * b.hi)}; }
DInterval di_div(DInterval a, DInterval b) { return {down(a.lo / b.hi), up(a.hi / b.lo)}; }

DInterval di_pow(DInterval base, std::uint64_t e) {
    DInterval acc{1.0, 1.0};
    while (e > 0) {
        if (e & 1) acc = di_mul(acc, base);
        base = di_mul(base, base);
        e >>= 1;
    }
    return acc;
}

// Exact inner series sum_{i=2..n} (i-1)^(i-2)/i^i with the rigorous tail
// f(n+1)/n, where f(i) = (1-1/i)^(i-2) decreases and sum_{i>n} 1/i^2 < 1/n.
SeriesValue pp1_lower_inner_exact(std::uint64_t n) {
    SeriesValue sv;
    sv.terms_used = n >= 2 ? n - 1 : 0;
    for (std::uint64_t i = 2; i <= n; ++i) {
        mpz_class num;
        mpz_ui_pow_ui(num.get_mpz_t(), static_cast<unsigned long>(i - 1),
                      static_cast<unsigned long>(i - 2));
        sv.truncated_sum += mpz_ratio(num, pow_ui(i, i));
    }
    mpz_class fn_num = pow_ui(n, n - 1);
    mpz_class fn_den = pow_ui(n + 1, n - 1);
    sv.tail_bound = mpz_ratio(fn_num, fn_den * n); // f(n+1) * (1/n)
    return sv;
}

// Same series via outward-rounded intervals; the result is converted back to
// exact rationals (from_double is exact), so the enclosure stays rigorous.
SeriesValue pp1_lower_inner_deep(std::uint64_t n) {
    DInterval sum{0.0, 0.0};
    for (std::uint64_t i = 2; i <= n; ++i) {
        const double di = static_cast<double>(i);
        DInterval base{down((di - 1.0) / di), up((di - 1.0) / di)};
        DInterval term = di_div(di_pow(base, i - 2), DInterval{di * di, di * di});
        sum = di_add(sum, term);
    }
    const double dn = static_cast<double>(n);
    DInterval base{down(dn / (dn + 1.0)), up(dn / (dn + 1.0))};
    DInterval tail = di_div(di_pow(base, n - 1), DInterval{dn, dn});

    SeriesValue sv;
    sv.terms_used = n - 1;
    sv.truncated_sum = Rational::from_double(sum.lo);
    sv.tail_bound = (Rational::from_double(sum.hi) - Rational::from_double(sum.lo)) +
                    Rational::from_double(tail.hi);
    return sv;
}

} // namespace

ConstantEnclosure pp1_upper_constant(std::uint64_t terms) {
    if (terms < 1) throw ValidationError("series needs at least one term");
    // a_i = (i-1)!/i^i. The term ratio a_{i+1}/a_i = (1+1/i)^{-(i+1)} is at
    // most 2/5 for every i >= 1, because the binomial expansion gives
    // (1+1/i)^{i+1} >= 2 + 1/i + (i+1)/(2i) >= 5/2 (Stirling would give the
    // sharper e^{1-i} decay, but the rational 2/5 keeps the tail exact).
    SeriesValue sv;
    sv.terms_used = terms;
    mpz_class fact = 1; // (i-1)!
    for (std::uint64_t i = 1; i <= terms; ++i) {
        if (i > 1) fact *= static_cast<unsigned long>(i - 1);
        sv.truncated_sum += mpz_ratio(fact, pow_ui(i, i));
    }
    // Tail: a_{terms+1} * (1 + 2/5 + (2/5)^2 + ...) = a_{terms+1} * 5/3.
    fact *= static_cast<unsigned long>(terms);
    const Rational a_next = mpz_ratio(fact, pow_ui(terms + 1, terms + 1));
    sv.tail_bound = a_next * Rational(5, 3);
    return make_enclosure(std::move(sv), Rational(0));
}

ConstantEnclosure pp1_lower_constant(std::uint64_t max_index) {
    if (max_index < 1) throw ValidationError("series needs at least one index");
    if (max_index < 2) {
        SeriesValue sv;
        sv.terms_used = 0;
        sv.tail_bound = kOne; // f(2)/1 = 1 covers the whole series
        return make_enclosure(std::move(sv), kOne);
    }
    SeriesValue sv =
        max_index <= 500 ? pp1_lower_inner_exact(max_index) : pp1_lower_inner_deep(max_index);
    return make_enclosure(std::move(sv), kOne);
}

Rational ttilde(std::uint64_t m) {
    if (m < 1) throw ValidationError("m must be at least 1");
    Rational t(1);
    mpz_class fact = 1; // (i-1)!
    for (std::uint64_t i = 2; i <= m; ++i) {
        fact *= static_cast<unsigned long>(i - 1);
        t = t * Rational(static_cast<long>(i), static_cast<long>(i - 1)) +
            mpz_ratio(fact, pow_ui(i, i - 1));
    }
    return t;
}

Rational ttilde_closed_form(std::uint64_t m) {
    if (m < 1) throw ValidationError("m must be at least 1");
    Rational sum;
    mpz_class fact = 1;
    for (std::uint64_t i = 1; i <= m; ++i) {
        if (i > 1) fact *= static_cast<unsigned long>(i - 1);
        sum += mpz_ratio(fact, pow_ui(i, i));
    }
    return Rational(static_cast<long>(m)) * sum;
}

Rational pp1_lower_recursion(std::uint64_t m) {
    if (m < 1) throw ValidationError("m must be at least 1");
    Rational u(1);
    for (std::uint64_t i = 2; i <= m; ++i) {
        mpz_class num;
        mpz_ui_pow_ui(num.get_mpz_t(), static_cast<unsigned long>(i - 1),
                      static_cast<unsigned long>(i - 2));
        u = u * Rational(static_cast<long>(i), static_cast<long>(i - 1)) +
            mpz_ratio(num, pow_ui(i, i - 1));
    }
    return u;
}

Rational pp1_lower_closed_form(std::uint64_t m) {
    if (m < 1) throw ValidationError("m must be at least 1");
    Rational sum(1);
    for (std::uint64_t i = 2; i <= m; ++i) {
        mpz_class num;
        mpz_ui_pow_ui(num.get_mpz_t(), static_cast<unsigned long>(i - 1),
                      static_cast<unsigned long>(i - 2));
        sum += mpz_ratio(num, pow_ui(i, i));
    }
    return Rational(static_cast<long>(m)) * sum;
}

Rational lorden_ratio_bound(const Rational& x) {
    if (x < Rational(1, 2) || x > kOne)
        throw ValidationError("bound is established only for 1/2 <= x <= 1");
    return kOne / (kOne + x * x + (kOne - x) * (kOne - x));
}

Rational lorden_overshoot_bound(const DiscreteDistribution& F) {
    const Rational ex = F.expected_size();
    if (ex.is_zero()) throw ValidationError("expected size is zero");
    return F.second_moment() / ex;
}

Rational fmk_tail(std::uint64_t m, std::uint64_t k, std::uint64_t i) {
    if (m < 1 || k < 2) throw ValidationError("family parameters require m >= 1 and k >= 2");
    if (i < 2 || i > k - 1)
        throw OutOfValidatedRangeError("tail formula is validated for 2 <= i <= k-1 only (i=" +
                                       std::to_string(i) + ", k=" + std::to_string(k) + ")");
    mpz_class inner = 0; // sum_{j=1..m-1} j^(i-1)
    for (std::uint64_t j = 1; j + 1 <= m; ++j) inner += pow_ui(j, i - 1);
    const mpz_class den = pow_ui(2, i) * pow_ui(m, i);
    Rational tail = mpz_ratio(pow_ui(m, i), den) + mpz_ratio(inner * mpz_class(static_cast<unsigned long>(i)), den);
    if (tail.sign() < 0 || tail > kOne) throw std::logic_error("tail probability escapes [0,1]");
    return tail;
}

Rational fmk_lower_ET(std::uint64_t m, std::uint64_t k) {
    if (m < 1 || k < 3) throw ValidationError("family parameters require m >= 1 and k >= 3");
    // P[T > 0] = P[T > 1] = 1 since every size is strictly below 1.
    Rational et(2);
    for (std::uint64_t i = 2; i <= k - 1; ++i) et += fmk_tail(m, k, i);
    return et;
}

Rational pptwo_tail(std::uint64_t m, std::uint64_t i) {
    if (m < 1) throw ValidationError("m must be at least 1");
    if (i < 2) throw ValidationError("tail formula starts at i = 2");
    mpz_class inner = 0; // sum_{j=2..m} i (j-1)^(i-1)
    for (std::uint64_t j = 2; j <= m; ++j)
        inner += pow_ui(j - 1, i - 1) * mpz_class(static_cast<unsigned long>(i));
    const mpz_class den = pow_ui(2 * m, i);
    Rational tail = mpz_ratio(pow_ui(m, i), den) + mpz_ratio(inner, den);
    if (tail.sign() < 0 || tail > kOne) throw std::logic_error("tail probability escapes [0,1]");
    return tail;
}

SeriesValue pptwo_ET_upper(std::uint64_t m, std::uint64_t terms) {
    if (terms < 2) throw ValidationError("needs at least the i = 2 term");
    SeriesValue sv;
    sv.terms_used = terms - 1;
    sv.truncated_sum = Rational(2);
    for (std::uint64_t i = 2; i <= terms; ++i) sv.truncated_sum += pptwo_tail(m, i);
    // Each tail term is at most 2^{1-i}: the inner sum obeys
    // sum_{t=1..m-1} t^{i-1} < m^i/i, so the whole geometric tail beyond
    // `terms` is bounded by 2^{1-terms}.
    sv.tail_bound = mpz_ratio(mpz_class(1), pow_ui(2, terms - 1));
    return sv;
}

bool covers(const std::vector<std::uint32_t>& v, std::uint32_t n) {
    if (n < 1) throw ValidationError("n must be at least 1");
    if (v.size() < n) throw ValidationError("vector shorter than n");
    std::vector<std::uint32_t> cnt(n + 1, 0);
    for (std::uint32_t e : v) {
        if (e < 1 || e > n) throw ValidationError("entry out of range 1..n");
        ++cnt[e];
    }
    // i-th largest >= n-i+1 for all i  <=>  #{entries >= s} >= n-s+1 for all s.
    std::uint64_t at_least = 0;
    for (std::uint32_t s = n; s >= 1; --s) {
        at_least += cnt[s];
        if (at_least < n - s + 1) return false;
    }
    return true;
}

mpz_class parking_formula(std::uint32_t n) {
    if (n < 1) throw ValidationError("n must be at least 1");
    return pow_ui(n + 1, n - 1);
}

mpz_class parking_count(std::uint32_t n) {
    if (n < 1) throw ValidationError("n must be at least 1");
    const mpz_class expect = parking_formula(n);
    if (n > 7) return expect; // formula-only mode: n^n enumeration is too large
    std::vector<std::uint32_t> v(n, 1);
    mpz_class count = 0;
    for (;;) {
        if (covers(v, n)) ++count;
        std::size_t pos = 0;
        while (pos < n && v[pos] == n) v[pos++] = 1;
        if (pos == n) break;
        ++v[pos];
    }
    if (count != expect)
        throw std::logic_error("brute-force covering count " + count.get_str() +
                               " differs from the closed form " + expect.get_str());
    return count;
}

double cover_fail_bound(std::uint32_t a) {
    if (a < 5) throw ValidationError("the bound requires a >= 5 (it needs 2a/e^(a-2) < 1)");
    const double da = a;
    const double ea = std::exp(da);
    const double e2 = std::exp(da - 2.0);
    return 1.0 / (ea - 1.0) +
           (1.0 / (std::exp(1.0) * da)) * (1.0 / (e2 / (2.0 * da) - 1.0) - 2.0 * da / e2);
}

CoverFailRate cover_fail_rate_mc(std::uint32_t n, std::uint32_t a, std::uint64_t trials,
                                 RandomSeed seed, unsigned threads) {
    if (n < 1 || a < 1) throw ValidationError("n and a must be at least 1");
    if (trials < 1) throw ValidationError("needs at least one trial");
    const std::uint64_t length = static_cast<std::uint64_t>(a) * n;

    struct Partial {
        std::uint64_t failures = 0;
    };
    auto parts = detail::run_blocks<Partial>(
        trials, threads, [&](Partial& p, std::uint64_t first, std::uint64_t last) {
            std::vector<std::uint32_t> cnt(n + 1);
            for (std::uint64_t t = first; t < last; ++t) {
                Rng rng(RandomSeed{seed.seed, seed.stream + t});
                std::fill(cnt.begin(), cnt.end(), 0u);
                for (std::uint64_t i = 0; i < length; ++i)
                    ++cnt[1 + static_cast<std::uint32_t>(rng.below(n))];
                std::uint64_t at_least = 0;
                bool ok = true;
                for (std::uint32_t s = n; s >= 1; --s) {
                    at_least += cnt[s];
                    if (at_least < n - s + 1) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) ++p.failures;
            }
        });

    std::uint64_t failures = 0;
    for (const auto& p : parts) failures += p.failures;
    CoverFailRate out;
    out.trials = trials;
    out.rate = static_cast<double>(failures) / static_cast<double>(trials);
    out.std_error = std::sqrt(std::max(out.rate * (1.0 - out.rate), 0.0) /
                              static_cast<double>(trials));
    return out;
}

} // namespace bincover
