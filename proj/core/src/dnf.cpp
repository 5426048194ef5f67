#include "bincover/dnf.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "bincover/errors.hpp"

namespace bincover {

namespace {

void check_start(const Rational& start) {
    if (start.sign() < 0 || start >= Rational(1))
        throw ValidationError("start level must lie in [0, 1), got " + start.str());
}

void add_u128(mpz_class& acc, unsigned __int128 v) {
    const auto hi = static_cast<std::uint64_t>(v >> 64);
    const auto lo = static_cast<std::uint64_t>(v);
    if (hi) {
        mpz_class big(static_cast<unsigned long>(hi));
        big <<= 64;
        acc += big;
    }
    acc += mpz_class(static_cast<unsigned long>(lo));
}

} // namespace

DnfRun dnf_run(const Rational& start, const ItemList& L) {
    check_start(start);
    DnfRun run;
    run.start_level = start;
    Rational level = start;
    const Rational one(1);
    std::uint64_t index = 0;
    for (const Rational& item : L.items()) {
        ++index;
        level += item;
        if (level >= one) {
            run.close_events.push_back(CloseEvent{index, level - one});
            ++run.bins_closed;
            level = Rational(0);
        }
    }
    run.final_level = level;
    return run;
}

std::uint64_t dnf_bins(const ItemList& L) {
    Rational level;
    const Rational one(1);
    std::uint64_t bins = 0;
    for (const Rational& item : L.items()) {
        level += item;
        if (level >= one) {
            ++bins;
            level = Rational(0);
        }
    }
    return bins;
}

Rational waste(std::uint64_t bins, const ItemList& L) {
    Rational w = L.total() - Rational(mpz_class(static_cast<unsigned long>(bins)), mpz_class(1));
    if (w.sign() < 0)
        throw ValidationError("bin count " + std::to_string(bins) + " exceeds total size " +
                              L.total().str());
    return w;
}

StoppingSample stopping_time_sample(const DiscreteDistribution& F, RandomSeed seed) {
    if (!F.has_positive_size()) throw NeverClosesError();
    Sampler sampler(F);
    Rng rng(seed);
    Rational level;
    const Rational one(1);
    std::uint64_t count = 0;
    while (level < one) {
        level += F.sizes()[sampler.draw(rng)];
        ++count;
    }
    return StoppingSample{count, level - one};
}

double ExcursionStats::mean_items() const { return sum_items.get_d() / static_cast<double>(trials); }

double ExcursionStats::stderr_items() const {
    const double n = static_cast<double>(trials);
    const double m1 = sum_items.get_d() / n;
    const double m2 = sum_items_sq.get_d() / n;
    return std::sqrt(std::max(0.0, m2 - m1 * m1) / n);
}

double ExcursionStats::mean_overshoot() const {
    return sum_overshoot.as_double() / static_cast<double>(trials);
}

double ExcursionStats::stderr_overshoot() const {
    const double n = static_cast<double>(trials);
    const double m1 = sum_overshoot.as_double() / n;
    const double m2 = sum_overshoot_sq.as_double() / n;
    return std::sqrt(std::max(0.0, m2 - m1 * m1) / n);
}

namespace {

struct Partial {
    unsigned __int128 t = 0;
    unsigned __int128 t2 = 0;
    unsigned __int128 rnum = 0; // overshoot numerators over the common denominator
    mpz_class rnum2;            // sum of squared numerators; can exceed 128 bits
    Rational r;                 // exact-path accumulators
    Rational r2;
};

// Sizes as integer numerators over the lcm denominator, when that fits well
// inside 64 bits. Levels then stay below 2*denom < 2^63.
struct ScaledSizes {
    bool ok = false;
    std::uint64_t denom = 0;
    std::vector<std::uint64_t> num;
};

ScaledSizes scale_sizes(const DiscreteDistribution& F) {
    mpz_class d(1);
    for (const Rational& s : F.sizes()) d = lcm(d, s.den());
    ScaledSizes out;
    auto d64 = to_u64(d);
    if (!d64 || *d64 > (std::uint64_t(1) << 62)) return out;
    out.ok = true;
    out.denom = *d64;
    out.num.reserve(F.support_size());
    for (const Rational& s : F.sizes()) {
        mpz_class w = s.num() * mpz_class(d / s.den());
        out.num.push_back(*to_u64(w));
    }
    return out;
}

} // namespace

ExcursionStats simulate_excursions(const DiscreteDistribution& F, std::uint64_t trials,
                                   RandomSeed seed, unsigned threads) {
    if (!F.has_positive_size()) throw NeverClosesError();
    ExcursionStats stats;
    stats.trials = trials;
    if (trials == 0) return stats;

    const Sampler sampler(F);
    const ScaledSizes scaled = scale_sizes(F);

    unsigned workers = threads ? threads : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (workers > trials) workers = static_cast<unsigned>(trials);

    std::vector<Partial> parts(workers);
    auto body = [&](unsigned w, std::uint64_t lo, std::uint64_t hi) {
        Partial& p = parts[w];
        if (scaled.ok) {
            const std::uint64_t denom = scaled.denom;
            for (std::uint64_t t = lo; t < hi; ++t) {
                Rng rng(RandomSeed{seed.seed, seed.stream + t});
                std::uint64_t level = 0, steps = 0;
                while (level < denom) {
                    level += scaled.num[sampler.draw(rng)];
                    ++steps;
                }
                const std::uint64_t rn = level - denom;
                p.t += steps;
                p.t2 += static_cast<unsigned __int128>(steps) * steps;
                p.rnum += rn;
                add_u128(p.rnum2, static_cast<unsigned __int128>(rn) * rn);
            }
        } else {
            const Rational one(1);
            for (std::uint64_t t = lo; t < hi; ++t) {
                Rng rng(RandomSeed{seed.seed, seed.stream + t});
                Rational level;
                std::uint64_t steps = 0;
                while (level < one) {
                    level += F.sizes()[sampler.draw(rng)];
                    ++steps;
                }
                const Rational over = level - one;
                p.t += steps;
                p.t2 += static_cast<unsigned __int128>(steps) * steps;
                p.r += over;
                p.r2 += over * over;
            }
        }
    };

    if (workers == 1) {
        body(0, 0, trials);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::uint64_t chunk = trials / workers, extra = trials % workers;
        std::uint64_t lo = 0;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t hi = lo + chunk + (w < extra ? 1 : 0);
            pool.emplace_back(body, w, lo, hi);
            lo = hi;
        }
        for (auto& th : pool) th.join();
    }

    unsigned __int128 t = 0, t2 = 0, rnum = 0;
    mpz_class rnum2;
    Rational r, r2;
    for (Partial& p : parts) {
        t += p.t;
        t2 += p.t2;
        rnum += p.rnum;
        rnum2 += p.rnum2;
        r += p.r;
        r2 += p.r2;
    }
    add_u128(stats.sum_items, t);
    add_u128(stats.sum_items_sq, t2);
    if (scaled.ok) {
        mpz_class num, num2;
        add_u128(num, rnum);
        num2 = rnum2;
        const mpz_class d(static_cast<unsigned long>(scaled.denom));
        stats.sum_overshoot = Rational(num, d);
        stats.sum_overshoot_sq = Rational(num2, d * d);
    } else {
        stats.sum_overshoot = r;
        stats.sum_overshoot_sq = r2;
    }
    return stats;
}

} // namespace bincover
