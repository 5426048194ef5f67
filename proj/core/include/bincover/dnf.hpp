#pragma once

#include <cstdint>
#include <vector>

#include "bincover/distribution.hpp"
#include "bincover/rational.hpp"
#include "bincover/rng.hpp"

namespace bincover {

// One bin close: which item (1-based position in the list) pushed the level
// to >= 1, and by how much it overshot.
struct CloseEvent {
    std::uint64_t item_index;
    Rational overshoot; // level - 1 at the close, in [0, 1)
};

// Full trace of one deterministic pass. Conservation holds exactly:
// s(L) + start_level = bins_closed + sum of overshoots + final_level.
struct DnfRun {
    std::uint64_t bins_closed = 0;
    Rational start_level;
    Rational final_level; // open-bin level after the last item; 0 if it just closed
    std::vector<CloseEvent> close_events;
};

// Pours L into one bin after another, starting from the given level. A bin
// closes the moment its level reaches 1; overshoot 0 counts as closed, so
// perfect sequences register zero waste. The next item lands in a fresh bin.
DnfRun dnf_run(const Rational& start, const ItemList& L);
inline DnfRun dnf_run(const ItemList& L) { return dnf_run(Rational(0), L); }

// Bins-only fast path, no telemetry allocation.
std::uint64_t dnf_bins(const ItemList& L);

// s(L) - bins. A covering algorithm never covers more than s(L) bins, so a
// larger count is rejected as caller error.
Rational waste(std::uint64_t bins, const ItemList& L);

// One excursion: draw X_1, X_2, ... iid from F until the running sum
// reaches 1; T is the number of draws, R the excess over 1.
struct StoppingSample {
    std::uint64_t items; // T
    Rational overshoot;  // R = S_T - 1
};

StoppingSample stopping_time_sample(const DiscreteDistribution& F, RandomSeed seed);

// Exact aggregate over many excursions. Sums are integers/rationals, so the
// aggregate is identical for any thread count or summation order; floating
// point appears only in the derived means and standard errors.
struct ExcursionStats {
    std::uint64_t trials = 0;
    mpz_class sum_items;      // sum of T
    mpz_class sum_items_sq;   // sum of T^2
    Rational sum_overshoot;   // sum of R
    Rational sum_overshoot_sq;

    double mean_items() const;
    double stderr_items() const;
    double mean_overshoot() const;
    double stderr_overshoot() const;
};

// Runs `trials` independent excursions; trial t uses stream seed.stream + t.
// Trial t therefore reproduces stopping_time_sample(F, {seed.seed,
// seed.stream + t}) exactly, whatever the worker count.
ExcursionStats simulate_excursions(const DiscreteDistribution& F, std::uint64_t trials,
                                   RandomSeed seed, unsigned threads = 0);

} // namespace bincover
