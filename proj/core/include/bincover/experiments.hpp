#pragma once
// Monte Carlo and exhaustive-enumeration harness: random-order ratios,
// concatenation convergence, deviation diagnostics, the exact prefix
// total-variation check, and the adversarial survival event. All estimators
// accumulate in exact integer or rational arithmetic, so results are
// identical for every worker count.

#include <cstdint>
#include <optional>
#include <vector>

#include "bincover/distribution.hpp"
#include "bincover/options.hpp"
#include "bincover/rational.hpp"
#include "bincover/rng.hpp"

namespace bincover {

struct TrialReport {
    double estimate = 0.0;
    double std_error = 0.0; // sample standard deviation / sqrt(trials)
    std::uint64_t trials = 0;
    RandomSeed seed;
    std::optional<Rational> exact_reference;
};

// Large/small split of the minimal list realizing F, with the small side
// zero-padded to a multiple of the large count.
struct LargeSmallDecomposition {
    std::uint64_t large_count = 0; // items strictly above 1/2
    std::uint64_t small_count = 0; // remaining items, after zero padding
    Rational threshold_item;       // median-rank large item b*
    Rational s_star;               // 1 - b*, strictly below 1/2
};
LargeSmallDecomposition large_small_decomposition(const DiscreteDistribution& F);

// Mean of bins(sigma(L)) / OPT(L) over uniform permutations sigma.
// OPT comes from the exact oracle unless a caller-supplied value overrides
// it (for long but perfectly packable lists where OPT(L) = s(L)).
TrialReport random_order_ratio_estimate(const ItemList& L, std::uint64_t trials, RandomSeed seed,
                                        std::optional<std::uint64_t> opt_override = {},
                                        const AnalysisOptions& options = {}, unsigned threads = 0);

// Random-order ratio estimates for L^j, j = 1..j_max. When OPT(L) = s(L)
// the reference scales exactly; otherwise each concatenation is solved
// exactly. exact_reference carries the OPT value used per j.
std::vector<TrialReport> concat_convergence(const ItemList& L, std::uint64_t j_max,
                                            std::uint64_t trials, RandomSeed seed,
                                            const AnalysisOptions& options = {},
                                            unsigned threads = 0);

// |mean_sigma[bins(sigma(L))] - N * pi(c)| / N^(2/3), with pi(c) = 1/E[T]
// taken from the exact chain of the induced distribution (zero sizes are
// stripped and the rate rescaled, and the identity holds for periodic
// chains as well).
double dnf_deviation_diagnostic(const ItemList& L, std::uint64_t trials, RandomSeed seed,
                                const AnalysisOptions& options = {}, unsigned threads = 0);

// |OPT(L) - N * gamma| / N^(2/3); exactly 0 for zero-waste lists, where
// OPT(L) = s(L) = N * E[X] by construction.
double opt_deviation_diagnostic(const ItemList& L, const AnalysisOptions& options = {});

struct TvReport {
    Rational tv;    // exact total variation between the two prefix laws
    Rational bound; // b^2 / (2N)
};
// Exhaustive comparison of a length-b prefix of a uniform permutation of L
// against b i.i.d. draws from the induced distribution.
TvReport tv_prefix_check(const ItemList& L, std::uint32_t b);

enum class PrefixAlgorithm { dnf, opt };

struct GapReport {
    double gap = 0.0;   // |lhs.estimate - rhs.estimate|
    double bound = 0.0; // b^3 / N
    double slack = 0.0; // 4 * (lhs.std_error + rhs.std_error)
    TrialReport lhs;    // algorithm on permutation prefixes
    TrialReport rhs;    // algorithm on i.i.d. samples
    bool within = false;
};
// Estimated |E[A(prefix_b(sigma(L)))] - E[A(I_b(F)))]| for A in {DNF, OPT}.
GapReport expectation_gap_check(const ItemList& L, std::uint32_t b, std::uint64_t trials,
                                RandomSeed seed, PrefixAlgorithm algorithm,
                                const AnalysisOptions& options = {}, unsigned threads = 0);

struct EquivalenceReport {
    TrialReport lhs; // E[bins / OPT]
    TrialReport rhs; // E[bins] / E[OPT], delta-method standard error
    std::uint64_t resamples = 0; // draws rejected because OPT was 0
    bool overlap = false;        // |lhs - rhs| <= 3 * (se_lhs + se_rhs)
};
// Finite-n sanity check that the two ratio-of-expectation readings agree.
EquivalenceReport measure_equivalence_check(const DiscreteDistribution& F, std::size_t n,
                                            std::uint64_t trials, RandomSeed seed,
                                            const AnalysisOptions& options = {},
                                            unsigned threads = 0);

// P[first 15 n / large_count draws are all small and their total reaches
// s*], sampling from the zero-padded realization of F.
TrialReport event_ef_estimate(const DiscreteDistribution& F, std::uint64_t trials,
                              RandomSeed seed, unsigned threads = 0);

} // namespace bincover
