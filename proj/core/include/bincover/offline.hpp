#pragma once
// Exact offline machinery: the optimal covering count, membership of a
// distribution in the perfect-packing cone, covering-rate bounds, and the
// zero-waste shrink construction.

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "bincover/distribution.hpp"
#include "bincover/options.hpp"
#include "bincover/rational.hpp"

namespace bincover {

// Maximal number of pairwise disjoint groups of items each summing to >= 1.
// Exhaustive over minimal covering configurations with memoization on the
// multiset of remaining items; positive items only (zeros never help).
std::uint64_t opt_exact(const ItemList& L, std::size_t opt_cap = 16);

// One optimal grouping. groups holds item indices into L; items outside every
// group are left unpacked.
struct OptPacking {
    std::uint64_t bins = 0;
    std::vector<std::vector<std::size_t>> groups;
};
OptPacking opt_packing(const ItemList& L, std::size_t opt_cap = 16);

// All b in N_0^m with sum b_i s_i = 1 exactly, in lexicographic order.
std::vector<PackingConfiguration> enumerate_perfect_configs(const DiscreteDistribution& F,
                                                            std::size_t config_cap = 100000);

// Covering configurations that are minimal: the group sum reaches 1 but drops
// below 1 when any used item is removed.
std::vector<PackingConfiguration> enumerate_covering_configs(const DiscreteDistribution& F,
                                                             std::size_t config_cap = 100000);

struct PerfectPackingCertificate {
    std::vector<PackingConfiguration> configurations;
    std::vector<Rational> coefficients; // alpha >= 0 with sum alpha_j b^j = p exactly
};
struct PackingRefutation {
    std::vector<Rational> separator; // y with y.b^j <= 0 for all configs and y.p > 0
};
using PackingDecision = std::variant<PerfectPackingCertificate, PackingRefutation>;

// Exact cone membership. A hint attached to F is verified and used when
// options.use_hints; otherwise the feasibility LP is solved from scratch.
PackingDecision is_perfect_packing(const DiscreteDistribution& F,
                                   const AnalysisOptions& options = {});

struct DegreeResult {
    std::uint32_t degree = 0;
    std::vector<PackingConfiguration> configurations; // witness support
    std::vector<Rational> coefficients;
};
// Smallest number of perfect configurations whose mixture realizes the
// probability vector. Requires a perfect-packing distribution.
DegreeResult degree(const DiscreteDistribution& F, const AnalysisOptions& options = {});

enum class GammaProvenance { exact_perfect_packing, interval_bound };

struct GammaEstimate {
    GammaProvenance provenance = GammaProvenance::exact_perfect_packing;
    bool exact = true;
    Rational upper;         // exact rate, or the covering-configuration LP bound
    double lower = 0.0;     // exact rate, or a Monte Carlo estimate (negatively biased)
    double error_bar = 0.0; // standard error of the Monte Carlo estimate
    std::uint64_t mc_trials = 0;
};
// Asymptotic covered-bins-per-item rate gamma(F): exactly E[X] for
// perfect-packing F, otherwise the interval [Monte Carlo lower, LP upper].
GammaEstimate gamma_rate(const DiscreteDistribution& F, const AnalysisOptions& options = {});

// Item-wise shrink of L to a list H with the same length and OPT but zero
// optimal waste: every covered bin of an optimal packing is reduced,
// largest items first, to sum exactly 1; unpacked items drop to 0.
ItemList perfect_shrink(const ItemList& L, std::size_t opt_cap = 16);

} // namespace bincover
