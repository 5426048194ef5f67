#pragma once

#include <cstddef>
#include <cstdint>

#include "bincover/rng.hpp"

namespace bincover {

// Size limits and knobs for the exact analysis paths. Everything here trades
// completeness for guaranteed termination at desk scale; callers lower the
// caps to fail fast or raise them when they know an instance is benign.
struct AnalysisOptions {
    // Max reachable states (closed state included) in build_chain.
    std::size_t state_cap = 200000;

    // Max states for the exact rational stationary solve. Larger aperiodic
    // chains get a double-precision solve with a residual certificate.
    std::size_t exact_solve_cap = 2000;

    // Max list length for opt_exact's exhaustive search.
    std::size_t opt_cap = 16;

    // Max number of enumerated packing configurations (perfect or covering).
    std::size_t config_cap = 100000;

    // Max number of perfect configurations admitted to the degree subset
    // search before it bails out with the best upper bound found.
    std::size_t degree_cap = 20;

    // Trust (after exact re-verification) packing hints attached by family
    // constructors instead of running the simplex from scratch.
    bool use_hints = true;

    // Monte Carlo side of gamma_rate for non-perfect-packing distributions:
    // sample size per trial and trial count for the lower estimate.
    std::size_t gamma_mc_n = 14;
    std::uint64_t gamma_mc_trials = 800;
    std::uint64_t gamma_mc_seed = kDefaultSeed;
};

} // namespace bincover
