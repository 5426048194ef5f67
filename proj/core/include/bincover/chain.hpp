#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bincover/distribution.hpp"
#include "bincover/options.hpp"
#include "bincover/rational.hpp"

namespace bincover {

// Outgoing edges of one state of the bin-level chain. Open edges strictly
// increase the level, so the chain minus its closing edges is acyclic; every
// closing edge returns to the merged closed state c (index 0).
struct ChainRow {
    std::vector<std::pair<std::uint32_t, Rational>> open_edges; // (target index, probability)
    Rational close_mass;   // total probability of closing from this level
    Rational close_excess; // sum over closing sizes s of p(s) * (level + s - 1)
};

// Bin-level Markov chain induced by running the packing rule on iid draws
// from F. State 0 is the closed state c (level 0 merged with "just closed");
// the remaining states are the reachable levels in (0,1), sorted ascending.
// Invariants: each row's probabilities sum to exactly 1; every state is
// reachable from c and can reach c again.
class BinLevelChain {
  public:
    const std::vector<Rational>& states() const { return states_; }
    const std::vector<ChainRow>& rows() const { return rows_; }
    const DiscreteDistribution& source() const { return source_; }
    std::size_t size() const { return states_.size(); }

  private:
    friend BinLevelChain build_chain(const DiscreteDistribution&, std::size_t);
    BinLevelChain(std::vector<Rational> states, std::vector<ChainRow> rows,
                  DiscreteDistribution source)
        : states_(std::move(states)), rows_(std::move(rows)), source_(std::move(source)) {}

    std::vector<Rational> states_;
    std::vector<ChainRow> rows_;
    DiscreteDistribution source_;
};

// Breadth-first closure from c: level l plus size s moves to l+s when below
// 1 and closes otherwise. Throws StateExplosion beyond state_cap. Sizes of
// exactly 0 are rejected: a zero draw at level 0 would revisit c without a
// close, and the identity pi(c) = 1/E[T] that everything downstream checks
// against would no longer hold. Strip zero atoms first; they change nothing
// the chain measures.
BinLevelChain build_chain(const DiscreteDistribution& F, std::size_t state_cap = 200000);

// gcd of all cycle lengths through c. Computed from BFS depths over the full
// edge set, then cross-checked against the interval characterization (period
// d >= 2 exactly when every size lies in [1/d, 1/(d-1))); disagreement is an
// internal error.
std::uint64_t period(const BinLevelChain& chain);

// Stationary distribution, indexed like chain.states().
struct StationaryResult {
    bool exact = false;
    std::vector<Rational> probs;  // filled on the exact path
    std::vector<double> probs_f;  // always filled
    double residual = 0.0;        // max-norm of pi P - pi, 0 when exact
};

// Unique solution of pi = pi P. Aperiodic chains only; periodic chains throw
// PeriodicError and callers use the fixed cycle length instead. Chains above
// exact_cap states are solved in doubles with the residual reported; the
// solve itself is a forward substitution along ascending levels (all inflow
// to a level comes from strictly lower levels or from c), so no pivoting and
// no cancellation occur on either path.
StationaryResult stationary(const BinLevelChain& chain, std::size_t exact_cap = 2000);

// Same system solved by dense rational Gaussian elimination. Quadratically
// more expensive; exists as an independent route for cross-checking the
// sweep on small chains.
std::vector<Rational> stationary_gaussian(const BinLevelChain& chain);

// Forced double-precision sweep regardless of size, with its residual.
StationaryResult stationary_float(const BinLevelChain& chain);

// E[T]: expected draws per closed bin. Two independent exact routes (total
// visits per excursion, and first-step hitting-time equations) must agree;
// for periodic chains the hitting-time route must equal the period.
Rational expected_items_per_bin(const BinLevelChain& chain);

// E[R]: expected excess over 1 at the close, by first-step equations.
Rational expected_overshoot(const BinLevelChain& chain);

// P[T > i]: probability the first i draws never close a bin, exactly.
Rational survival_probability(const BinLevelChain& chain, std::uint64_t i);

// Everything the exact analysis yields for one chain. expected_* carry the
// exact values whenever the chain was solved exactly (always true for the
// periodic path and the rational sweep; absent for the float fallback).
struct ChainAnalysis {
    std::uint64_t state_count = 0;
    std::uint64_t period = 1;
    bool exact = false;
    std::optional<std::vector<Rational>> stationary; // absent when periodic or float-solved
    std::vector<double> stationary_f;
    double solve_residual = 0.0;
    std::optional<Rational> expected_T;
    double expected_T_f = 0.0;
    std::optional<Rational> expected_R;
    double expected_R_f = 0.0;
    Rational expected_size; // E[X], always exact
};

// Runs period detection, the stationary solve (skipped when periodic), and
// the E[T]/E[R] equations, asserting the cross-route identities: visit-sum
// equals hitting-time E[T], and Wald's identity 1 + E[R] = E[T] * E[X].
ChainAnalysis analyze_chain(const BinLevelChain& chain, const AnalysisOptions& options = {});

// How the headline ratio was obtained. periodic: fixed cycle length, ratio
// is exactly 1. perfect_packing: certified distribution, ratio equals
// 1/(E[X] E[T]). gamma_bounded: no certificate, value is the conservative
// quotient pi(c) / (covering-LP upper bound on the offline rate), with the
// Monte Carlo companion attached.
enum class AecrProvenance { periodic, perfect_packing, gamma_bounded };

struct AecrResult {
    AecrProvenance provenance = AecrProvenance::perfect_packing;
    std::optional<Rational> value; // exact when the chain was solved exactly
    double value_f = 0.0;
    std::optional<Rational> gamma_upper;  // gamma_bounded only: LP bound on the offline rate
    std::optional<double> gamma_mc_lower; // gamma_bounded only: sampled lower companion
    std::optional<double> upper_hint;     // gamma_bounded only: pi(c) / gamma_mc_lower
    ChainAnalysis analysis;
};

// Full pipeline: build + analyze the chain, take the periodic shortcut when
// the period is at least 2, otherwise certify perfect packing and use
// 1/(E[X] E[T]), falling back to the gamma quotient. Exact results satisfy
// 1/2 <= value <= 1 on the periodic and perfect-packing paths.
AecrResult aecr_exact(const DiscreteDistribution& F, const AnalysisOptions& options = {});

} // namespace bincover
