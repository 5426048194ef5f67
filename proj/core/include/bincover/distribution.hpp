#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bincover/rational.hpp"
#include "bincover/rng.hpp"

namespace bincover {

// Multiplicity vector over a distribution's size vector. kind tells whether
// the counts sum to exactly 1 (perfect) or to >= 1 with every item needed
// (minimal covering).
struct PackingConfiguration {
    enum class Kind { perfect, covering };

    std::vector<std::uint32_t> counts;
    Kind kind = Kind::perfect;

    Rational weight(const std::vector<Rational>& sizes) const {
        Rational w;
        for (size_t i = 0; i < counts.size(); ++i)
            if (counts[i]) w += Rational(static_cast<long>(counts[i])) * sizes[i];
        return w;
    }
    std::uint64_t total_items() const {
        std::uint64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
    bool operator==(const PackingConfiguration& o) const { return counts == o.counts; }
};

// A known perfect-packing mixture attached by a family constructor:
// sum of alpha_j * config_j equals the probability vector exactly.
struct PackingHint {
    std::vector<PackingConfiguration> configs;
    std::vector<Rational> alphas;
};

// Finitely supported distribution on rational sizes in [0,1].
// Sizes are distinct and sorted ascending; probabilities are positive and
// sum to exactly 1. Size 0 is rejected unless explicitly allowed, since it
// makes configuration enumeration unbounded.
class DiscreteDistribution {
  public:
    static DiscreteDistribution make(std::vector<Rational> sizes, std::vector<Rational> probs,
                                     bool allow_zero_sizes = false);

    const std::vector<Rational>& sizes() const { return sizes_; }
    const std::vector<Rational>& probs() const { return probs_; }
    size_t support_size() const { return sizes_.size(); }

    const Rational& min_size() const { return sizes_.front(); }
    const Rational& max_size() const { return sizes_.back(); }

    Rational expected_size() const;        // E[X]
    Rational second_moment() const;        // E[X^2]

    bool has_positive_size() const { return max_size() > Rational(0); }

    const std::optional<PackingHint>& packing_hint() const { return hint_; }
    void attach_packing_hint(PackingHint h) { hint_ = std::move(h); }

    bool operator==(const DiscreteDistribution& o) const {
        return sizes_ == o.sizes_ && probs_ == o.probs_;
    }

  private:
    DiscreteDistribution() = default;
    std::vector<Rational> sizes_;
    std::vector<Rational> probs_;
    std::optional<PackingHint> hint_;
};

// Finite sequence of item sizes in [0,1]; order is meaningful.
class ItemList {
  public:
    ItemList() = default;
    explicit ItemList(std::vector<Rational> items);

    const std::vector<Rational>& items() const { return items_; }
    size_t length() const { return items_.size(); }   // N(L)
    const Rational& total() const { return total_; }  // s(L)

    ItemList concat(const ItemList& other) const;
    ItemList repeat(size_t j) const;

  private:
    std::vector<Rational> items_;
    Rational total_;
};

DiscreteDistribution induced_distribution(const ItemList& L);

// Shortest-order list realizing F with exactly N items; requires every
// N*p_i to be an integer. Items come back sorted ascending.
ItemList realizing_list(const DiscreteDistribution& F, std::uint64_t N);

// Exact index sampler for a discrete distribution. Probabilities are turned
// into integer weights over their common denominator, so draws are unbiased
// with no floating point involved. The common case (denominator fits in 64
// bits) costs one rng word per draw.
class Sampler {
  public:
    explicit Sampler(const DiscreteDistribution& F);

    size_t draw(Rng& rng) const {
        if (fast_) {
            std::uint64_t u = rng.below(total_u64_);
            size_t lo = 0;
            while (cum_u64_[lo] <= u) ++lo;
            return lo;
        }
        return draw_big(rng);
    }

  private:
    size_t draw_big(Rng& rng) const;

    bool fast_ = false;
    std::uint64_t total_u64_ = 0;
    std::vector<std::uint64_t> cum_u64_;

    mpz_class total_big_;
    std::vector<mpz_class> cum_big_;
    size_t total_bits_ = 0;
};

ItemList sample_iid(const DiscreteDistribution& F, std::uint64_t n, RandomSeed seed);

} // namespace bincover
