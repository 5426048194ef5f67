#include "bincover/distribution.hpp"

#include <algorithm>
#include <numeric>

#include "bincover/errors.hpp"

namespace bincover {

DiscreteDistribution DiscreteDistribution::make(std::vector<Rational> sizes,
                                                std::vector<Rational> probs,
                                                bool allow_zero_sizes) {
    if (sizes.empty()) throw ValidationError("distribution must have nonempty support");
    if (sizes.size() != probs.size())
        throw ValidationError("sizes and probabilities differ in length");

    std::vector<size_t> order(sizes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return sizes[a] < sizes[b]; });

    DiscreteDistribution F;
    F.sizes_.reserve(sizes.size());
    F.probs_.reserve(sizes.size());
    Rational psum;
    const Rational one(1);
    for (size_t k = 0; k < order.size(); ++k) {
        const Rational& s = sizes[order[k]];
        const Rational& p = probs[order[k]];
        if (s.sign() < 0 || s > one)
            throw InvalidItemError("size " + s.str() + " outside [0,1]");
        if (s.is_zero() && !allow_zero_sizes)
            throw InvalidItemError("size 0 not allowed in this context");
        if (k > 0 && F.sizes_.back() == s)
            throw ValidationError("duplicate size " + s.str() + " in support");
        if (p.sign() <= 0)
            throw ValidationError("probability of size " + s.str() + " must be positive");
        F.sizes_.push_back(s);
        F.probs_.push_back(p);
        psum += p;
    }
    if (psum != one)
        throw ValidationError("probabilities sum to " + psum.str() + ", expected 1");
    return F;
}

Rational DiscreteDistribution::expected_size() const {
    Rational e;
    for (size_t i = 0; i < sizes_.size(); ++i) e += sizes_[i] * probs_[i];
    return e;
}

Rational DiscreteDistribution::second_moment() const {
    Rational e;
    for (size_t i = 0; i < sizes_.size(); ++i) e += sizes_[i] * sizes_[i] * probs_[i];
    return e;
}

ItemList::ItemList(std::vector<Rational> items) : items_(std::move(items)) {
    const Rational one(1);
    for (const Rational& x : items_) {
        if (x.sign() < 0 || x > one)
            throw InvalidItemError("item " + x.str() + " outside [0,1]");
        total_ += x;
    }
}

ItemList ItemList::concat(const ItemList& other) const {
    std::vector<Rational> v = items_;
    v.insert(v.end(), other.items_.begin(), other.items_.end());
    return ItemList(std::move(v));
}

ItemList ItemList::repeat(size_t j) const {
    std::vector<Rational> v;
    v.reserve(items_.size() * j);
    for (size_t k = 0; k < j; ++k) v.insert(v.end(), items_.begin(), items_.end());
    return ItemList(std::move(v));
}

DiscreteDistribution induced_distribution(const ItemList& L) {
    if (L.length() == 0) throw EmptyListError();
    std::vector<Rational> sorted = L.items();
    std::sort(sorted.begin(), sorted.end());
    std::vector<Rational> sizes, probs;
    const Rational n(static_cast<long>(L.length()));
    size_t i = 0;
    while (i < sorted.size()) {
        size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        sizes.push_back(sorted[i]);
        probs.push_back(Rational(static_cast<long>(j - i)) / n);
        i = j;
    }
    return DiscreteDistribution::make(std::move(sizes), std::move(probs), true);
}

ItemList realizing_list(const DiscreteDistribution& F, std::uint64_t N) {
    if (N == 0) throw ValidationError("realizing list needs N >= 1");
    mpz_class nz(static_cast<unsigned long>(N));
    // Every N*p_i must be integral; the minimal feasible N is the lcm of the
    // probability denominators, which the error message suggests.
    mpz_class need(1);
    for (const Rational& p : F.probs()) need = lcm(need, p.den());
    std::vector<Rational> items;
    items.reserve(N);
    for (size_t i = 0; i < F.support_size(); ++i) {
        Rational cnt = Rational(mpz_class(nz), mpz_class(1)) * F.probs()[i];
        if (!cnt.is_integer())
            throw NotRealizableError("N=" + std::to_string(N) +
                                     " does not realize this distribution; any multiple of " +
                                     need.get_str() + " works");
        auto c = to_u64(cnt.num());
        if (!c) throw TooLargeError("realizing list count exceeds 64 bits");
        for (std::uint64_t k = 0; k < *c; ++k) items.push_back(F.sizes()[i]);
    }
    return ItemList(std::move(items));
}

Sampler::Sampler(const DiscreteDistribution& F) {
    mpz_class den(1);
    for (const Rational& p : F.probs()) den = lcm(den, p.den());
    mpz_class acc(0);
    cum_big_.reserve(F.support_size());
    for (const Rational& p : F.probs()) {
        mpz_class w = p.num() * (den / p.den());
        acc += w;
        cum_big_.push_back(acc);
    }
    // acc == den exactly because the probabilities sum to 1.
    total_big_ = den;
    if (auto t = to_u64(total_big_)) {
        fast_ = true;
        total_u64_ = *t;
        cum_u64_.reserve(cum_big_.size());
        for (const mpz_class& c : cum_big_) cum_u64_.push_back(*to_u64(c));
        cum_big_.clear();
        total_big_ = 0;
    } else {
        total_bits_ = mpz_sizeinbase(total_big_.get_mpz_t(), 2);
    }
}

size_t Sampler::draw_big(Rng& rng) const {
    // Rejection over [0, 2^total_bits_): each candidate is assembled from
    // whole rng words, so the draw stays exactly uniform.
    const size_t words = (total_bits_ + 63) / 64;
    mpz_class u;
    for (;;) {
        u = 0;
        for (size_t w = 0; w < words; ++w) {
            u <<= 64;
            std::uint64_t x = rng.next_u64();
            mpz_class part;
            mpz_import(part.get_mpz_t(), 1, 1, sizeof(x), 0, 0, &x);
            u |= part;
        }
        u >>= (words * 64 - total_bits_);
        if (u < total_big_) break;
    }
    size_t lo = 0;
    while (cum_big_[lo] <= u) ++lo;
    return lo;
}

ItemList sample_iid(const DiscreteDistribution& F, std::uint64_t n, RandomSeed seed) {
    Sampler smp(F);
    Rng rng(seed);
    std::vector<Rational> items;
    items.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) items.push_back(F.sizes()[smp.draw(rng)]);
    return ItemList(std::move(items));
}

} // namespace bincover
