#include "bincover/families.hpp"

#include <algorithm>
#include <map>

#include "bincover/errors.hpp"

namespace bincover {

namespace {

// Builds the distribution, then remaps certificate configs from construction
// order to the sorted support order before attaching.
DiscreteDistribution with_hint(std::vector<Rational> sizes, std::vector<Rational> probs,
                               std::vector<PackingConfiguration> configs,
                               std::vector<Rational> alphas) {
    std::vector<Rational> original = sizes;
    DiscreteDistribution F = DiscreteDistribution::make(std::move(sizes), std::move(probs));
    std::map<Rational, size_t> pos;
    for (size_t i = 0; i < F.support_size(); ++i) pos.emplace(F.sizes()[i], i);
    for (PackingConfiguration& c : configs) {
        std::vector<std::uint32_t> remapped(F.support_size(), 0);
        for (size_t i = 0; i < c.counts.size(); ++i)
            if (c.counts[i]) remapped[pos.at(original[i])] += c.counts[i];
        c.counts = std::move(remapped);
        c.kind = PackingConfiguration::Kind::perfect;
    }
    F.attach_packing_hint(PackingHint{std::move(configs), std::move(alphas)});
    return F;
}

} // namespace

DiscreteDistribution family_fmk(std::uint32_t m, std::uint32_t k) {
    if (m < 1) throw ValidationError("fmk needs m >= 1");
    if (k < 2) throw ValidationError("fmk needs k >= 2");
    if (k == 2)
        throw ValidationError("fmk with k = 2 degenerates: (1/2)^1 and its complement coincide");
    std::vector<Rational> sizes, probs;
    const Rational p(1, 2L * m);
    const Rational one(1);
    Rational pw(1);
    const Rational inv_k(1, static_cast<long>(k));
    std::vector<PackingConfiguration> configs;
    std::vector<Rational> alphas;
    for (std::uint32_t j = 1; j <= m; ++j) {
        pw = pw * inv_k;
        sizes.push_back(pw);            // index 2(j-1)
        sizes.push_back(one - pw);      // index 2(j-1)+1
        probs.push_back(p);
        probs.push_back(p);
        PackingConfiguration c;
        c.counts.assign(2 * m, 0);
        c.counts[2 * (j - 1)] = 1;
        c.counts[2 * (j - 1) + 1] = 1;
        configs.push_back(std::move(c));
        alphas.push_back(p);
    }
    return with_hint(std::move(sizes), std::move(probs), std::move(configs), std::move(alphas));
}

DiscreteDistribution family_pp1(std::vector<Rational> sizes,
                                std::vector<std::uint32_t> counts) {
    if (sizes.size() != counts.size())
        throw ValidationError("sizes and counts differ in length");
    long total = 0;
    Rational weight;
    for (size_t i = 0; i < sizes.size(); ++i) {
        if (counts[i] == 0)
            throw ValidationError("every size must appear in the configuration");
        total += counts[i];
        weight += Rational(static_cast<long>(counts[i])) * sizes[i];
    }
    if (weight != Rational(1))
        throw NotPerfectConfigurationError("configuration weight is " + weight.str() +
                                           ", expected exactly 1");
    std::vector<Rational> probs;
    probs.reserve(sizes.size());
    for (std::uint32_t c : counts) probs.push_back(Rational(c, total));
    PackingConfiguration cfg;
    cfg.counts = std::move(counts);
    return with_hint(std::move(sizes), std::move(probs), {std::move(cfg)},
                     {Rational(1, total)});
}

DiscreteDistribution family_pptwo(const std::vector<std::pair<Rational, Rational>>& pairs) {
    if (pairs.empty()) throw ValidationError("need at least one complement pair");
    const long m = static_cast<long>(pairs.size());
    std::vector<Rational> sizes, probs;
    std::vector<PackingConfiguration> configs;
    std::vector<Rational> alphas;
    const Rational one(1), p(1, 2 * m);
    for (size_t j = 0; j < pairs.size(); ++j) {
        const auto& [g, s] = pairs[j];
        if (g + s != one)
            throw ValidationError("pair (" + g.str() + ", " + s.str() + ") does not sum to 1");
        if (!(s < g))
            throw ValidationError("pair must be ordered large before small, strictly");
        if (s.sign() <= 0) throw InvalidItemError("small part of pair must be positive");
        sizes.push_back(g);
        sizes.push_back(s);
        probs.push_back(p);
        probs.push_back(p);
        PackingConfiguration c;
        c.counts.assign(2 * pairs.size(), 0);
        c.counts[2 * j] = 1;
        c.counts[2 * j + 1] = 1;
        configs.push_back(std::move(c));
        alphas.push_back(p);
    }
    return with_hint(std::move(sizes), std::move(probs), std::move(configs), std::move(alphas));
}

DiscreteDistribution family_uniform_discrete(std::uint32_t k) {
    if (k < 1) throw ValidationError("uniform discretization needs k >= 1");
    std::vector<Rational> sizes, probs;
    const Rational p(1, static_cast<long>(k));
    for (std::uint32_t i = 1; i <= k; ++i) {
        sizes.push_back(Rational(static_cast<long>(i), static_cast<long>(k)));
        probs.push_back(p);
    }
    std::vector<PackingConfiguration> configs;
    std::vector<Rational> alphas;
    for (std::uint32_t i = 1; 2 * i < k; ++i) {
        PackingConfiguration c;
        c.counts.assign(k, 0);
        c.counts[i - 1] = 1;
        c.counts[k - i - 1] = 1;
        configs.push_back(std::move(c));
        alphas.push_back(p);
    }
    if (k % 2 == 0) {
        PackingConfiguration c;
        c.counts.assign(k, 0);
        c.counts[k / 2 - 1] = 2;
        configs.push_back(std::move(c));
        alphas.push_back(Rational(1, 2L * k));
    }
    {
        PackingConfiguration c;
        c.counts.assign(k, 0);
        c.counts[k - 1] = 1;
        configs.push_back(std::move(c));
        alphas.push_back(p);
    }
    return with_hint(std::move(sizes), std::move(probs), std::move(configs), std::move(alphas));
}

} // namespace bincover
