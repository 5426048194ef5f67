#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bincover/distribution.hpp"

namespace bincover {

// Geometric pair family: sizes (1/k)^j and 1 - (1/k)^j for j = 1..m, all with
// probability 1/(2m). k = 2 collides at j = 1 (both halves equal 1/2) and is
// rejected. Pairing each small size with its complement yields a perfect
// packing certificate, attached to the result.
DiscreteDistribution family_fmk(std::uint32_t m, std::uint32_t k);

// Single-configuration family: counts b over the given sizes must satisfy
// sum b_i * s_i = 1 exactly; probabilities are b_i / |b|_1.
DiscreteDistribution family_pp1(std::vector<Rational> sizes,
                                std::vector<std::uint32_t> counts);

// Complement-pair family: each pair (g, s) has g + s = 1 with 0 < s < g.
// All 2m sizes must be distinct; each carries probability 1/(2m).
DiscreteDistribution family_pptwo(const std::vector<std::pair<Rational, Rational>>& pairs);

// Uniform distribution on {1/k, 2/k, ..., k/k}. Complement pairs (plus the
// doubled midpoint when k is even, and the single full-size item) certify
// perfect packing.
DiscreteDistribution family_uniform_discrete(std::uint32_t k);

} // namespace bincover
