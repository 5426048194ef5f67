#pragma once
// Exact rational simplex kernels for the small packing LPs. Both entry points
// verify their answers against the original data and throw std::logic_error
// if verification fails, so callers may rely on the certificates.

#include <variant>
#include <vector>

#include "bincover/rational.hpp"

namespace bincover::lp {

// Feasibility of: columns * x = rhs, x >= 0.
struct EqFeasible {
    std::vector<Rational> x; // one coefficient per column
};
// Farkas separator: y.column <= 0 for every column while y.rhs > 0.
struct EqInfeasible {
    std::vector<Rational> y; // one entry per row
};
using EqResult = std::variant<EqFeasible, EqInfeasible>;

EqResult solve_equality_feasibility(const std::vector<std::vector<Rational>>& columns,
                                    const std::vector<Rational>& rhs);

// Exact optimum of: maximize sum(x) subject to columns * x <= rhs, x >= 0,
// with rhs >= 0 so the slack basis is immediately feasible.
struct MaxResult {
    Rational value;
    std::vector<Rational> x;
};

MaxResult maximize_total_under(const std::vector<std::vector<Rational>>& columns,
                               const std::vector<Rational>& rhs);

} // namespace bincover::lp
