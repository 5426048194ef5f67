#include "bincover/simplex.hpp"

#include <cstddef>
#include <stdexcept>

#include "bincover/errors.hpp"

namespace bincover::lp {

namespace {

const Rational kZero(0);
const Rational kOne(1);

// Dense tableau over exact rationals. Bland's rule on both the entering and
// the leaving choice guarantees termination without any degeneracy handling.
struct Tableau {
    std::size_t rows = 0;
    std::size_t cols = 0;                   // variable count; column `cols` is the rhs
    std::vector<std::vector<Rational>> t;   // rows x (cols + 1)
    std::vector<Rational> obj;              // cols reduced costs + negated objective value
    std::vector<std::size_t> basis;

    void pivot(std::size_t r, std::size_t c) {
        const Rational inv = kOne / t[r][c];
        for (auto& e : t[r]) e *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || t[i][c].is_zero()) continue;
            const Rational f = t[i][c];
            for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[r][j];
        }
        if (!obj[c].is_zero()) {
            const Rational f = obj[c];
            for (std::size_t j = 0; j <= cols; ++j) obj[j] -= f * t[r][j];
        }
        basis[r] = c;
    }

    // Minimize. Returns false only when the problem is unbounded below.
    bool run() {
        for (;;) {
            std::size_t enter = cols;
            for (std::size_t j = 0; j < cols; ++j) {
                if (obj[j].sign() < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols) return true;
            std::size_t leave = rows;
            Rational best;
            for (std::size_t i = 0; i < rows; ++i) {
                if (t[i][enter].sign() <= 0) continue;
                const Rational ratio = t[i][cols] / t[i][enter];
                if (leave == rows || ratio < best ||
                    (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == rows) return false;
            pivot(leave, enter);
        }
    }

    Rational objective() const {
        Rational v = obj[cols];
        return kZero - v; // obj row stores the negated value
    }
};

void check_columns(const std::vector<std::vector<Rational>>& columns, std::size_t m) {
    for (const auto& col : columns)
        if (col.size() != m) throw std::logic_error("LP column height does not match rhs");
}

} // namespace

EqResult solve_equality_feasibility(const std::vector<std::vector<Rational>>& columns,
                                    const std::vector<Rational>& rhs) {
    const std::size_t m = rhs.size();
    const std::size_t n = columns.size();
    check_columns(columns, m);

    // Flip rows so the artificial basis starts feasible.
    std::vector<int> sgn(m, 1);
    for (std::size_t i = 0; i < m; ++i)
        if (rhs[i].sign() < 0) sgn[i] = -1;

    Tableau tb;
    tb.rows = m;
    tb.cols = n + m;
    tb.t.assign(m, std::vector<Rational>(tb.cols + 1));
    tb.basis.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            tb.t[i][j] = sgn[i] < 0 ? kZero - columns[j][i] : columns[j][i];
        tb.t[i][n + i] = kOne;
        tb.t[i][tb.cols] = sgn[i] < 0 ? kZero - rhs[i] : rhs[i];
        tb.basis[i] = n + i;
    }
    // Phase-1 costs: 0 on real variables, 1 on artificials. With the
    // artificial basis the reduced cost of column j is c_j - sum of its rows.
    tb.obj.assign(tb.cols + 1, kZero);
    for (std::size_t j = 0; j < tb.cols; ++j) {
        Rational rc = j < n ? kZero : kOne;
        for (std::size_t i = 0; i < m; ++i) rc -= tb.t[i][j];
        tb.obj[j] = rc;
    }
    for (std::size_t i = 0; i < m; ++i) tb.obj[tb.cols] -= tb.t[i][tb.cols];

    if (!tb.run()) throw std::logic_error("phase-1 objective unbounded");

    if (tb.objective().is_zero()) {
        EqFeasible out;
        out.x.assign(n, kZero);
        for (std::size_t i = 0; i < m; ++i)
            if (tb.basis[i] < n) out.x[tb.basis[i]] = tb.t[i][tb.cols];
        for (const Rational& v : out.x)
            if (v.sign() < 0) throw std::logic_error("negative coefficient in feasible point");
        for (std::size_t i = 0; i < m; ++i) {
            Rational acc;
            for (std::size_t j = 0; j < n; ++j) acc += out.x[j] * columns[j][i];
            if (acc != rhs[i]) throw std::logic_error("feasible point fails verification");
        }
        return out;
    }

    // Positive phase-1 optimum: the simplex multipliers separate. The
    // multiplier on row k is 1 minus the reduced cost of artificial k; undo
    // the row flips to speak about the original system.
    EqInfeasible out;
    out.y.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        Rational yk = kOne - tb.obj[n + k];
        out.y[k] = sgn[k] < 0 ? kZero - yk : yk;
    }
    Rational score;
    for (std::size_t i = 0; i < m; ++i) score += out.y[i] * rhs[i];
    if (score.sign() <= 0) throw std::logic_error("separator fails y.rhs > 0");
    for (std::size_t j = 0; j < n; ++j) {
        Rational acc;
        for (std::size_t i = 0; i < m; ++i) acc += out.y[i] * columns[j][i];
        if (acc.sign() > 0) throw std::logic_error("separator fails y.column <= 0");
    }
    return out;
}

MaxResult maximize_total_under(const std::vector<std::vector<Rational>>& columns,
                               const std::vector<Rational>& rhs) {
    const std::size_t m = rhs.size();
    const std::size_t n = columns.size();
    check_columns(columns, m);
    for (const Rational& b : rhs)
        if (b.sign() < 0) throw ValidationError("inequality LP requires nonnegative rhs");

    Tableau tb;
    tb.rows = m;
    tb.cols = n + m; // slacks
    tb.t.assign(m, std::vector<Rational>(tb.cols + 1));
    tb.basis.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) tb.t[i][j] = columns[j][i];
        tb.t[i][n + i] = kOne;
        tb.t[i][tb.cols] = rhs[i];
        tb.basis[i] = n + i;
    }
    // Maximize sum(x) as minimize -sum(x); the slack basis has zero cost, so
    // reduced costs start at the raw costs.
    tb.obj.assign(tb.cols + 1, kZero);
    for (std::size_t j = 0; j < n; ++j) tb.obj[j] = kZero - kOne;

    if (!tb.run()) throw Error("covering LP is unbounded");

    MaxResult out;
    out.x.assign(n, kZero);
    for (std::size_t i = 0; i < m; ++i)
        if (tb.basis[i] < n) out.x[tb.basis[i]] = tb.t[i][tb.cols];
    for (std::size_t j = 0; j < n; ++j) {
        if (out.x[j].sign() < 0) throw std::logic_error("negative coefficient in LP optimum");
        out.value += out.x[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
        Rational acc;
        for (std::size_t j = 0; j < n; ++j) acc += out.x[j] * columns[j][i];
        if (acc > rhs[i]) throw std::logic_error("LP optimum violates a constraint");
    }
    return out;
}

} // namespace bincover::lp
