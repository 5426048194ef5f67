#include "bincover/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>

#include "bincover/errors.hpp"
#include "bincover/offline.hpp"

namespace bincover {

namespace {

const Rational kOne(1);

// Visits per excursion, unnormalized: nu(c) = 1, pushed forward along open
// edges in ascending level order. Exactness of the whole module rests on the
// triangular structure, so the order violation check stays on.
std::vector<Rational> visit_sweep(const BinLevelChain& chain) {
    const std::size_t n = chain.size();
    std::vector<Rational> nu(n);
    nu[0] = kOne;
    for (std::size_t u = 0; u < n; ++u) {
        for (const auto& [v, p] : chain.rows()[u].open_edges) {
            if (v <= u) throw std::logic_error("open edge does not increase the level");
            nu[v] += nu[u] * p;
        }
    }
    // Each excursion closes exactly once, so the visit measure must push unit
    // mass into the closing edges.
    Rational closed;
    for (std::size_t u = 0; u < n; ++u) closed += nu[u] * chain.rows()[u].close_mass;
    if (closed != kOne)
        throw std::logic_error("visit sweep does not close unit mass: " + closed.str());
    return nu;
}

// Expected steps to reach c, by first-step equations solved backward along
// descending levels. h[0] is the full return time E[T].
std::vector<Rational> hitting_sweep(const BinLevelChain& chain) {
    const std::size_t n = chain.size();
    std::vector<Rational> h(n);
    for (std::size_t u = n; u-- > 0;) {
        Rational acc = kOne;
        for (const auto& [v, p] : chain.rows()[u].open_edges) acc += p * h[v];
        h[u] = acc;
    }
    return h;
}

// Expected excess over 1 at the eventual close, starting from each state.
std::vector<Rational> overshoot_sweep(const BinLevelChain& chain) {
    const std::size_t n = chain.size();
    std::vector<Rational> r(n);
    for (std::size_t u = n; u-- > 0;) {
        Rational acc = chain.rows()[u].close_excess;
        for (const auto& [v, p] : chain.rows()[u].open_edges) acc += p * r[v];
        r[u] = acc;
    }
    return r;
}

double residual_inf(const BinLevelChain& chain, const std::vector<double>& pi) {
    const std::size_t n = chain.size();
    std::vector<double> next(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        const ChainRow& row = chain.rows()[u];
        for (const auto& [v, p] : row.open_edges) next[v] += pi[u] * p.as_double();
        next[0] += pi[u] * row.close_mass.as_double();
    }
    double res = 0.0;
    for (std::size_t u = 0; u < n; ++u) res = std::max(res, std::abs(next[u] - pi[u]));
    return res;
}

} // namespace

BinLevelChain build_chain(const DiscreteDistribution& F, std::size_t state_cap) {
    if (state_cap < 1) throw ValidationError("state cap must be at least 1");
    if (F.min_size().is_zero())
        throw ValidationError("distribution has an atom at size 0; drop zero sizes before "
                              "building the bin-level chain");

    std::vector<Rational> states{Rational(0)};
    std::map<Rational, std::uint32_t> pos; // levels in (0,1) only
    std::deque<std::uint32_t> todo{0};
    while (!todo.empty()) {
        const Rational level = states[todo.front()];
        todo.pop_front();
        for (const Rational& s : F.sizes()) {
            Rational t = level + s;
            if (t >= kOne) continue;
            auto [it, inserted] = pos.emplace(t, static_cast<std::uint32_t>(states.size()));
            if (inserted) {
                states.push_back(t);
                if (states.size() > state_cap)
                    throw StateExplosionError("bin-level chain exceeds " +
                                              std::to_string(state_cap) + " states");
                todo.push_back(it->second);
            }
        }
    }

    // Canonical order: c first, then levels ascending. pos iterates sorted.
    std::vector<Rational> sorted{Rational(0)};
    sorted.reserve(states.size());
    std::uint32_t next_index = 1;
    for (auto& [level, idx] : pos) {
        sorted.push_back(level);
        idx = next_index++;
    }

    std::vector<ChainRow> rows(sorted.size());
    for (std::size_t u = 0; u < sorted.size(); ++u) {
        ChainRow& row = rows[u];
        Rational total;
        for (std::size_t i = 0; i < F.support_size(); ++i) {
            const Rational& p = F.probs()[i];
            Rational t = sorted[u] + F.sizes()[i];
            if (t >= kOne) {
                row.close_mass += p;
                row.close_excess += p * (t - kOne);
            } else {
                row.open_edges.emplace_back(pos.at(t), p);
            }
            total += p;
        }
        if (total != kOne) throw std::logic_error("chain row does not sum to 1");
    }
    return BinLevelChain(std::move(sorted), std::move(rows), F);
}

std::uint64_t period(const BinLevelChain& chain) {
    const std::size_t n = chain.size();
    // BFS depths from c over open edges (they alone reach every state).
    std::vector<std::uint64_t> depth(n, UINT64_MAX);
    depth[0] = 0;
    std::deque<std::uint32_t> bfs{0};
    while (!bfs.empty()) {
        const std::uint32_t u = bfs.front();
        bfs.pop_front();
        for (const auto& [v, p] : chain.rows()[u].open_edges) {
            (void)p;
            if (depth[v] == UINT64_MAX) {
                depth[v] = depth[u] + 1;
                bfs.push_back(v);
            }
        }
    }
    std::uint64_t g = 0;
    for (std::size_t u = 0; u < n; ++u) {
        if (depth[u] == UINT64_MAX) throw std::logic_error("chain state unreachable from c");
        const ChainRow& row = chain.rows()[u];
        for (const auto& [v, p] : row.open_edges) {
            (void)p;
            g = std::gcd(g, depth[u] + 1 - depth[v]); // BFS gives depth[v] <= depth[u] + 1
        }
        if (row.close_mass.sign() > 0) g = std::gcd(g, depth[u] + 1);
    }
    if (g == 0) throw std::logic_error("chain has no closing edge");

    // Independent route: the chain is d-periodic for d >= 2 exactly when all
    // sizes fall in [1/d, 1/(d-1)), and the only candidate d is the interval
    // holding the smallest size.
    const DiscreteDistribution& F = chain.source();
    mpz_class dm;
    mpz_cdiv_q(dm.get_mpz_t(), F.min_size().den().get_mpz_t(), F.min_size().num().get_mpz_t());
    std::uint64_t predicted = 1;
    if (dm > 1) {
        const Rational upper(mpz_class(1), mpz_class(dm - 1));
        if (F.max_size() < upper) predicted = to_u64(dm).value();
    }
    if (g != predicted)
        throw std::logic_error("period " + std::to_string(g) +
                               " disagrees with the size-interval rule " +
                               std::to_string(predicted));
    return g;
}

StationaryResult stationary_float(const BinLevelChain& chain) {
    const std::size_t n = chain.size();
    std::vector<double> nu(n, 0.0);
    nu[0] = 1.0;
    for (std::size_t u = 0; u < n; ++u)
        for (const auto& [v, p] : chain.rows()[u].open_edges) nu[v] += nu[u] * p.as_double();
    const double total = std::accumulate(nu.begin(), nu.end(), 0.0);
    StationaryResult out;
    out.exact = false;
    out.probs_f.resize(n);
    for (std::size_t u = 0; u < n; ++u) out.probs_f[u] = nu[u] / total;
    out.residual = residual_inf(chain, out.probs_f);
    return out;
}

StationaryResult stationary(const BinLevelChain& chain, std::size_t exact_cap) {
    if (period(chain) >= 2)
        throw PeriodicError("chain is periodic; the stationary limit does not exist");
    if (chain.size() > exact_cap) {
        StationaryResult out = stationary_float(chain);
        if (out.residual > 1e-12)
            throw Error("floating stationary solve residual " + std::to_string(out.residual) +
                        " exceeds 1e-12");
        return out;
    }
    const std::vector<Rational> nu = visit_sweep(chain);
    Rational total;
    for (const Rational& v : nu) total += v;
    StationaryResult out;
    out.exact = true;
    out.probs.reserve(nu.size());
    out.probs_f.reserve(nu.size());
    for (const Rational& v : nu) {
        out.probs.push_back(v / total);
        out.probs_f.push_back(out.probs.back().as_double());
    }
    return out;
}

std::vector<Rational> stationary_gaussian(const BinLevelChain& chain) {
    const std::size_t n = chain.size();
    // Balance equations for every state except c, whose redundant row is
    // replaced by the normalization sum(pi) = 1.
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n + 1));
    for (std::size_t u = 0; u < n; ++u) m[0][u] = kOne;
    m[0][n] = kOne;
    // Close edges all target c, whose balance row was replaced, so only open
    // edges contribute off-diagonal mass.
    for (std::size_t u = 0; u < n; ++u)
        for (const auto& [v, p] : chain.rows()[u].open_edges)
            if (v != 0) m[v][u] += p;
    for (std::size_t v = 1; v < n; ++v) m[v][v] -= kOne;

    for (std::size_t col = 0, row = 0; col < n && row < n; ++col) {
        std::size_t pivot = row;
        while (pivot < n && m[pivot][col].is_zero()) ++pivot;
        if (pivot == n) throw std::logic_error("singular stationary system");
        std::swap(m[pivot], m[row]);
        const Rational inv = kOne / m[row][col];
        for (std::size_t j = col; j <= n; ++j) m[row][j] *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == row || m[r][col].is_zero()) continue;
            const Rational f = m[r][col];
            for (std::size_t j = col; j <= n; ++j) m[r][j] -= f * m[row][j];
        }
        ++row;
    }
    std::vector<Rational> pi(n);
    for (std::size_t u = 0; u < n; ++u) pi[u] = m[u][n];
    return pi;
}

Rational expected_items_per_bin(const BinLevelChain& chain) {
    const std::vector<Rational> nu = visit_sweep(chain);
    Rational total;
    for (const Rational& v : nu) total += v;
    const std::vector<Rational> h = hitting_sweep(chain);
    if (h[0] != total)
        throw std::logic_error("visit-sum and hitting-time routes disagree: " + total.str() +
                               " vs " + h[0].str());
    return total;
}

Rational expected_overshoot(const BinLevelChain& chain) { return overshoot_sweep(chain)[0]; }

Rational survival_probability(const BinLevelChain& chain, std::uint64_t i) {
    const std::size_t n = chain.size();
    std::vector<Rational> mass(n), next(n);
    mass[0] = kOne;
    for (std::uint64_t step = 0; step < i; ++step) {
        std::fill(next.begin(), next.end(), Rational(0));
        for (std::size_t u = 0; u < n; ++u) {
            if (mass[u].is_zero()) continue;
            for (const auto& [v, p] : chain.rows()[u].open_edges) next[v] += mass[u] * p;
        }
        mass.swap(next);
    }
    Rational alive;
    for (const Rational& v : mass) alive += v;
    return alive;
}

ChainAnalysis analyze_chain(const BinLevelChain& chain, const AnalysisOptions& options) {
    ChainAnalysis a;
    a.state_count = chain.size();
    a.expected_size = chain.source().expected_size();
    a.period = period(chain);

    if (a.period >= 2) {
        // Every excursion takes exactly d steps, so E[T] = d and the
        // first-step equations must reproduce that.
        const Rational d(static_cast<long>(a.period));
        const Rational et = expected_items_per_bin(chain);
        if (et != d)
            throw std::logic_error("periodic chain with E[T] = " + et.str() + " instead of " +
                                   d.str());
        a.exact = true;
        a.expected_T = et;
        a.expected_R = expected_overshoot(chain);
    } else if (chain.size() <= options.exact_solve_cap) {
        const std::vector<Rational> nu = visit_sweep(chain);
        Rational total;
        for (const Rational& v : nu) total += v;
        const std::vector<Rational> h = hitting_sweep(chain);
        if (h[0] != total)
            throw std::logic_error("visit-sum and hitting-time routes disagree: " + total.str() +
                                   " vs " + h[0].str());
        a.exact = true;
        std::vector<Rational> pi(nu.size());
        a.stationary_f.resize(nu.size());
        for (std::size_t u = 0; u < nu.size(); ++u) {
            pi[u] = nu[u] / total;
            a.stationary_f[u] = pi[u].as_double();
        }
        a.stationary = std::move(pi);
        a.expected_T = total;
        a.expected_R = overshoot_sweep(chain)[0];
    } else {
        StationaryResult sr = stationary(chain, options.exact_solve_cap);
        a.exact = false;
        a.solve_residual = sr.residual;
        a.stationary_f = std::move(sr.probs_f);
        a.expected_T_f = 1.0 / a.stationary_f[0];
        std::vector<double> r(chain.size(), 0.0);
        for (std::size_t u = chain.size(); u-- > 0;) {
            double acc = chain.rows()[u].close_excess.as_double();
            for (const auto& [v, p] : chain.rows()[u].open_edges) acc += p.as_double() * r[v];
            r[u] = acc;
        }
        a.expected_R_f = r[0];
    }

    if (a.exact) {
        // Wald: the stopped sum S_T = 1 + R has mean E[T] E[X].
        const Rational lhs = kOne + *a.expected_R;
        const Rational rhs = *a.expected_T * a.expected_size;
        if (lhs != rhs)
            throw std::logic_error("Wald identity violated: 1 + E[R] = " + lhs.str() +
                                   " but E[T] E[X] = " + rhs.str());
        a.expected_T_f = a.expected_T->as_double();
        a.expected_R_f = a.expected_R->as_double();
    }
    return a;
}

AecrResult aecr_exact(const DiscreteDistribution& F, const AnalysisOptions& options) {
    const BinLevelChain chain = build_chain(F, options.state_cap);
    AecrResult res;
    res.analysis = analyze_chain(chain, options);

    if (res.analysis.period >= 2) {
        res.provenance = AecrProvenance::periodic;
        res.value = kOne;
        res.value_f = 1.0;
        return res;
    }

    const PackingDecision decision = is_perfect_packing(F, options);
    if (std::holds_alternative<PerfectPackingCertificate>(decision)) {
        res.provenance = AecrProvenance::perfect_packing;
        if (res.analysis.exact) {
            const Rational v = kOne / (res.analysis.expected_size * *res.analysis.expected_T);
            if (v < Rational(1, 2) || v > kOne)
                throw std::logic_error("perfect-packing ratio " + v.str() +
                                       " escapes [1/2, 1]");
            res.value = v;
            res.value_f = v.as_double();
        } else {
            res.value_f =
                1.0 / (res.analysis.expected_size.as_double() * res.analysis.expected_T_f);
        }
        return res;
    }

    res.provenance = AecrProvenance::gamma_bounded;
    const GammaEstimate gamma = gamma_rate(F, options);
    res.gamma_upper = gamma.upper;
    res.gamma_mc_lower = gamma.lower;
    if (res.analysis.exact) {
        const Rational pi_c = (*res.analysis.stationary)[0];
        res.value = pi_c / gamma.upper;
        res.value_f = res.value->as_double();
    } else {
        res.value_f = res.analysis.stationary_f[0] / gamma.upper.as_double();
    }
    const double pi_c_f =
        res.analysis.exact ? (*res.analysis.stationary)[0].as_double() : res.analysis.stationary_f[0];
    if (gamma.lower > 0.0) res.upper_hint = pi_c_f / gamma.lower;
    return res;
}

} // namespace bincover
