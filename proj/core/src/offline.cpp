#include "bincover/offline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bincover/errors.hpp"
#include "bincover/rng.hpp"
#include "bincover/simplex.hpp"

namespace bincover {

namespace {

const Rational kOne(1);

// Distinct positive sizes of a list with multiplicities and original indices.
struct CountedItems {
    std::vector<Rational> sizes; // ascending
    std::vector<std::uint32_t> counts;
    std::vector<std::vector<std::size_t>> indices;
    std::uint64_t positive_items = 0;
};

CountedItems count_items(const ItemList& L) {
    std::map<Rational, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < L.length(); ++i) {
        const Rational& s = L.items()[i];
        if (s.is_zero()) continue;
        groups[s].push_back(i);
    }
    CountedItems out;
    for (auto& [size, idx] : groups) {
        out.positive_items += idx.size();
        out.sizes.push_back(size);
        out.counts.push_back(static_cast<std::uint32_t>(idx.size()));
        out.indices.push_back(std::move(idx));
    }
    return out;
}

// Minimal covering configurations over ascending positive sizes, optionally
// bounded per coordinate. A coordinate never ranges past its first crossing
// of 1: beyond it the group keeps a removable item and cannot be minimal.
struct CoveringEnumerator {
    const std::vector<Rational>& sizes;
    const std::vector<std::uint32_t>* caps;
    std::size_t config_cap;
    std::vector<PackingConfiguration> out;
    std::vector<std::uint32_t> b;

    void emit_if_minimal(const Rational& sum) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j] == 0) continue;
            // Smallest used size leaves the largest residual; if even that
            // residual stays below 1, every item is needed.
            if (sum - sizes[j] >= kOne) return;
            PackingConfiguration cfg;
            cfg.counts = b;
            cfg.kind = PackingConfiguration::Kind::covering;
            out.push_back(std::move(cfg));
            if (out.size() > config_cap)
                throw CapExceededError("covering configuration enumeration exceeds cap " +
                                       std::to_string(config_cap));
            return;
        }
    }

    void dfs(std::size_t i, const Rational& sum) {
        if (i == sizes.size()) return;
        const std::uint32_t cap = caps ? (*caps)[i] : UINT32_MAX;
        Rational s = sum;
        for (std::uint32_t c = 0; c <= cap; ++c) {
            if (c > 0) {
                s += sizes[i];
                if (s >= kOne) {
                    b[i] = c;
                    emit_if_minimal(s);
                    break;
                }
            }
            b[i] = c;
            dfs(i + 1, s);
        }
        b[i] = 0;
    }

    std::vector<PackingConfiguration> run() {
        b.assign(sizes.size(), 0);
        dfs(0, Rational(0));
        return std::move(out);
    }
};

std::vector<PackingConfiguration> covering_configs_for(const std::vector<Rational>& sizes,
                                                       const std::vector<std::uint32_t>* caps,
                                                       std::size_t config_cap) {
    CoveringEnumerator e{sizes, caps, config_cap, {}, {}};
    return e.run();
}

// Memoized exhaustive search over minimal covering configurations. States are
// multiplicity vectors of the remaining items.
struct OptSolver {
    std::vector<Rational> sizes;
    std::vector<PackingConfiguration> configs;
    std::vector<Rational> config_weights;
    std::map<std::vector<std::uint32_t>, std::uint64_t> memo;

    std::uint64_t best(std::vector<std::uint32_t>& counts, const Rational& total) {
        if (total < kOne) return 0;
        auto hit = memo.find(counts);
        if (hit != memo.end()) return hit->second;
        const mpz_class volume = total.floor(); // no packing beats the volume bound
        std::uint64_t res = 0;
        for (std::size_t j = 0; j < configs.size(); ++j) {
            const auto& b = configs[j].counts;
            bool fits = true;
            for (std::size_t i = 0; i < b.size() && fits; ++i) fits = b[i] <= counts[i];
            if (!fits) continue;
            for (std::size_t i = 0; i < b.size(); ++i) counts[i] -= b[i];
            const std::uint64_t cand = 1 + best(counts, total - config_weights[j]);
            for (std::size_t i = 0; i < b.size(); ++i) counts[i] += b[i];
            if (cand > res) res = cand;
            if (mpz_class(static_cast<unsigned long>(res)) == volume) break;
        }
        memo.emplace(counts, res);
        return res;
    }
};

OptSolver make_solver(const CountedItems& items, std::size_t opt_cap) {
    if (items.positive_items > opt_cap)
        throw TooLargeError("list has " + std::to_string(items.positive_items) +
                            " positive items, above the exact oracle cap of " +
                            std::to_string(opt_cap) +
                            "; use the Monte Carlo or LP route instead");
    OptSolver s;
    s.sizes = items.sizes;
    s.configs = covering_configs_for(items.sizes, &items.counts, 1u << 20);
    s.config_weights.reserve(s.configs.size());
    for (const auto& c : s.configs) s.config_weights.push_back(c.weight(s.sizes));
    return s;
}

struct McAccumulator {
    std::uint64_t sum = 0;
    std::uint64_t sum_sq = 0;
    std::uint64_t trials = 0;

    void add(std::uint64_t k) {
        sum += k;
        sum_sq += k * k;
        ++trials;
    }
    double mean() const { return static_cast<double>(sum) / static_cast<double>(trials); }
    double std_error() const {
        if (trials < 2) return 0.0;
        const double t = static_cast<double>(trials);
        const double var =
            (static_cast<double>(sum_sq) - static_cast<double>(sum) * static_cast<double>(sum) / t) /
            (t - 1.0);
        return std::sqrt(std::max(var, 0.0) / t);
    }
};

} // namespace

std::uint64_t opt_exact(const ItemList& L, std::size_t opt_cap) {
    const CountedItems items = count_items(L);
    if (items.sizes.empty()) return 0;
    OptSolver solver = make_solver(items, opt_cap);
    std::vector<std::uint32_t> counts = items.counts;
    return solver.best(counts, L.total());
}

OptPacking opt_packing(const ItemList& L, std::size_t opt_cap) {
    OptPacking out;
    const CountedItems items = count_items(L);
    if (items.sizes.empty()) return out;
    OptSolver solver = make_solver(items, opt_cap);

    std::vector<std::uint32_t> counts = items.counts;
    Rational total = L.total();
    out.bins = solver.best(counts, total);
    std::vector<std::size_t> cursor(items.sizes.size(), 0);
    std::uint64_t remaining = out.bins;
    while (remaining > 0) {
        bool advanced = false;
        for (std::size_t j = 0; j < solver.configs.size() && !advanced; ++j) {
            const auto& b = solver.configs[j].counts;
            bool fits = true;
            for (std::size_t i = 0; i < b.size() && fits; ++i) fits = b[i] <= counts[i];
            if (!fits) continue;
            for (std::size_t i = 0; i < b.size(); ++i) counts[i] -= b[i];
            const Rational rest = total - solver.config_weights[j];
            if (solver.best(counts, rest) == remaining - 1) {
                std::vector<std::size_t> group;
                for (std::size_t i = 0; i < b.size(); ++i)
                    for (std::uint32_t c = 0; c < b[i]; ++c) group.push_back(items.indices[i][cursor[i]++]);
                std::sort(group.begin(), group.end());
                out.groups.push_back(std::move(group));
                total = rest;
                --remaining;
                advanced = true;
            } else {
                for (std::size_t i = 0; i < b.size(); ++i) counts[i] += b[i];
            }
        }
        if (!advanced) throw std::logic_error("optimal packing reconstruction stalled");
    }
    return out;
}

std::vector<PackingConfiguration> enumerate_perfect_configs(const DiscreteDistribution& F,
                                                            std::size_t config_cap) {
    if (F.min_size().is_zero())
        throw ValidationError("perfect configurations are unbounded with a size-0 atom; "
                              "strip zero sizes first");
    const std::vector<Rational>& sizes = F.sizes();
    std::vector<PackingConfiguration> out;
    std::vector<std::uint32_t> b(sizes.size(), 0);
    std::uint64_t steps = 0;
    const std::uint64_t step_budget = 1000ull * std::max<std::size_t>(config_cap, 1);

    // Lexicographic DFS, each coordinate bounded by the exact remaining room.
    auto dfs = [&](auto&& self, std::size_t i, const Rational& remaining) -> void {
        if (++steps > step_budget)
            throw CapExceededError("perfect configuration search exceeds its step budget");
        if (i == sizes.size()) {
            if (remaining.is_zero()) {
                PackingConfiguration cfg;
                cfg.counts = b;
                cfg.kind = PackingConfiguration::Kind::perfect;
                out.push_back(std::move(cfg));
                if (out.size() > config_cap)
                    throw CapExceededError("perfect configuration enumeration exceeds cap " +
                                           std::to_string(config_cap));
            }
            return;
        }
        const auto max_c = to_u64((remaining / sizes[i]).floor());
        if (!max_c) throw CapExceededError("configuration coordinate exceeds 64 bits");
        Rational rest = remaining;
        for (std::uint64_t c = 0; c <= *max_c; ++c) {
            if (c > 0) rest -= sizes[i];
            b[i] = static_cast<std::uint32_t>(c);
            self(self, i + 1, rest);
        }
        b[i] = 0;
    };
    dfs(dfs, 0, kOne);
    return out;
}

std::vector<PackingConfiguration> enumerate_covering_configs(const DiscreteDistribution& F,
                                                             std::size_t config_cap) {
    if (F.min_size().is_zero())
        throw ValidationError("covering configurations are not defined with a size-0 atom; "
                              "strip zero sizes first");
    return covering_configs_for(F.sizes(), nullptr, config_cap);
}

namespace {

std::vector<std::vector<Rational>> config_columns(const std::vector<PackingConfiguration>& configs,
                                                  std::size_t m) {
    std::vector<std::vector<Rational>> cols;
    cols.reserve(configs.size());
    for (const auto& cfg : configs) {
        std::vector<Rational> col(m);
        for (std::size_t i = 0; i < m; ++i)
            col[i] = Rational(static_cast<long>(cfg.counts[i]));
        cols.push_back(std::move(col));
    }
    return cols;
}

PerfectPackingCertificate certificate_from_hint(const DiscreteDistribution& F) {
    const PackingHint& hint = *F.packing_hint();
    if (hint.configs.size() != hint.alphas.size() || hint.configs.empty())
        throw std::logic_error("malformed packing hint");
    const std::size_t m = F.support_size();
    std::vector<Rational> mix(m);
    for (std::size_t j = 0; j < hint.configs.size(); ++j) {
        const auto& cfg = hint.configs[j];
        if (cfg.counts.size() != m) throw std::logic_error("hint configuration width mismatch");
        if (cfg.weight(F.sizes()) != kOne)
            throw std::logic_error("hint configuration does not sum to 1");
        if (hint.alphas[j].sign() < 0) throw std::logic_error("negative hint coefficient");
        for (std::size_t i = 0; i < m; ++i)
            mix[i] += hint.alphas[j] * Rational(static_cast<long>(cfg.counts[i]));
    }
    for (std::size_t i = 0; i < m; ++i)
        if (mix[i] != F.probs()[i])
            throw std::logic_error("packing hint does not mix to the probability vector");
    PerfectPackingCertificate cert;
    cert.configurations = hint.configs;
    for (auto& cfg : cert.configurations) cfg.kind = PackingConfiguration::Kind::perfect;
    cert.coefficients = hint.alphas;
    return cert;
}

} // namespace

PackingDecision is_perfect_packing(const DiscreteDistribution& F, const AnalysisOptions& options) {
    if (options.use_hints && F.packing_hint()) return certificate_from_hint(F);

    const auto configs = enumerate_perfect_configs(F, options.config_cap);
    if (configs.empty()) {
        // With no configurations at all, p itself separates: p.p > 0.
        return PackingRefutation{F.probs()};
    }
    const auto result =
        lp::solve_equality_feasibility(config_columns(configs, F.support_size()), F.probs());
    if (const auto* feas = std::get_if<lp::EqFeasible>(&result)) {
        PerfectPackingCertificate cert;
        for (std::size_t j = 0; j < configs.size(); ++j) {
            if (feas->x[j].is_zero()) continue;
            cert.configurations.push_back(configs[j]);
            cert.coefficients.push_back(feas->x[j]);
        }
        return cert;
    }
    return PackingRefutation{std::get<lp::EqInfeasible>(result).y};
}

DegreeResult degree(const DiscreteDistribution& F, const AnalysisOptions& options) {
    const PackingDecision decision = is_perfect_packing(F, options);
    const auto* cert = std::get_if<PerfectPackingCertificate>(&decision);
    if (cert == nullptr)
        throw ValidationError("degree is defined only for perfect-packing distributions");

    const auto configs = enumerate_perfect_configs(F, options.config_cap);
    if (configs.size() > options.degree_cap)
        throw CapExceededError(
            "subset search over " + std::to_string(configs.size()) +
            " perfect configurations exceeds cap " + std::to_string(options.degree_cap) +
            "; best known upper bound on the degree is " +
            std::to_string(cert->configurations.size()));

    const std::size_t m = F.support_size();
    const auto columns = config_columns(configs, m);
    const std::size_t max_card = std::min(m, configs.size());
    std::vector<std::size_t> pick;
    for (std::size_t card = 1; card <= max_card; ++card) {
        pick.resize(card);
        std::iota(pick.begin(), pick.end(), 0);
        for (;;) {
            std::vector<std::vector<Rational>> sub;
            sub.reserve(card);
            for (std::size_t j : pick) sub.push_back(columns[j]);
            const auto result = lp::solve_equality_feasibility(sub, F.probs());
            if (const auto* feas = std::get_if<lp::EqFeasible>(&result)) {
                DegreeResult out;
                out.degree = static_cast<std::uint32_t>(card);
                for (std::size_t k = 0; k < card; ++k) {
                    out.configurations.push_back(configs[pick[k]]);
                    out.coefficients.push_back(feas->x[k]);
                }
                return out;
            }
            // next combination
            std::size_t k = card;
            while (k > 0 && pick[k - 1] == configs.size() - card + (k - 1)) --k;
            if (k == 0) break;
            ++pick[k - 1];
            for (std::size_t j = k; j < card; ++j) pick[j] = pick[j - 1] + 1;
        }
    }
    throw std::logic_error("certified perfect packing but no feasible configuration subset");
}

GammaEstimate gamma_rate(const DiscreteDistribution& F, const AnalysisOptions& options) {
    GammaEstimate g;
    const PackingDecision decision = is_perfect_packing(F, options);
    if (std::holds_alternative<PerfectPackingCertificate>(decision)) {
        g.provenance = GammaProvenance::exact_perfect_packing;
        g.exact = true;
        g.upper = F.expected_size();
        g.lower = g.upper.as_double();
        return g;
    }

    g.provenance = GammaProvenance::interval_bound;
    g.exact = false;
    const auto covering = enumerate_covering_configs(F, options.config_cap);
    g.upper = lp::maximize_total_under(config_columns(covering, F.support_size()), F.probs()).value;

    // Negatively biased finite-n lower estimate: covered bins per item in an
    // i.i.d. sample. One stream per trial keeps the estimate reproducible.
    const std::uint64_t trials = options.gamma_mc_trials;
    const std::size_t n = options.gamma_mc_n;
    Sampler sampler(F);
    McAccumulator acc;
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng(RandomSeed{options.gamma_mc_seed, t});
        std::vector<Rational> items;
        items.reserve(n);
        for (std::size_t i = 0; i < n; ++i) items.push_back(F.sizes()[sampler.draw(rng)]);
        acc.add(opt_exact(ItemList(std::move(items)), options.opt_cap));
    }
    g.lower = acc.mean() / static_cast<double>(n);
    g.error_bar = acc.std_error() / static_cast<double>(n);
    g.mc_trials = trials;
    return g;
}

ItemList perfect_shrink(const ItemList& L, std::size_t opt_cap) {
    const OptPacking packing = opt_packing(L, opt_cap);
    std::vector<Rational> items(L.length(), Rational(0));
    for (const auto& group : packing.groups) {
        Rational sum;
        for (std::size_t idx : group) {
            items[idx] = L.items()[idx];
            sum += L.items()[idx];
        }
        Rational excess = sum - kOne;
        // Largest first; ties broken by original position for determinism.
        std::vector<std::size_t> order = group;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
            if (items[a] != items[c]) return items[c] < items[a];
            return a < c;
        });
        for (std::size_t idx : order) {
            if (excess.sign() <= 0) break;
            const Rational d = items[idx] < excess ? items[idx] : excess;
            items[idx] -= d;
            excess -= d;
        }
        if (excess.sign() != 0) throw std::logic_error("bin excess not absorbed by its items");
    }
    ItemList H{std::move(items)};
    if (H.total() != Rational(static_cast<long>(packing.bins)))
        throw std::logic_error("shrunk list total differs from its bin count");
    if (opt_exact(H, opt_cap) != packing.bins)
        throw std::logic_error("shrink changed the optimal covering count");
    return H;
}

} // namespace bincover
