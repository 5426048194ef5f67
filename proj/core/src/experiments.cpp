#include "bincover/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include "bincover/chain.hpp"
#include "bincover/detail/parallel.hpp"
#include "bincover/errors.hpp"
#include "bincover/offline.hpp"

namespace bincover {

namespace {

using u128 = unsigned __int128;

const Rational kOne(1);
const Rational kHalf(1, 2);

// u64 numerators over one common denominator <= 2^62, when representable;
// keeps the hot loops integer-only without losing exactness.
struct ScaledItems {
    bool ok = false;
    std::uint64_t denom = 0;
    std::vector<std::uint64_t> nums;
};

ScaledItems scale_items(const std::vector<Rational>& items) {
    mpz_class D(1);
    for (const Rational& s : items) D = lcm(D, s.den());
    const auto d = to_u64(D);
    ScaledItems out;
    if (!d || *d > (1ull << 62)) return out;
    out.ok = true;
    out.denom = *d;
    out.nums.reserve(items.size());
    for (const Rational& s : items) {
        const mpz_class scaled = s.num() * (D / s.den());
        out.nums.push_back(to_u64(scaled).value());
    }
    return out;
}

std::uint64_t dnf_bins_u64(const std::vector<std::uint64_t>& nums, std::uint64_t denom) {
    std::uint64_t bins = 0, level = 0;
    for (std::uint64_t x : nums) {
        level += x; // level < denom <= 2^62 beforehand, so no overflow
        if (level >= denom) {
            ++bins;
            level = 0;
        }
    }
    return bins;
}

std::uint64_t dnf_bins_rational(const std::vector<Rational>& items) {
    std::uint64_t bins = 0;
    Rational level;
    for (const Rational& s : items) {
        level += s;
        if (level >= kOne) {
            ++bins;
            level = Rational(0);
        }
    }
    return bins;
}

template <typename T>
void fisher_yates(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(v.size() - i));
        std::swap(v[i], v[j]);
    }
}

// Shuffles only the first b slots; the prefix is distributed as the prefix
// of a full uniform permutation.
template <typename T>
void fisher_yates_prefix(std::vector<T>& v, std::size_t b, Rng& rng) {
    for (std::size_t i = 0; i < b && i + 1 < v.size(); ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(v.size() - i));
        std::swap(v[i], v[j]);
    }
}

struct MomentPartial {
    u128 sum = 0;
    u128 sum_sq = 0;
};

struct Moments {
    double mean = 0.0;
    double std_error = 0.0;
};

Moments combine_moments(const std::vector<MomentPartial>& parts, std::uint64_t trials) {
    u128 sum = 0, sum_sq = 0;
    for (const auto& p : parts) {
        sum += p.sum;
        sum_sq += p.sum_sq;
    }
    const double t = static_cast<double>(trials);
    const double s = static_cast<double>(sum);
    const double s2 = static_cast<double>(sum_sq);
    Moments m;
    m.mean = s / t;
    if (trials > 1) m.std_error = std::sqrt(std::max((s2 - s * s / t) / (t - 1.0), 0.0) / t);
    return m;
}

Moments permutation_bins_moments(const ItemList& L, std::uint64_t trials, RandomSeed seed,
                                 unsigned threads) {
    const ScaledItems scaled = scale_items(L.items());
    auto parts = detail::run_blocks<MomentPartial>(
        trials, threads, [&](MomentPartial& p, std::uint64_t first, std::uint64_t last) {
            std::vector<std::uint64_t> work_u;
            std::vector<Rational> work_r;
            for (std::uint64_t t = first; t < last; ++t) {
                Rng rng(RandomSeed{seed.seed, seed.stream + t});
                std::uint64_t bins;
                if (scaled.ok) {
                    work_u = scaled.nums;
                    fisher_yates(work_u, rng);
                    bins = dnf_bins_u64(work_u, scaled.denom);
                } else {
                    work_r = L.items();
                    fisher_yates(work_r, rng);
                    bins = dnf_bins_rational(work_r);
                }
                p.sum += bins;
                p.sum_sq += static_cast<u128>(bins) * bins;
            }
        });
    return combine_moments(parts, trials);
}

// Positive part of a distribution that may carry a zero atom.
struct PositivePart {
    Rational p_zero;
    std::optional<DiscreteDistribution> F;
};

PositivePart strip_zeros(const DiscreteDistribution& F_all) {
    PositivePart out;
    std::vector<Rational> sizes, probs;
    for (std::size_t i = 0; i < F_all.support_size(); ++i) {
        if (F_all.sizes()[i].is_zero()) {
            out.p_zero += F_all.probs()[i];
        } else {
            sizes.push_back(F_all.sizes()[i]);
            probs.push_back(F_all.probs()[i]);
        }
    }
    if (sizes.empty()) return out;
    const Rational keep = kOne - out.p_zero;
    for (Rational& p : probs) p = p / keep;
    out.F = DiscreteDistribution::make(std::move(sizes), std::move(probs));
    return out;
}

} // namespace

TrialReport random_order_ratio_estimate(const ItemList& L, std::uint64_t trials, RandomSeed seed,
                                        std::optional<std::uint64_t> opt_override,
                                        const AnalysisOptions& options, unsigned threads) {
    if (L.length() == 0) throw EmptyListError();
    if (trials < 1) throw ValidationError("needs at least one trial");
    const std::uint64_t opt = opt_override ? *opt_override : opt_exact(L, options.opt_cap);
    if (opt == 0) throw ValidationError("OPT(L) = 0, the random-order ratio is undefined");
    const Moments m = permutation_bins_moments(L, trials, seed, threads);
    TrialReport r;
    r.estimate = m.mean / static_cast<double>(opt);
    r.std_error = m.std_error / static_cast<double>(opt);
    r.trials = trials;
    r.seed = seed;
    r.exact_reference = Rational(static_cast<long>(opt));
    return r;
}

std::vector<TrialReport> concat_convergence(const ItemList& L, std::uint64_t j_max,
                                            std::uint64_t trials, RandomSeed seed,
                                            const AnalysisOptions& options, unsigned threads) {
    if (L.length() == 0) throw EmptyListError();
    if (j_max < 1) throw ValidationError("needs at least one concatenation step");
    const std::uint64_t opt1 = opt_exact(L, options.opt_cap);
    // Zero waste scales exactly: superadditivity gives OPT(L^j) >= j OPT(L)
    // and the volume bound gives OPT(L^j) <= floor(j s(L)).
    const bool zero_waste = Rational(static_cast<long>(opt1)) == L.total();

    std::vector<TrialReport> out;
    out.reserve(j_max);
    for (std::uint64_t j = 1; j <= j_max; ++j) {
        const ItemList Lj = L.repeat(j);
        const std::uint64_t optj = zero_waste ? j * opt1 : opt_exact(Lj, options.opt_cap);
        const RandomSeed sj{seed.seed, seed.stream + (j - 1) * trials};
        TrialReport r = random_order_ratio_estimate(Lj, trials, sj, optj, options, threads);
        r.exact_reference = Rational(static_cast<long>(optj));
        out.push_back(std::move(r));
    }
    return out;
}

double dnf_deviation_diagnostic(const ItemList& L, std::uint64_t trials, RandomSeed seed,
                                const AnalysisOptions& options, unsigned threads) {
    if (L.length() == 0) throw EmptyListError();
    if (trials < 1) throw ValidationError("needs at least one trial");
    const PositivePart pos = strip_zeros(induced_distribution(L));
    const double N = static_cast<double>(L.length());
    double reference = 0.0;
    if (pos.F) {
        const BinLevelChain chain = build_chain(*pos.F, options.state_cap);
        // Visits to c per step, with zero draws diluting the excursion:
        // E[T] = E[T_positive] / (1 - p_zero). Valid for periodic chains too.
        const Rational et = expected_items_per_bin(chain) / (kOne - pos.p_zero);
        reference = (kOne / et).as_double();
    }
    const Moments m = permutation_bins_moments(L, trials, seed, threads);
    return std::abs(m.mean - N * reference) / std::pow(N, 2.0 / 3.0);
}

double opt_deviation_diagnostic(const ItemList& L, const AnalysisOptions& options) {
    if (L.length() == 0) throw EmptyListError();
    const std::uint64_t opt = opt_exact(L, options.opt_cap);
    // Zero-waste lists satisfy OPT(L) = s(L) = N E[X] identically.
    if (Rational(static_cast<long>(opt)) == L.total()) return 0.0;
    const PositivePart pos = strip_zeros(induced_distribution(L));
    const double N = static_cast<double>(L.length());
    double gamma = 0.0;
    if (pos.F) {
        const GammaEstimate g = gamma_rate(*pos.F, options);
        gamma = ((kOne - pos.p_zero) * g.upper).as_double();
    }
    return std::abs(static_cast<double>(opt) - N * gamma) / std::pow(N, 2.0 / 3.0);
}

TvReport tv_prefix_check(const ItemList& L, std::uint32_t b) {
    const std::size_t N = L.length();
    if (N == 0) throw EmptyListError();
    if (N > 10) throw TooLargeError("exhaustive prefix enumeration supports N <= 10");
    if (b < 1 || b > 4) throw ValidationError("prefix length must be in 1..4");
    if (b > N) throw ValidationError("prefix is longer than the list");

    // Aggregate by value tuple: mu counts ordered distinct-index tuples,
    // nu counts all index tuples.
    std::map<std::vector<Rational>, std::pair<std::uint64_t, std::uint64_t>> mass;
    std::vector<std::size_t> idx(b, 0);
    std::vector<Rational> tuple(b);
    for (;;) {
        bool distinct = true;
        for (std::size_t i = 0; i < b && distinct; ++i)
            for (std::size_t j = i + 1; j < b && distinct; ++j) distinct = idx[i] != idx[j];
        for (std::size_t i = 0; i < b; ++i) tuple[i] = L.items()[idx[i]];
        auto& cell = mass[tuple];
        ++cell.second;
        if (distinct) ++cell.first;
        std::size_t pos = 0;
        while (pos < b && idx[pos] == N - 1) idx[pos++] = 0;
        if (pos == b) break;
        ++idx[pos];
    }

    mpz_class mu_total = 1, nu_total = 1;
    for (std::uint32_t i = 0; i < b; ++i) {
        mu_total *= static_cast<unsigned long>(N - i);
        nu_total *= static_cast<unsigned long>(N);
    }
    Rational tv;
    for (const auto& [t, cell] : mass) {
        (void)t;
        const Rational mu(mpz_class(static_cast<unsigned long>(cell.first)), mu_total);
        const Rational nu(mpz_class(static_cast<unsigned long>(cell.second)), nu_total);
        tv += (mu - nu).abs();
    }
    tv = tv / Rational(2);

    TvReport out;
    out.tv = std::move(tv);
    out.bound = Rational(static_cast<long>(b) * b, 2 * static_cast<long>(N));
    if (out.tv > out.bound) throw std::logic_error("prefix total variation exceeds b^2/(2N)");
    return out;
}

GapReport expectation_gap_check(const ItemList& L, std::uint32_t b, std::uint64_t trials,
                                RandomSeed seed, PrefixAlgorithm algorithm,
                                const AnalysisOptions& options, unsigned threads) {
    const std::size_t N = L.length();
    if (N == 0) throw EmptyListError();
    if (b < 1 || b > N) throw ValidationError("prefix length must be in 1..N");
    if (trials < 2) throw ValidationError("needs at least two trials");
    const DiscreteDistribution F = induced_distribution(L);
    const Sampler sampler(F);

    auto value_of = [&](std::vector<Rational> prefix) -> std::uint64_t {
        if (algorithm == PrefixAlgorithm::dnf) return dnf_bins_rational(prefix);
        return opt_exact(ItemList(std::move(prefix)), options.opt_cap);
    };

    auto lhs_parts = detail::run_blocks<MomentPartial>(
        trials, threads, [&](MomentPartial& p, std::uint64_t first, std::uint64_t last) {
            for (std::uint64_t t = first; t < last; ++t) {
                Rng rng(RandomSeed{seed.seed, seed.stream + t});
                std::vector<Rational> work = L.items();
                fisher_yates_prefix(work, b, rng);
                work.resize(b);
                const std::uint64_t v = value_of(std::move(work));
                p.sum += v;
                p.sum_sq += static_cast<u128>(v) * v;
            }
        });
    auto rhs_parts = detail::run_blocks<MomentPartial>(
        trials, threads, [&](MomentPartial& p, std::uint64_t first, std::uint64_t last) {
            for (std::uint64_t t = first; t < last; ++t) {
                Rng rng(RandomSeed{seed.seed, seed.stream + trials + t});
                std::vector<Rational> draw;
                draw.reserve(b);
                for (std::uint32_t i = 0; i < b; ++i) draw.push_back(F.sizes()[sampler.draw(rng)]);
                const std::uint64_t v = value_of(std::move(draw));
                p.sum += v;
                p.sum_sq += static_cast<u128>(v) * v;
            }
        });

    const Moments ml = combine_moments(lhs_parts, trials);
    const Moments mr = combine_moments(rhs_parts, trials);
    GapReport g;
    g.lhs = TrialReport{ml.mean, ml.std_error, trials, seed, {}};
    g.rhs = TrialReport{mr.mean, mr.std_error, trials, RandomSeed{seed.seed, seed.stream + trials}, {}};
    g.gap = std::abs(ml.mean - mr.mean);
    g.bound = static_cast<double>(b) * b * b / static_cast<double>(N);
    g.slack = 4.0 * (ml.std_error + mr.std_error);
    g.within = g.gap <= g.bound + g.slack;
    return g;
}

EquivalenceReport measure_equivalence_check(const DiscreteDistribution& F, std::size_t n,
                                            std::uint64_t trials, RandomSeed seed,
                                            const AnalysisOptions& options, unsigned threads) {
    if (n < 1 || n > 14) throw ValidationError("sample size must be in 1..14");
    if (trials < 2) throw ValidationError("needs at least two trials");
    // The ratio conditions on OPT >= 1 by redrawing, so some sample of
    // length n must be able to cover a bin at all.
    if (Rational(static_cast<long>(n)) * F.max_size() < kOne)
        throw ValidationError("no sample of length " + std::to_string(n) + " can cover a bin");
    const std::size_t m = F.support_size();

    // OPT for every possible sample, keyed by its multiplicity vector.
    std::map<std::vector<std::uint32_t>, std::uint64_t> table;
    {
        std::vector<std::uint32_t> counts(m, 0);
        auto build = [&](auto&& self, std::size_t i, std::uint32_t left) -> void {
            if (i + 1 == m) {
                counts[i] = left;
                std::vector<Rational> items;
                items.reserve(n);
                for (std::size_t k = 0; k < m; ++k)
                    for (std::uint32_t c = 0; c < counts[k]; ++c) items.push_back(F.sizes()[k]);
                table.emplace(counts, opt_exact(ItemList(std::move(items)), options.opt_cap));
                return;
            }
            for (std::uint32_t c = 0; c <= left; ++c) {
                counts[i] = c;
                self(self, i + 1, left - c);
            }
        };
        build(build, 0, static_cast<std::uint32_t>(n));
    }

    // bins/OPT is rescaled to an integer by lcm(1..14), keeping the first
    // and second moments exact.
    constexpr std::uint64_t kScale = 360360;
    const Sampler sampler(F);
    const ScaledItems sc = scale_items(F.sizes());

    struct Partial {
        u128 r = 0, r2 = 0;
        u128 d = 0, d2 = 0, o = 0, o2 = 0, dxo = 0;
        std::uint64_t resamples = 0;
    };
    auto parts = detail::run_blocks<Partial>(
        trials, threads, [&](Partial& p, std::uint64_t first, std::uint64_t last) {
            std::vector<std::uint32_t> cvec(m);
            for (std::uint64_t t = first; t < last; ++t) {
                Rng rng(RandomSeed{seed.seed, seed.stream + t});
                std::uint64_t bins = 0, opt = 0;
                for (;;) {
                    std::fill(cvec.begin(), cvec.end(), 0u);
                    bins = 0;
                    if (sc.ok) {
                        std::uint64_t level = 0;
                        for (std::size_t i = 0; i < n; ++i) {
                            const std::size_t idx = sampler.draw(rng);
                            ++cvec[idx];
                            level += sc.nums[idx];
                            if (level >= sc.denom) {
                                ++bins;
                                level = 0;
                            }
                        }
                    } else {
                        Rational level;
                        for (std::size_t i = 0; i < n; ++i) {
                            const std::size_t idx = sampler.draw(rng);
                            ++cvec[idx];
                            level += F.sizes()[idx];
                            if (level >= kOne) {
                                ++bins;
                                level = Rational(0);
                            }
                        }
                    }
                    opt = table.at(cvec);
                    if (opt > 0) break;
                    ++p.resamples; // ratio undefined at OPT = 0; redraw in-stream
                }
                const std::uint64_t r = bins * (kScale / opt);
                p.r += r;
                p.r2 += static_cast<u128>(r) * r;
                p.d += bins;
                p.d2 += static_cast<u128>(bins) * bins;
                p.o += opt;
                p.o2 += static_cast<u128>(opt) * opt;
                p.dxo += static_cast<u128>(bins) * opt;
            }
        });

    Partial total;
    for (const auto& p : parts) {
        total.r += p.r;
        total.r2 += p.r2;
        total.d += p.d;
        total.d2 += p.d2;
        total.o += p.o;
        total.o2 += p.o2;
        total.dxo += p.dxo;
        total.resamples += p.resamples;
    }

    const double t = static_cast<double>(trials);
    EquivalenceReport rep;
    rep.resamples = total.resamples;

    const double rsum = static_cast<double>(total.r);
    const double rsum2 = static_cast<double>(total.r2);
    const double rvar = std::max((rsum2 - rsum * rsum / t) / (t - 1.0), 0.0);
    rep.lhs.estimate = rsum / (t * kScale);
    rep.lhs.std_error = std::sqrt(rvar / t) / kScale;
    rep.lhs.trials = trials;
    rep.lhs.seed = seed;

    const double md = static_cast<double>(total.d) / t;
    const double mo = static_cast<double>(total.o) / t;
    const double vd = std::max((static_cast<double>(total.d2) - t * md * md) / (t - 1.0), 0.0);
    const double vo = std::max((static_cast<double>(total.o2) - t * mo * mo) / (t - 1.0), 0.0);
    const double cdo = (static_cast<double>(total.dxo) - t * md * mo) / (t - 1.0);
    const double ratio = md / mo;
    rep.rhs.estimate = ratio;
    // First-order propagation of the ratio of means.
    rep.rhs.std_error =
        std::sqrt(std::max(vd - 2.0 * ratio * cdo + ratio * ratio * vo, 0.0) / t) / mo;
    rep.rhs.trials = trials;
    rep.rhs.seed = seed;

    rep.overlap = std::abs(rep.lhs.estimate - rep.rhs.estimate) <=
                  3.0 * (rep.lhs.std_error + rep.rhs.std_error);
    return rep;
}

namespace {

struct EventSetup {
    LargeSmallDecomposition d;
    ItemList padded;
    std::uint64_t q = 0;
};

EventSetup event_setup(const DiscreteDistribution& F) {
    mpz_class D(1);
    for (const Rational& p : F.probs()) D = lcm(D, p.den());
    const auto N0 = to_u64(D);
    if (!N0) throw TooLargeError("minimal realization of F does not fit in 64 bits");
    const ItemList L = realizing_list(F, *N0);

    std::vector<Rational> larges, smalls;
    for (const Rational& s : L.items()) (s > kHalf ? larges : smalls).push_back(s);
    if (larges.empty()) throw NotApplicableError("no items strictly above 1/2");
    if (smalls.empty()) throw NotApplicableError("no items at or below 1/2");

    const std::uint64_t ell = larges.size();
    const std::uint64_t pad = (ell - smalls.size() % ell) % ell;
    for (std::uint64_t i = 0; i < pad; ++i) smalls.emplace_back(0L);
    const std::uint64_t n = smalls.size();

    std::sort(larges.begin(), larges.end(), [](const Rational& a, const Rational& b) { return b < a; });

    EventSetup out;
    out.d.large_count = ell;
    out.d.small_count = n;
    out.d.threshold_item = larges[(ell + 1) / 2 - 1]; // rank ceil(ell/2), 1-based
    out.d.s_star = kOne - out.d.threshold_item;
    out.q = 15 * (n / ell);

    std::vector<Rational> all = std::move(larges);
    all.insert(all.end(), smalls.begin(), smalls.end());
    out.padded = ItemList(std::move(all));
    return out;
}

} // namespace

LargeSmallDecomposition large_small_decomposition(const DiscreteDistribution& F) {
    return event_setup(F).d;
}

TrialReport event_ef_estimate(const DiscreteDistribution& F, std::uint64_t trials,
                              RandomSeed seed, unsigned threads) {
    if (trials < 1) throw ValidationError("needs at least one trial");
    const EventSetup setup = event_setup(F);
    const DiscreteDistribution Fhat = induced_distribution(setup.padded);
    const Sampler sampler(Fhat);
    const ScaledItems sc = scale_items(Fhat.sizes());

    std::uint64_t threshold_num = 0;
    if (sc.ok) {
        const Rational scaled = setup.d.s_star * Rational(static_cast<long>(sc.denom));
        if (!scaled.is_integer()) throw std::logic_error("threshold does not scale integrally");
        threshold_num = to_u64(scaled.num()).value();
    }

    struct Partial {
        std::uint64_t hits = 0;
    };
    auto parts = detail::run_blocks<Partial>(
        trials, threads, [&](Partial& p, std::uint64_t first, std::uint64_t last) {
            for (std::uint64_t t = first; t < last; ++t) {
                Rng rng(RandomSeed{seed.seed, seed.stream + t});
                bool survived = true;
                if (sc.ok) {
                    u128 sum = 0;
                    for (std::uint64_t i = 0; i < setup.q; ++i) {
                        const std::size_t idx = sampler.draw(rng);
                        if (2 * sc.nums[idx] > sc.denom) { // strictly large draw
                            survived = false;
                            break;
                        }
                        sum += sc.nums[idx];
                    }
                    if (survived && sum >= threshold_num) ++p.hits;
                } else {
                    Rational sum;
                    for (std::uint64_t i = 0; i < setup.q; ++i) {
                        const Rational& s = Fhat.sizes()[sampler.draw(rng)];
                        if (s > kHalf) {
                            survived = false;
                            break;
                        }
                        sum += s;
                    }
                    if (survived && sum >= setup.d.s_star) ++p.hits;
                }
            }
        });

    std::uint64_t hits = 0;
    for (const auto& p : parts) hits += p.hits;
    TrialReport r;
    r.trials = trials;
    r.seed = seed;
    r.estimate = static_cast<double>(hits) / static_cast<double>(trials);
    r.std_error =
        std::sqrt(std::max(r.estimate * (1.0 - r.estimate), 0.0) / static_cast<double>(trials));
    return r;
}

} // namespace bincover
