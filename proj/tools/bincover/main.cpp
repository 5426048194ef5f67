// Command-line front door: distribution/list analysis, Monte Carlo
// experiments, bound tables, family generators, and the acceptance battery.
//
// Exit codes: 0 ok, 2 validation/parse failure, 3 cap exceeded,
// 4 acceptance battery failure, 1 anything else.

#include <array>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bincover/bounds.hpp"
#include "bincover/chain.hpp"
#include "bincover/dnf.hpp"
#include "bincover/errors.hpp"
#include "bincover/experiments.hpp"
#include "bincover/families.hpp"
#include "bincover/io.hpp"
#include "bincover/offline.hpp"
#include "bincover/options.hpp"
#include "bincover/rng.hpp"
#include "bincover/verify.hpp"

namespace {

using bincover::AnalysisOptions;
using bincover::Rational;
using json = bincover::io::json;

struct RunConfig {
    std::string input;
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = bincover::kDefaultSeed;
    std::uint64_t trials = 100'000;
    unsigned threads = 0;
    std::size_t state_cap = AnalysisOptions{}.state_cap;
    std::size_t opt_cap = AnalysisOptions{}.opt_cap;
    bool quick = false;
};

AnalysisOptions options_of(const RunConfig& cfg) {
    AnalysisOptions opts;
    opts.state_cap = cfg.state_cap;
    opts.opt_cap = cfg.opt_cap;
    return opts;
}

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
    } else {
        bincover::io::write_text_file(cfg.out, text);
    }
}

// Key/value report, rendered as a two-column CSV or a flat JSON object.
class KvReport {
  public:
    KvReport() { add("schema_version", std::to_string(bincover::io::kSchemaVersion)); }

    void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
    void add(const std::string& key, const Rational& value) { add(key, value.str()); }

    std::string render(const std::string& format) const {
        if (format == "json") {
            json j;
            for (const auto& [k, v] : rows_) j[k] = v;
            return bincover::io::to_canonical_string(j);
        }
        bincover::io::CsvTable table({"field", "value"});
        for (const auto& [k, v] : rows_) table.add_row({k, v});
        return table.str();
    }

  private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

// Experiment report with the fixed column set shared by simulate and
// random-order: experiment, parameters, estimate, stderr, reference, verdict.
class ExperimentReport {
  public:
    void add(const std::string& experiment, const std::string& parameters, double estimate,
             double std_error, const std::string& reference, const std::string& verdict) {
        rows_.push_back({experiment, parameters, fmt(estimate), fmt(std_error), reference, verdict});
    }

    std::string render(const std::string& format) const {
        if (format == "json") {
            json j;
            j["schema_version"] = bincover::io::kSchemaVersion;
            json rows = json::array();
            for (const auto& r : rows_) {
                json row;
                row["experiment"] = r[0];
                row["parameters"] = r[1];
                row["estimate"] = r[2];
                row["stderr"] = r[3];
                row["reference"] = r[4];
                row["verdict"] = r[5];
                rows.push_back(std::move(row));
            }
            j["rows"] = std::move(rows);
            return bincover::io::to_canonical_string(j);
        }
        bincover::io::CsvTable table(
            {"schema_version", "experiment", "parameters", "estimate", "stderr", "reference", "verdict"});
        for (const auto& r : rows_)
            table.add_row({std::to_string(bincover::io::kSchemaVersion), r[0], r[1], r[2], r[3], r[4], r[5]});
        return table.str();
    }

  private:
    std::vector<std::array<std::string, 6>> rows_;
};

int run_analyze(const RunConfig& cfg, bool want_degree, bool no_hints,
                const std::string& dump_chain) {
    const auto F = bincover::io::read_distribution_file(cfg.input);
    AnalysisOptions opts = options_of(cfg);
    opts.use_hints = !no_hints;

    const bincover::AecrResult res = bincover::aecr_exact(F, opts);
    const bincover::PackingDecision decision = bincover::is_perfect_packing(F, opts);

    KvReport report;
    report.add("states", std::to_string(res.analysis.state_count));
    report.add("period", std::to_string(res.analysis.period));
    report.add("exact_solve", res.analysis.exact ? "true" : "false");
    report.add("expected_size", F.expected_size());
    if (res.analysis.exact) {
        report.add("expected_T", res.analysis.expected_T.value());
        report.add("expected_R", res.analysis.expected_R.value());
    } else {
        report.add("expected_T", fmt(res.analysis.expected_T_f));
        report.add("expected_R", fmt(res.analysis.expected_R_f));
        report.add("solve_residual", fmt(res.analysis.solve_residual));
    }
    switch (res.provenance) {
        case bincover::AecrProvenance::periodic:
            report.add("aecr", Rational(1));
            report.add("aecr_provenance", "periodic");
            break;
        case bincover::AecrProvenance::perfect_packing:
            if (res.value) {
                report.add("aecr", *res.value);
            } else {
                report.add("aecr", fmt(res.value_f));
            }
            report.add("aecr_provenance", "perfect-packing");
            break;
        case bincover::AecrProvenance::gamma_bounded:
            report.add("aecr_lower_estimate",
                       res.value ? res.value->str() : fmt(res.value_f));
            if (res.upper_hint) report.add("aecr_upper_hint", fmt(*res.upper_hint));
            if (res.gamma_upper) report.add("gamma_upper", *res.gamma_upper);
            if (res.gamma_mc_lower) report.add("gamma_mc_lower", fmt(*res.gamma_mc_lower));
            report.add("aecr_provenance", "gamma-bounded");
            break;
    }
    if (const auto* cert = std::get_if<bincover::PerfectPackingCertificate>(&decision)) {
        report.add("perfect_packing", "true");
        report.add("certificate",
                   bincover::io::to_canonical_string(bincover::io::certificate_to_json(*cert)));
    } else {
        report.add("perfect_packing", "false");
        report.add("refutation",
                   bincover::io::to_canonical_string(bincover::io::refutation_to_json(
                       std::get<bincover::PackingRefutation>(decision))));
    }
    if (want_degree) {
        const bincover::DegreeResult deg = bincover::degree(F, opts);
        report.add("degree", std::to_string(deg.degree));
    }
    if (!dump_chain.empty()) {
        const bincover::BinLevelChain chain = bincover::build_chain(F, opts.state_cap);
        bincover::io::write_json_file(dump_chain, bincover::io::chain_to_json(chain));
    }
    emit(cfg, report.render(cfg.format));
    return 0;
}

int run_simulate(const RunConfig& cfg) {
    const auto F = bincover::io::read_distribution_file(cfg.input);
    const bincover::ExcursionStats stats =
        bincover::simulate_excursions(F, cfg.trials, {cfg.seed, 0}, cfg.threads);

    std::string ref_T, ref_R, verdict_T, verdict_R;
    try {
        const bincover::AecrResult res = bincover::aecr_exact(F, options_of(cfg));
        if (res.analysis.exact) {
            ref_T = res.analysis.expected_T->str();
            ref_R = res.analysis.expected_R->str();
            const double dT = std::abs(stats.mean_items() - res.analysis.expected_T->as_double());
            const double dR =
                std::abs(stats.mean_overshoot() - res.analysis.expected_R->as_double());
            verdict_T = dT <= 4.0 * stats.stderr_items() ? "within-4se" : "outside-4se";
            verdict_R = dR <= 4.0 * stats.stderr_overshoot() ? "within-4se" : "outside-4se";
        }
    } catch (const bincover::CapExceededError&) {
        // Chain too large for the exact reference; report the estimate alone.
    }

    const std::string params =
        "trials=" + std::to_string(cfg.trials) + ";seed=" + std::to_string(cfg.seed);
    ExperimentReport report;
    report.add("excursion-items", params, stats.mean_items(), stats.stderr_items(), ref_T, verdict_T);
    report.add("excursion-overshoot", params, stats.mean_overshoot(), stats.stderr_overshoot(),
               ref_R, verdict_R);
    emit(cfg, report.render(cfg.format));
    return 0;
}

int run_random_order(const RunConfig& cfg, std::uint64_t opt_override) {
    const bincover::ItemList L = bincover::io::read_list_file(cfg.input);
    std::optional<std::uint64_t> opt;
    if (opt_override > 0) opt = opt_override;
    const bincover::TrialReport rep = bincover::random_order_ratio_estimate(
        L, cfg.trials, {cfg.seed, 0}, opt, options_of(cfg), cfg.threads);
    const std::uint64_t used_opt =
        opt ? *opt : bincover::opt_exact(L, options_of(cfg).opt_cap);

    ExperimentReport report;
    report.add("random-order-ratio",
               "N=" + std::to_string(L.length()) + ";trials=" + std::to_string(cfg.trials) +
                   ";seed=" + std::to_string(cfg.seed),
               rep.estimate, rep.std_error, "opt=" + std::to_string(used_opt), "reported");
    emit(cfg, report.render(cfg.format));
    return 0;
}

int run_bounds(const RunConfig& cfg) {
    struct Row {
        std::string name, reference, computed, tail;
        bool ok;
    };
    std::vector<Row> rows;

    const auto upper = bincover::pp1_upper_constant(30);
    rows.push_back({"inverse-upper-series(30)", "0.736", fmt(upper.value),
                    fmt(upper.series.tail_bound.as_double()),
                    std::abs(upper.value - 0.736) <= 0.001});
    const auto lower = bincover::pp1_lower_constant(200);
    rows.push_back({"inverse-lower-series(200)", "0.686", fmt(lower.value),
                    fmt(lower.series.tail_bound.as_double()),
                    std::abs(lower.value - 0.686) <= 0.001});
    const std::uint64_t depth = cfg.quick ? 2'000 : 400'000;
    const auto deep = bincover::pp1_lower_constant(depth);
    rows.push_back({"inverse-lower-series(" + std::to_string(depth) + ")", "0.686",
                    fmt(deep.value), fmt(deep.value_high - deep.value_low),
                    std::abs(deep.value - 0.686) <= 0.001});
    const Rational fmk = bincover::fmk_lower_ET(10, 10);
    rows.push_back({"fmk-ET-lower(10,10)", "2.85", fmt(fmk.as_double()), "0",
                    fmk >= Rational(57, 20)});
    const auto pptwo = bincover::pptwo_ET_upper(3, 60);
    const Rational pptwo_total = pptwo.truncated_sum + pptwo.tail_bound;
    rows.push_back({"pptwo-ET-upper(3)", "3", fmt(pptwo_total.as_double()),
                    fmt(pptwo.tail_bound.as_double()), pptwo_total <= Rational(3)});
    const double cover = bincover::cover_fail_bound(5.0);
    rows.push_back({"covering-failure-bound(5)", "0.044", fmt(cover), "0", cover <= 0.044});

    if (cfg.format == "json") {
        json j;
        j["schema_version"] = bincover::io::kSchemaVersion;
        json rs = json::array();
        for (const auto& r : rows) {
            json row;
            row["name"] = r.name;
            row["reference"] = r.reference;
            row["computed"] = r.computed;
            row["tail_bound"] = r.tail;
            row["status"] = r.ok ? "ok" : "fail";
            rs.push_back(std::move(row));
        }
        j["rows"] = std::move(rs);
        emit(cfg, bincover::io::to_canonical_string(j));
    } else {
        bincover::io::CsvTable table(
            {"schema_version", "name", "reference", "computed", "tail_bound", "status"});
        for (const auto& r : rows)
            table.add_row({std::to_string(bincover::io::kSchemaVersion), r.name, r.reference,
                           r.computed, r.tail, r.ok ? "ok" : "fail"});
        emit(cfg, table.str());
    }
    for (const auto& r : rows)
        if (!r.ok) return 1;
    return 0;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = text.find(sep, start);
        if (end == std::string::npos) {
            out.push_back(text.substr(start));
            break;
        }
        out.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

int run_families(const RunConfig& cfg, const std::string& family, std::uint32_t m, std::uint32_t k,
                 const std::string& sizes_arg, const std::string& counts_arg,
                 const std::string& pairs_arg) {
    bincover::DiscreteDistribution F = [&] {
        if (family == "fmk") return bincover::family_fmk(m, k);
        if (family == "uniform") return bincover::family_uniform_discrete(k);
        if (family == "pp1") {
            std::vector<Rational> sizes;
            for (const auto& tok : split(sizes_arg, ',')) sizes.push_back(Rational::parse(tok));
            std::vector<std::uint32_t> counts;
            for (const auto& tok : split(counts_arg, ','))
                counts.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
            return bincover::family_pp1(std::move(sizes), std::move(counts));
        }
        std::vector<std::pair<Rational, Rational>> pairs;
        for (const auto& tok : split(pairs_arg, ',')) {
            const auto parts = split(tok, ':');
            if (parts.size() != 2)
                throw bincover::ValidationError("pair must look like g:s, got " + tok);
            pairs.emplace_back(Rational::parse(parts[0]), Rational::parse(parts[1]));
        }
        return bincover::family_pptwo(pairs);
    }();
    emit(cfg, bincover::io::to_canonical_string(bincover::io::distribution_to_json(F)));
    return 0;
}

int run_verify(const RunConfig& cfg) {
    const bincover::AcceptanceReport report = bincover::run_acceptance(cfg.quick, cfg.threads);
    for (const auto& c : report.criteria) {
        std::printf("%s  %2d %-28s %7.2fs  %s\n", c.passed ? "PASS" : "FAIL", c.index,
                    c.name.c_str(), c.seconds, c.detail.c_str());
    }
    std::printf("%s%s\n", report.all_passed() ? "all criteria passed" : "CRITERIA FAILED",
                report.quick ? " (quick mode)" : "");
    if (!cfg.out.empty()) {
        bincover::io::CsvTable table({"schema_version", "criterion", "name", "passed", "seconds", "detail"});
        for (const auto& c : report.criteria)
            table.add_row({std::to_string(bincover::io::kSchemaVersion), std::to_string(c.index),
                           c.name, c.passed ? "true" : "false", fmt(c.seconds), c.detail});
        bincover::io::write_text_file(cfg.out, table.str());
    }
    return report.all_passed() ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact analyzer and stochastic simulator for online bin covering"};
    app.require_subcommand(1);

    RunConfig cfg;
    bool want_degree = false, no_hints = false;
    std::string dump_chain;
    std::uint64_t opt_override = 0;
    std::string family_name;
    std::uint32_t fam_m = 1, fam_k = 3;
    std::string fam_sizes, fam_counts, fam_pairs;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", cfg.seed, "base RNG seed");
        sub->add_option("--trials", cfg.trials, "Monte Carlo trial count");
        sub->add_option("--threads", cfg.threads, "worker count, 0 = hardware");
        sub->add_option("--format", cfg.format, "report format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--state-cap", cfg.state_cap, "chain state cap");
        sub->add_option("--opt-cap", cfg.opt_cap, "offline solver item cap");
        sub->add_option("--out", cfg.out, "output file (default stdout)");
        sub->add_flag("--quick", cfg.quick, "reduced trial counts");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "exact chain analysis of a distribution");
    analyze->add_option("--input", cfg.input, "distribution JSON file")->required();
    analyze->add_flag("--degree", want_degree, "also compute the certificate degree");
    analyze->add_flag("--no-hints", no_hints, "ignore attached packing hints");
    analyze->add_option("--dump-chain", dump_chain, "write the chain as JSON");
    add_common(analyze);

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo excursion statistics");
    simulate->add_option("--input", cfg.input, "distribution JSON file")->required();
    add_common(simulate);

    CLI::App* random_order =
        app.add_subcommand("random-order", "permutation ratio estimate for a list");
    random_order->add_option("--input", cfg.input, "list JSON file")->required();
    random_order->add_option("--opt", opt_override, "known OPT value, 0 = compute exactly");
    add_common(random_order);

    CLI::App* bounds = app.add_subcommand("bounds", "closed-form bound and constant table");
    add_common(bounds);

    CLI::App* families = app.add_subcommand("families", "write canonical distribution files");
    CLI::App* fam_fmk = families->add_subcommand("fmk", "geometric pair family");
    fam_fmk->add_option("--m", fam_m, "pair count")->required();
    fam_fmk->add_option("--k", fam_k, "geometric base")->required();
    add_common(fam_fmk);
    CLI::App* fam_uniform = families->add_subcommand("uniform", "uniform on {1/k..k/k}");
    fam_uniform->add_option("--k", fam_k, "grid size")->required();
    add_common(fam_uniform);
    CLI::App* fam_pp1 = families->add_subcommand("pp1", "single-configuration family");
    fam_pp1->add_option("--sizes", fam_sizes, "comma-separated sizes, e.g. 1/2,1/4")->required();
    fam_pp1->add_option("--counts", fam_counts, "comma-separated counts, e.g. 1,2")->required();
    add_common(fam_pp1);
    CLI::App* fam_pptwo = families->add_subcommand("pptwo", "complement-pair family");
    fam_pptwo->add_option("--pairs", fam_pairs, "comma-separated g:s pairs, e.g. 2/3:1/3")
        ->required();
    add_common(fam_pptwo);
    families->require_subcommand(1);

    CLI::App* verify = app.add_subcommand("verify", "run the acceptance battery");
    add_common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) return run_analyze(cfg, want_degree, no_hints, dump_chain);
        if (simulate->parsed()) return run_simulate(cfg);
        if (random_order->parsed()) return run_random_order(cfg, opt_override);
        if (bounds->parsed()) return run_bounds(cfg);
        if (families->parsed()) {
            if (fam_fmk->parsed()) family_name = "fmk";
            else if (fam_uniform->parsed()) family_name = "uniform";
            else if (fam_pp1->parsed()) family_name = "pp1";
            else family_name = "pptwo";
            return run_families(cfg, family_name, fam_m, fam_k, fam_sizes, fam_counts, fam_pairs);
        }
        if (verify->parsed()) return run_verify(cfg);
    } catch (const bincover::CapExceededError& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 3;
    } catch (const bincover::ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
