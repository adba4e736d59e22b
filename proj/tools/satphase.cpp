// satphase command-line interface: random CNF instance generation, moment
// analytics, Monte Carlo density sweeps, threshold fitting, finite-size
// collapse and sandwich-bound audits. Every randomized subcommand requires an
// explicit --seed; identical flags always produce identical output bytes,
// independent of --workers.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "satphase/satphase.hpp"

namespace {

using namespace satphase;
using nlohmann::json;

class usage_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

std::string dump(const json& j) {
    return j.dump(2) + "\n";
}

std::vector<double> linspace(double lo, double hi, int steps) {
    if (steps < 1) throw usage_error("--steps must be >= 1");
    if (hi < lo) throw usage_error("--c-max must be >= --c-min");
    std::vector<double> grid;
    grid.reserve(steps);
    if (steps == 1) {
        grid.push_back(lo);
        return grid;
    }
    for (int i = 0; i < steps; ++i) grid.push_back(lo + i * (hi - lo) / (steps - 1));
    return grid;
}

int resolve_m(int n, std::optional<int> m, std::optional<double> c) {
    if (m.has_value() == c.has_value())
        throw usage_error("exactly one of --m and --c is required");
    if (m) return *m;
    return round_half_even(*c * n);
}

struct CommonModelFlags {
    int n = 0;
    double p = 0.0;
    std::optional<double> q;

    ModelParams params(int m) const {
        ModelParams out{n, m, p, q.value_or(p)};
        out.validate();
        return out;
    }
};

void add_model_flags(CLI::App* cmd, CommonModelFlags& flags) {
    cmd->add_option("--n", flags.n, "variable count n")->required();
    cmd->add_option("--p", flags.p, "positive-literal probability p per slot")->required();
    cmd->add_option("--q", flags.q,
                    "negative-literal probability q per slot (defaults to p, the unbiased model)");
}

json analytic_report(const ModelParams& params) {
    json out;
    out["params"] = {{"n", params.n}, {"m", params.m}, {"p", params.p}, {"q", params.q},
                     {"c", params.density()}, {"kappa", params.mean_clause_len()}};
    out["moments"] = sat_prob_bounds(params);
    if (params.p > 0.0 && params.q > 0.0) {
        const CriticalDensities cd = critical_densities(params);
        out["critical"] = cd;
        out["asymptotic_lb_available"] =
            params.unbiased() || (params.q <= params.p && params.p <= cd.condition34_max_p);
    }
    if (params.unbiased()) {
        if (params.p > 0.0) out["scaling_prob"] = scaling_prob(params);
        out["mean_field"] = mean_field_prob(params);
    }
    return out;
}

int run_app(int argc, char** argv) {
    CLI::App app{"satphase: analytics and Monte Carlo experiments for the SAT/UNSAT phase "
                 "transition of random CNF formulas with unrestricted clause length\n"
                 "model: n variables, m clauses, density c = m/n; each clause takes every "
                 "variable positively with probability p and negated with probability q, so the "
                 "mean clause length is kappa = (p+q)n"};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate one random CNF instance");
    CommonModelFlags gen_model;
    add_model_flags(gen, gen_model);
    std::optional<int> gen_m;
    std::optional<double> gen_c;
    std::uint64_t gen_seed = 0, gen_stream = 0;
    std::string gen_format = "dimacs", gen_out;
    gen->add_option("--m", gen_m, "clause count m");
    gen->add_option("--c", gen_c, "clause density c = m/n (m = round(c*n))");
    gen->add_option("--seed", gen_seed, "master seed (required for reproducibility)")->required();
    gen->add_option("--stream", gen_stream, "stream index within the master seed");
    gen->add_option("--format", gen_format, "output format: dimacs or json")
        ->check(CLI::IsMember({"dimacs", "json"}));
    gen->add_option("-o,--output", gen_out, "output file (stdout when omitted)");

    // ---- analytic ----
    auto* analytic = app.add_subcommand("analytic", "closed-form moment and density report");
    CommonModelFlags ana_model;
    add_model_flags(analytic, ana_model);
    std::optional<int> ana_m;
    std::optional<double> ana_c;
    std::string ana_out;
    analytic->add_option("--m", ana_m, "clause count m");
    analytic->add_option("--c", ana_c, "clause density c = m/n (m = round(c*n))");
    analytic->add_option("-o,--output", ana_out, "output file (stdout when omitted)");

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "empirical prob(SAT) over a density grid");
    CommonModelFlags sweep_model;
    add_model_flags(sweep, sweep_model);
    double sweep_cmin = 0.0, sweep_cmax = 0.0;
    int sweep_steps = 0, sweep_trials = 0, sweep_workers = 0;
    std::uint64_t sweep_seed = 0;
    std::string sweep_mode = "auto", sweep_format = "csv", sweep_out;
    sweep->add_option("--c-min", sweep_cmin, "lowest density c = m/n")->required();
    sweep->add_option("--c-max", sweep_cmax, "highest density c = m/n")->required();
    sweep->add_option("--steps", sweep_steps, "number of grid points")->required();
    sweep->add_option("--trials", sweep_trials, "trials per grid point")->required();
    sweep->add_option("--seed", sweep_seed, "master seed")->required();
    sweep->add_option("--mode", sweep_mode, "solver mode: auto, count or decide")
        ->check(CLI::IsMember({"auto", "count", "decide"}));
    sweep->add_option("--workers", sweep_workers,
                      "worker threads (default: machine parallelism; never affects output bytes)");
    sweep->add_option("--format", sweep_format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("-o,--output", sweep_out, "output file (stdout when omitted)");

    // ---- threshold ----
    auto* threshold = app.add_subcommand("threshold",
                                         "fit the transition location from a sweep");
    CommonModelFlags thr_model;
    thr_model.n = -1; // optional when --input is used
    std::string thr_input, thr_out, thr_mode = "auto";
    double thr_cmin = 0.0, thr_cmax = 0.0;
    int thr_steps = 0, thr_trials = 0, thr_workers = 0;
    std::uint64_t thr_seed = 0;
    threshold->add_option("--input", thr_input,
                          "fit a previously saved sweep CSV instead of sampling");
    auto* thr_n = threshold->add_option("--n", thr_model.n, "variable count n");
    auto* thr_p = threshold->add_option("--p", thr_model.p, "positive-literal probability p per slot");
    threshold->add_option("--q", thr_model.q, "negative-literal probability q per slot (defaults to p)");
    auto* thr_cmin_o = threshold->add_option("--c-min", thr_cmin, "lowest density c = m/n");
    auto* thr_cmax_o = threshold->add_option("--c-max", thr_cmax, "highest density c = m/n");
    auto* thr_steps_o = threshold->add_option("--steps", thr_steps, "number of grid points");
    auto* thr_trials_o = threshold->add_option("--trials", thr_trials, "trials per grid point");
    auto* thr_seed_o = threshold->add_option("--seed", thr_seed, "master seed");
    threshold->add_option("--mode", thr_mode, "solver mode: auto, count or decide")
        ->check(CLI::IsMember({"auto", "count", "decide"}));
    threshold->add_option("--workers", thr_workers, "worker threads");
    threshold->add_option("-o,--output", thr_out, "output file (stdout when omitted)");

    // ---- collapse ----
    auto* collapse = app.add_subcommand(
        "collapse", "iso-x sweeps at several n rescaled onto the profile u(x)");
    double col_x = 0.0, col_cmin = 0.0, col_cmax = 0.0;
    std::vector<int> col_ns;
    int col_steps = 0, col_trials = 0, col_workers = 0;
    std::uint64_t col_seed = 0;
    std::string col_mode = "auto", col_out;
    collapse->add_option("--x", col_x, "shared miss probability x = (1-p)^n; p is derived per n")
        ->required();
    collapse->add_option("--n-list", col_ns, "variable counts n (repeat or comma separate)")
        ->required()
        ->delimiter(',');
    collapse->add_option("--c-min", col_cmin, "lowest density c = m/n")->required();
    collapse->add_option("--c-max", col_cmax, "highest density c = m/n")->required();
    collapse->add_option("--steps", col_steps, "number of grid points")->required();
    collapse->add_option("--trials", col_trials, "trials per grid point")->required();
    collapse->add_option("--seed", col_seed, "master seed")->required();
    collapse->add_option("--mode", col_mode, "solver mode: auto, count or decide")
        ->check(CLI::IsMember({"auto", "count", "decide"}));
    collapse->add_option("--workers", col_workers, "worker threads");
    collapse->add_option("-o,--output", col_out, "output file (stdout when omitted)");

    // ---- audit ----
    auto* audit = app.add_subcommand("audit",
                                     "check empirical prob(SAT) against the sandwich bounds");
    std::vector<int> audit_ns;
    std::vector<double> audit_ps, audit_qs, audit_cmults, audit_cs;
    int audit_trials = 0, audit_workers = 0;
    std::uint64_t audit_seed = 0;
    std::string audit_mode = "auto", audit_out;
    audit->add_option("--n-list", audit_ns, "variable counts n")->required()->delimiter(',');
    audit->add_option("--p-list", audit_ps, "positive-literal probabilities p")
        ->required()
        ->delimiter(',');
    audit->add_option("--q-list", audit_qs,
                      "negative-literal probabilities q, zipped with --p-list (defaults to p)")
        ->delimiter(',');
    audit->add_option("--c-mults", audit_cmults,
                      "densities as multiples of the critical density c_cr(n, p)")
        ->delimiter(',');
    audit->add_option("--c-list", audit_cs, "absolute densities c = m/n")->delimiter(',');
    audit->add_option("--trials", audit_trials, "trials per grid point")->required();
    audit->add_option("--seed", audit_seed, "master seed")->required();
    audit->add_option("--mode", audit_mode, "solver mode: auto, count or decide")
        ->check(CLI::IsMember({"auto", "count", "decide"}));
    audit->add_option("--workers", audit_workers, "worker threads");
    audit->add_option("-o,--output", audit_out, "output file (stdout when omitted)");

    // ---- ksat-ref ----
    auto* ksat = app.add_subcommand("ksat-ref", "fixed-clause-length (K-SAT) reference values");
    int ksat_k = 0;
    std::optional<int> ksat_n;
    int ksat_sigma = 0;
    std::optional<double> ksat_p;
    std::string ksat_out;
    ksat->add_option("--k", ksat_k, "clause length K")->required();
    ksat->add_option("--n", ksat_n, "variable count n (enables the pair-probability profile)");
    ksat->add_option("--sigma", ksat_sigma, "Hamming distance sigma between the paired assignments");
    ksat->add_option("--p", ksat_p, "slot probability p for the unrestricted-model profile");
    ksat->add_option("-o,--output", ksat_out, "output file (stdout when omitted)");

    // ---- sample-space ----
    auto* space = app.add_subcommand("sample-space",
                                     "log2 sample-space cardinalities: covering set vs K-SAT");
    int space_n = 0, space_k = 0;
    std::string space_out;
    space->add_option("--n", space_n, "variable count n")->required();
    space->add_option("--k", space_k, "clause length K")->required();
    space->add_option("-o,--output", space_out, "output file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (gen->parsed()) {
        const ModelParams params = gen_model.params(resolve_m(gen_model.n, gen_m, gen_c));
        const SeedSpec seed{gen_seed, gen_stream};
        const Formula f = generate_formula(params, seed);
        if (gen_format == "dimacs") write_output(gen_out, encode_dimacs(f, params, seed));
        else write_output(gen_out, dump(encode_instance_json(f, params, seed)));
        return 0;
    }

    if (analytic->parsed()) {
        const ModelParams params = ana_model.params(resolve_m(ana_model.n, ana_m, ana_c));
        write_output(ana_out, dump(analytic_report(params)));
        return 0;
    }

    if (sweep->parsed()) {
        const SweepResult result = run_sweep(
            sweep_model.n, sweep_model.p, sweep_model.q.value_or(sweep_model.p),
            linspace(sweep_cmin, sweep_cmax, sweep_steps), sweep_trials, sweep_seed,
            solve_mode_from_string(sweep_mode), sweep_workers);
        if (sweep_format == "csv") write_output(sweep_out, sweep_to_csv(result));
        else write_output(sweep_out, dump(json(result)));
        return 0;
    }

    if (threshold->parsed()) {
        SweepResult result;
        if (!thr_input.empty()) {
            std::ifstream in(thr_input, std::ios::binary);
            if (!in) throw std::runtime_error("cannot open input file: " + thr_input);
            std::ostringstream buf;
            buf << in.rdbuf();
            result = sweep_from_csv(buf.str());
        } else {
            if (!*thr_n || !*thr_p || !*thr_cmin_o || !*thr_cmax_o || !*thr_steps_o ||
                !*thr_trials_o || !*thr_seed_o)
                throw usage_error("threshold requires either --input or the full sweep flag set "
                                  "(--n --p --c-min --c-max --steps --trials --seed)");
            result = run_sweep(thr_model.n, thr_model.p, thr_model.q.value_or(thr_model.p),
                               linspace(thr_cmin, thr_cmax, thr_steps), thr_trials, thr_seed,
                               solve_mode_from_string(thr_mode), thr_workers);
        }
        const ThresholdFit fit = estimate_threshold(result);
        json out;
        out["n"] = result.n;
        out["p"] = result.p;
        out["q"] = result.q;
        out["master_seed"] = result.master_seed;
        out["fit"] = fit;
        if (result.p == result.q && result.p > 0.0) {
            ModelParams params{result.n, 0, result.p, result.q};
            out["c_cr_analytic"] = critical_densities(params).c_cr;
        }
        write_output(thr_out, dump(out));
        return 0;
    }

    if (collapse->parsed()) {
        if (!(col_x > 0.0 && col_x < 1.0)) throw usage_error("--x must lie in (0, 1)");
        std::vector<SweepResult> sweeps;
        const std::vector<double> grid = linspace(col_cmin, col_cmax, col_steps);
        for (std::size_t i = 0; i < col_ns.size(); ++i) {
            const int n = col_ns[i];
            const double p = -std::expm1(std::log(col_x) / n);
            sweeps.push_back(run_sweep(n, p, p, grid, col_trials,
                                       col_seed + i, solve_mode_from_string(col_mode),
                                       col_workers));
        }
        write_output(col_out, dump(json(collapse_check(sweeps))));
        return 0;
    }

    if (audit->parsed()) {
        if (audit_cmults.empty() == audit_cs.empty())
            throw usage_error("exactly one of --c-mults and --c-list is required");
        if (!audit_qs.empty() && audit_qs.size() != audit_ps.size())
            throw usage_error("--q-list must have the same length as --p-list");
        std::vector<ModelParams> grid;
        for (int n : audit_ns) {
            for (std::size_t pi = 0; pi < audit_ps.size(); ++pi) {
                const double p = audit_ps[pi];
                const double q = audit_qs.empty() ? p : audit_qs[pi];
                ModelParams base{n, 0, p, q};
                base.validate();
                if (!audit_cmults.empty()) {
                    const double c_cr = critical_densities(base).c_cr;
                    for (double mult : audit_cmults)
                        grid.push_back(ModelParams{n, round_half_even(mult * c_cr * n), p, q});
                } else {
                    for (double c : audit_cs)
                        grid.push_back(ModelParams{n, round_half_even(c * n), p, q});
                }
            }
        }
        const AuditReport report = bounds_audit(grid, audit_trials, audit_seed,
                                                solve_mode_from_string(audit_mode), audit_workers);
        write_output(audit_out, dump(json(report)));
        return 0;
    }

    if (ksat->parsed()) {
        const int n = ksat_n.value_or(ksat_k);
        const KsatReference r = ksat_reference(ksat_k, n, ksat_sigma, ksat_p.value_or(0.0));
        json out;
        out["c_cr_K"] = r.c_cr_K;
        out["c_cr_K_asymptote"] = r.c_cr_K_asymptote;
        if (ksat_n) {
            out["n"] = n;
            out["sigma"] = ksat_sigma;
            out["pair_prob_ksat"] = r.pair_prob_ksat;
            if (ksat_p) {
                out["p"] = *ksat_p;
                out["pair_prob_unrestricted_shape"] = r.pair_prob_unrestricted_shape;
            }
        }
        write_output(ksat_out, dump(out));
        return 0;
    }

    if (space->parsed()) {
        write_output(space_out, dump(json(sample_space_report(space_n, space_k))));
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_app(argc, argv);
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
