#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "satphase/analytics.hpp"
#include "satphase/core.hpp"
#include "satphase/model.hpp"
#include "satphase/randgen.hpp"

// Monte Carlo verification layer: seeded trials, density sweeps, threshold
// fitting against the base-2 logistic profile u(x) = (1 + 2^x)^-1, finite-size
// collapse, and auditing of the analytic sandwich bounds.
//
// Reproducibility contract: trial t of grid point i always runs on stream
// index i*trials + t of the given master seed, so results are identical for
// any worker count and any scheduling order.

namespace satphase {

inline constexpr double kWilsonZ95 = 1.959963984540054;  // two-sided 95%
inline constexpr double kWilsonZ997 = 3.0;               // three-sigma, ~99.7%

enum class SolveMode { Auto, Count, Decide };

inline SolveMode resolve_mode(SolveMode mode, int n) {
    if (mode != SolveMode::Auto) return mode;
    return n <= 20 ? SolveMode::Count : SolveMode::Decide;
}

inline std::string to_string(SolveMode mode) {
    switch (mode) {
        case SolveMode::Auto: return "auto";
        case SolveMode::Count: return "count";
        case SolveMode::Decide: return "decide";
    }
    return "auto";
}

inline SolveMode solve_mode_from_string(std::string_view s) {
    if (s == "auto") return SolveMode::Auto;
    if (s == "count") return SolveMode::Count;
    if (s == "decide") return SolveMode::Decide;
    throw std::invalid_argument("unknown solve mode: " + std::string(s));
}

// Round to nearest integer, ties to even (the default FP rounding mode).
inline int round_half_even(double v) {
    return static_cast<int>(std::nearbyint(v));
}

struct TrialRecord {
    SeedSpec seed;
    ModelParams params;
    bool sat = false;
    std::optional<std::uint64_t> solution_count;
    double wall_time_s = 0.0; // informational; not part of the reproducible payload
};

inline TrialRecord run_trial(const ModelParams& params, SeedSpec seed,
                             SolveMode mode = SolveMode::Auto,
                             int enumeration_limit = kDefaultEnumerationLimit) {
    params.validate();
    const auto t0 = std::chrono::steady_clock::now();
    TrialRecord rec;
    rec.seed = seed;
    rec.params = params;
    const Formula f = generate_formula(params, seed);
    if (resolve_mode(mode, params.n) == SolveMode::Count) {
        const std::uint64_t count = count_solutions(f, enumeration_limit);
        rec.sat = count > 0;
        rec.solution_count = count;
    } else {
        rec.sat = is_satisfiable(f).has_value();
    }
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

// Wilson score interval for a binomial proportion.
inline WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) throw std::invalid_argument("wilson_interval: trials must be >= 1");
    const double t = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / t;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / t;
    const double center = (phat + z2 / (2.0 * t)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / t + z2 / (4.0 * t * t)) / denom;
    WilsonInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (successes == 0) ci.low = 0.0;   // endpoints are exact, not rounding dust
    if (successes == trials) ci.high = 1.0;
    return ci;
}

namespace detail {

template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = static_cast<int>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    auto body = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::scoped_lock lock(err_mutex);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace detail

struct SweepPoint {
    double c_nominal = 0.0;
    int m = 0;
    int trials = 0;
    int sat_count = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct SweepResult {
    int n = 0;
    double p = 0.0;
    double q = 0.0;
    SolveMode mode = SolveMode::Auto; // resolved, never Auto in results
    std::uint64_t master_seed = 0;
    std::vector<SweepPoint> points;
};

// Empirical prob(SAT) as a function of the density c = m/n. Point i uses
// m = round_half_even(c_grid[i]*n) and trial streams i*trials .. i*trials+trials-1.
inline SweepResult run_sweep(int n, double p, double q, const std::vector<double>& c_grid,
                             int trials, std::uint64_t master_seed,
                             SolveMode mode = SolveMode::Auto, int workers = 0,
                             int enumeration_limit = kDefaultEnumerationLimit) {
    if (trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");
    if (c_grid.empty()) throw std::invalid_argument("run_sweep: empty density grid");
    for (std::size_t i = 1; i < c_grid.size(); ++i)
        if (c_grid[i] < c_grid[i - 1])
            throw std::invalid_argument("run_sweep: density grid must be ascending");

    SweepResult result;
    result.n = n;
    result.p = p;
    result.q = q;
    result.mode = resolve_mode(mode, n);
    result.master_seed = master_seed;

    std::vector<ModelParams> point_params(c_grid.size());
    for (std::size_t i = 0; i < c_grid.size(); ++i) {
        point_params[i] = ModelParams{n, round_half_even(c_grid[i] * n), p, q};
        point_params[i].validate();
    }

    const std::size_t total = c_grid.size() * static_cast<std::size_t>(trials);
    std::vector<std::uint8_t> sat(total, 0);
    detail::parallel_for(total, workers, [&](std::size_t task) {
        const std::size_t point = task / trials;
        const SeedSpec seed{master_seed, static_cast<std::uint64_t>(task)};
        sat[task] = run_trial(point_params[point], seed, result.mode, enumeration_limit).sat ? 1 : 0;
    });

    result.points.reserve(c_grid.size());
    for (std::size_t i = 0; i < c_grid.size(); ++i) {
        SweepPoint pt;
        pt.c_nominal = c_grid[i];
        pt.m = point_params[i].m;
        pt.trials = trials;
        for (int t = 0; t < trials; ++t) pt.sat_count += sat[i * trials + t];
        pt.p_hat = static_cast<double>(pt.sat_count) / trials;
        const WilsonInterval ci = wilson_interval(pt.sat_count, trials, kWilsonZ95);
        pt.ci_low = ci.low;
        pt.ci_high = ci.high;
        result.points.push_back(pt);
    }
    return result;
}

inline void to_json(nlohmann::json& j, const SweepPoint& pt) {
    j = nlohmann::json{{"c_nominal", pt.c_nominal}, {"m", pt.m},
                       {"trials", pt.trials},       {"sat_count", pt.sat_count},
                       {"p_hat", pt.p_hat},         {"ci_low", pt.ci_low},
                       {"ci_high", pt.ci_high}};
}

inline void to_json(nlohmann::json& j, const SweepResult& s) {
    j = nlohmann::json{{"n", s.n},
                       {"p", s.p},
                       {"q", s.q},
                       {"mode", to_string(s.mode)},
                       {"master_seed", s.master_seed},
                       {"points", s.points}};
}

inline std::string sweep_to_csv(const SweepResult& s) {
    using detail::format_double;
    std::string out = "n,p,q,c_nominal,m,trials,sat_count,p_hat,ci_low,ci_high,mode,master_seed\n";
    for (const SweepPoint& pt : s.points) {
        out += std::to_string(s.n) + "," + format_double(s.p) + "," + format_double(s.q) + "," +
               format_double(pt.c_nominal) + "," + std::to_string(pt.m) + "," +
               std::to_string(pt.trials) + "," + std::to_string(pt.sat_count) + "," +
               format_double(pt.p_hat) + "," + format_double(pt.ci_low) + "," +
               format_double(pt.ci_high) + "," + to_string(s.mode) + "," +
               std::to_string(s.master_seed) + "\n";
    }
    return out;
}

inline SweepResult sweep_from_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) ||
        line != "n,p,q,c_nominal,m,trials,sat_count,p_hat,ci_low,ci_high,mode,master_seed")
        throw std::invalid_argument("sweep CSV: unrecognized header");
    SweepResult s;
    bool first = true;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (cells.size() != 12)
            throw parse_error(lineno, "sweep CSV: expected 12 columns");
        try {
            const int n = std::stoi(cells[0]);
            const double p = std::stod(cells[1]);
            const double q = std::stod(cells[2]);
            const SolveMode mode = solve_mode_from_string(cells[10]);
            const std::uint64_t seed = std::stoull(cells[11]);
            if (first) {
                s.n = n; s.p = p; s.q = q; s.mode = mode; s.master_seed = seed;
                first = false;
            } else if (n != s.n || p != s.p || q != s.q || mode != s.mode || seed != s.master_seed) {
                throw parse_error(lineno, "sweep CSV: inconsistent sweep metadata across rows");
            }
            SweepPoint pt;
            pt.c_nominal = std::stod(cells[3]);
            pt.m = std::stoi(cells[4]);
            pt.trials = std::stoi(cells[5]);
            pt.sat_count = std::stoi(cells[6]);
            pt.p_hat = std::stod(cells[7]);
            pt.ci_low = std::stod(cells[8]);
            pt.ci_high = std::stod(cells[9]);
            s.points.push_back(pt);
        } catch (const parse_error&) {
            throw;
        } catch (const std::exception&) {
            throw parse_error(lineno, "sweep CSV: malformed cell");
        }
    }
    if (first) throw std::invalid_argument("sweep CSV: no data rows");
    return s;
}

struct ThresholdFit {
    double c_hat = 0.0;          // fitted transition location
    double gamma_hat = 0.0;      // fitted slope of u(gamma*(c - c_hat))
    double log_likelihood = 0.0; // binomial log-likelihood at the optimum
    double stderr_c = 0.0;       // curvature-based standard error of c_hat
};

inline void to_json(nlohmann::json& j, const ThresholdFit& f) {
    j = nlohmann::json{{"c_hat", f.c_hat},
                       {"gamma_hat", f.gamma_hat},
                       {"log_likelihood", f.log_likelihood},
                       {"stderr_c", f.stderr_c}};
}

namespace detail {

inline double sigmoid(double eta) {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double softplus(double z) {
    if (z > 35.0) return z;
    return std::log1p(std::exp(z));
}

} // namespace detail

// Maximum-likelihood fit of p(c) = (1 + 2^(gamma*(c - c_hat)))^-1 under a
// binomial likelihood. This is logistic regression in the linearized
// parameters (b0, b1) with p = sigmoid(b0 + b1*c), gamma = -b1/ln2 and
// c_hat = -b0/b1, solved by damped Newton iteration from the fixed start
// c0 = density of the point with p_hat nearest 1/2, gamma0 = n/c0.
inline ThresholdFit estimate_threshold(const SweepResult& sweep) {
    struct Obs { double c; double k; double t; };
    std::vector<Obs> obs;
    obs.reserve(sweep.points.size());
    int mid_count = 0;
    bool has_one = false, has_zero = false;
    for (const SweepPoint& pt : sweep.points) {
        if (pt.trials <= 0) continue;
        obs.push_back(Obs{static_cast<double>(pt.m) / sweep.n,
                          static_cast<double>(pt.sat_count), static_cast<double>(pt.trials)});
        if (pt.sat_count == 0) has_zero = true;
        else if (pt.sat_count == pt.trials) has_one = true;
        else ++mid_count;
    }
    if (obs.size() < 2)
        throw std::invalid_argument("estimate_threshold: need at least two sweep points");
    if (!(mid_count > 0 || (has_one && has_zero)))
        throw std::invalid_argument("estimate_threshold: degenerate sweep, transition not visible");
    if (mid_count < 5 && !(has_one && has_zero))
        throw std::invalid_argument("estimate_threshold: need >= 5 intermediate points or both extremes");

    double c0 = obs.front().c;
    double best = std::numeric_limits<double>::infinity();
    for (const Obs& o : obs) {
        const double dist = std::abs(o.k / o.t - 0.5);
        if (dist < best) {
            best = dist;
            c0 = o.c;
        }
    }
    if (!(c0 > 0.0)) {
        for (const Obs& o : obs)
            if (o.c > 0.0) { c0 = o.c; break; }
        if (!(c0 > 0.0)) c0 = 1.0;
    }
    const double gamma0 = sweep.n / c0;
    double b1 = -kLn2 * gamma0;
    double b0 = -b1 * c0;

    auto log_likelihood = [&obs](double a0, double a1) {
        double ll = 0.0;
        for (const Obs& o : obs) {
            const double eta = a0 + a1 * o.c;
            ll += -o.k * detail::softplus(-eta) - (o.t - o.k) * detail::softplus(eta);
        }
        return ll;
    };

    // Newton ascent with backtracking: the likelihood is concave, so a
    // step-halving line search converges to the unique maximum.
    double ll = log_likelihood(b0, b1);
    double h00 = 0.0, h01 = 0.0, h11 = 0.0, det = 0.0;
    for (int iter = 0; iter < 500; ++iter) {
        double g0 = 0.0, g1 = 0.0;
        h00 = h01 = h11 = 0.0;
        for (const Obs& o : obs) {
            const double prob = detail::sigmoid(b0 + b1 * o.c);
            const double resid = o.k - o.t * prob;
            const double w = o.t * prob * (1.0 - prob);
            g0 += resid;
            g1 += resid * o.c;
            h00 += w;
            h01 += w * o.c;
            h11 += w * o.c * o.c;
        }
        det = h00 * h11 - h01 * h01;
        if (!(det > 1e-300)) break; // separation: curvature vanished
        const double d0 = (h11 * g0 - h01 * g1) / det;
        const double d1 = (h00 * g1 - h01 * g0) / det;
        double step = 1.0;
        double next_ll = ll;
        double next_b0 = b0, next_b1 = b1;
        for (int halvings = 0; halvings < 60; ++halvings) {
            const double t0 = b0 + step * d0;
            const double t1 = b1 + step * d1;
            const double cand = log_likelihood(t0, t1);
            if (cand >= ll) {
                next_ll = cand;
                next_b0 = t0;
                next_b1 = t1;
                break;
            }
            step *= 0.5;
        }
        const double moved = std::max(std::abs(next_b0 - b0), std::abs(next_b1 - b1));
        b0 = next_b0;
        b1 = next_b1;
        ll = next_ll;
        if (moved <= 1e-13 * (1.0 + std::abs(b0) + std::abs(b1))) break;
    }

    ThresholdFit fit;
    fit.gamma_hat = -b1 / kLn2;
    fit.c_hat = -b0 / b1;
    fit.log_likelihood = ll;
    if (det > 1e-300 && b1 != 0.0) {
        const double var = (h11 / (b1 * b1) + 2.0 * b0 * h01 / (b1 * b1 * b1) +
                            b0 * b0 * h00 / (b1 * b1 * b1 * b1)) / det;
        fit.stderr_c = std::sqrt(std::max(0.0, var));
    } else {
        fit.stderr_c = std::numeric_limits<double>::infinity();
    }
    return fit;
}

struct CollapsePoint {
    double x_tilde = 0.0; // -n (1 - c/c_cr)
    double p_hat = 0.0;
    double u = 0.0;       // scaling prediction u(x_tilde)
    double dev = 0.0;     // p_hat - u
};

struct CollapseSweepEntry {
    int n = 0;
    double p = 0.0;
    double c_cr = 0.0;
    std::vector<CollapsePoint> points;
    double max_abs_dev_u = 0.0;      // over all points
    double max_abs_dev_u_core = 0.0; // over |x_tilde| <= 5
};

struct CollapsePairDev {
    int n_a = 0;
    int n_b = 0;
    double max_abs_dev = 0.0;
};

struct CollapseReport {
    double x = 0.0; // shared (1-p)^n
    std::vector<CollapseSweepEntry> sweeps;
    std::vector<CollapsePairDev> pair_devs;
    double max_abs_dev_u = 0.0;
    double max_abs_dev_u_core = 0.0;
    double max_mutual_dev = 0.0;
};

inline void to_json(nlohmann::json& j, const CollapsePoint& p) {
    j = nlohmann::json{{"x_tilde", p.x_tilde}, {"p_hat", p.p_hat}, {"u", p.u}, {"dev", p.dev}};
}

inline void to_json(nlohmann::json& j, const CollapseSweepEntry& e) {
    j = nlohmann::json{{"n", e.n},
                       {"p", e.p},
                       {"c_cr", e.c_cr},
                       {"points", e.points},
                       {"max_abs_dev_u", e.max_abs_dev_u},
                       {"max_abs_dev_u_core", e.max_abs_dev_u_core}};
}

inline void to_json(nlohmann::json& j, const CollapsePairDev& d) {
    j = nlohmann::json{{"n_a", d.n_a}, {"n_b", d.n_b}, {"max_abs_dev", d.max_abs_dev}};
}

inline void to_json(nlohmann::json& j, const CollapseReport& r) {
    j = nlohmann::json{{"x", r.x},
                       {"sweeps", r.sweeps},
                       {"pair_devs", r.pair_devs},
                       {"max_abs_dev_u", r.max_abs_dev_u},
                       {"max_abs_dev_u_core", r.max_abs_dev_u_core},
                       {"max_mutual_dev", r.max_mutual_dev}};
}

// Rescale sweeps taken at a common x = (1-p)^n onto the coordinate
// x_tilde = -n (1 - c/c_cr) and measure deviations from u and between sweeps
// (linear interpolation over overlapping x_tilde ranges).
inline CollapseReport collapse_check(const std::vector<SweepResult>& sweeps) {
    if (sweeps.empty()) throw std::invalid_argument("collapse_check: no sweeps");
    CollapseReport report;
    for (const SweepResult& s : sweeps) {
        if (s.p != s.q)
            throw std::invalid_argument("collapse_check: sweeps must use the unbiased model");
        const double x = std::exp(s.n * std::log1p(-s.p));
        if (report.sweeps.empty()) {
            report.x = x;
        } else if (!(std::abs(x - report.x) <= 1e-6 * std::max(report.x, 1e-300))) {
            throw std::invalid_argument("collapse_check: sweeps have mismatched x = (1-p)^n");
        }
        ModelParams params{s.n, 0, s.p, s.q};
        CollapseSweepEntry entry;
        entry.n = s.n;
        entry.p = s.p;
        entry.c_cr = critical_densities(params).c_cr;
        for (const SweepPoint& pt : s.points) {
            CollapsePoint cp;
            const double c = static_cast<double>(pt.m) / s.n;
            cp.x_tilde = -s.n * (1.0 - c / entry.c_cr);
            cp.p_hat = pt.p_hat;
            cp.u = scaling_u(cp.x_tilde);
            cp.dev = cp.p_hat - cp.u;
            entry.max_abs_dev_u = std::max(entry.max_abs_dev_u, std::abs(cp.dev));
            if (std::abs(cp.x_tilde) <= 5.0)
                entry.max_abs_dev_u_core = std::max(entry.max_abs_dev_u_core, std::abs(cp.dev));
            entry.points.push_back(cp);
        }
        report.max_abs_dev_u = std::max(report.max_abs_dev_u, entry.max_abs_dev_u);
        report.max_abs_dev_u_core = std::max(report.max_abs_dev_u_core, entry.max_abs_dev_u_core);
        report.sweeps.push_back(std::move(entry));
    }

    auto interpolate = [](const CollapseSweepEntry& e, double xt) -> std::optional<double> {
        if (e.points.empty()) return std::nullopt;
        if (xt < e.points.front().x_tilde || xt > e.points.back().x_tilde) return std::nullopt;
        for (std::size_t i = 1; i < e.points.size(); ++i) {
            const CollapsePoint& a = e.points[i - 1];
            const CollapsePoint& b = e.points[i];
            if (xt == a.x_tilde) return a.p_hat;
            if (xt == b.x_tilde) return b.p_hat;
            if (xt < b.x_tilde) {
                const double w = (xt - a.x_tilde) / (b.x_tilde - a.x_tilde);
                return a.p_hat + w * (b.p_hat - a.p_hat);
            }
        }
        return e.points.back().p_hat;
    };

    for (std::size_t i = 0; i < report.sweeps.size(); ++i) {
        for (std::size_t k = i + 1; k < report.sweeps.size(); ++k) {
            CollapsePairDev pair;
            pair.n_a = report.sweeps[i].n;
            pair.n_b = report.sweeps[k].n;
            for (const CollapsePoint& cp : report.sweeps[i].points) {
                if (auto other = interpolate(report.sweeps[k], cp.x_tilde))
                    pair.max_abs_dev = std::max(pair.max_abs_dev, std::abs(cp.p_hat - *other));
            }
            for (const CollapsePoint& cp : report.sweeps[k].points) {
                if (auto other = interpolate(report.sweeps[i], cp.x_tilde))
                    pair.max_abs_dev = std::max(pair.max_abs_dev, std::abs(cp.p_hat - *other));
            }
            report.max_mutual_dev = std::max(report.max_mutual_dev, pair.max_abs_dev);
            report.pair_devs.push_back(pair);
        }
    }
    return report;
}

struct AuditPoint {
    ModelParams params;
    double c = 0.0;
    int trials = 0;
    int sat_count = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;  // 99.7% Wilson
    double ci_high = 0.0;
    double prob_lower = 0.0;
    double prob_upper = 0.0;
    bool violation = false;
    bool asymptotic_lb_available = true; // biased points outside the strip lack one
    std::optional<bool> in_strip;        // biased points: q <= p <= condition34_max_p
    std::optional<bool> biased_gap_ok;   // in-strip points: c_lb_biased <= c_ub_biased
};

struct AuditReport {
    std::uint64_t master_seed = 0;
    int trials = 0;
    SolveMode mode = SolveMode::Auto; // resolved per point; Auto means mixed
    std::vector<AuditPoint> points;
    int violation_count = 0;
};

inline void to_json(nlohmann::json& j, const AuditPoint& a) {
    j = nlohmann::json{{"n", a.params.n},
                       {"m", a.params.m},
                       {"p", a.params.p},
                       {"q", a.params.q},
                       {"c", a.c},
                       {"trials", a.trials},
                       {"sat_count", a.sat_count},
                       {"p_hat", a.p_hat},
                       {"ci_low", a.ci_low},
                       {"ci_high", a.ci_high},
                       {"prob_lower", a.prob_lower},
                       {"prob_upper", a.prob_upper},
                       {"violation", a.violation},
                       {"asymptotic_lb_available", a.asymptotic_lb_available}};
    if (a.in_strip) j["in_strip"] = *a.in_strip;
    if (a.biased_gap_ok) j["biased_gap_ok"] = *a.biased_gap_ok;
}

inline void to_json(nlohmann::json& j, const AuditReport& r) {
    j = nlohmann::json{{"master_seed", r.master_seed},
                       {"trials", r.trials},
                       {"mode", to_string(r.mode)},
                       {"points", r.points},
                       {"violation_count", r.violation_count}};
}

// Runs `trials` seeded trials at every grid point and checks that the
// empirical 99.7% Wilson interval intersects the analytic sandwich
// [1/(1+delta^2), min(1, E[N])]. Biased points also record whether the
// parameter point sits inside the strip where the asymptotic biased lower
// bound applies, and the ordering of the two biased critical densities.
inline AuditReport bounds_audit(const std::vector<ModelParams>& grid, int trials,
                                std::uint64_t master_seed, SolveMode mode = SolveMode::Auto,
                                int workers = 0,
                                int enumeration_limit = kDefaultEnumerationLimit) {
    if (trials < 1) throw std::invalid_argument("bounds_audit: trials must be >= 1");
    if (grid.empty()) throw std::invalid_argument("bounds_audit: empty grid");
    for (const ModelParams& params : grid) params.validate();

    AuditReport report;
    report.master_seed = master_seed;
    report.trials = trials;
    report.mode = mode;

    const std::size_t total = grid.size() * static_cast<std::size_t>(trials);
    std::vector<std::uint8_t> sat(total, 0);
    detail::parallel_for(total, workers, [&](std::size_t task) {
        const std::size_t point = task / trials;
        const SeedSpec seed{master_seed, static_cast<std::uint64_t>(task)};
        sat[task] = run_trial(grid[point], seed, mode, enumeration_limit).sat ? 1 : 0;
    });

    for (std::size_t i = 0; i < grid.size(); ++i) {
        AuditPoint pt;
        pt.params = grid[i];
        pt.c = grid[i].density();
        pt.trials = trials;
        for (int t = 0; t < trials; ++t) pt.sat_count += sat[i * trials + t];
        pt.p_hat = static_cast<double>(pt.sat_count) / trials;
        const WilsonInterval ci = wilson_interval(pt.sat_count, trials, kWilsonZ997);
        pt.ci_low = ci.low;
        pt.ci_high = ci.high;
        const MomentReport moments = sat_prob_bounds(grid[i]);
        pt.prob_lower = moments.prob_lower;
        pt.prob_upper = moments.prob_upper;
        pt.violation = (pt.ci_high < pt.prob_lower) || (pt.ci_low > pt.prob_upper);
        if (!grid[i].unbiased() && grid[i].p > 0.0 && grid[i].q > 0.0) {
            const CriticalDensities cd = critical_densities(grid[i]);
            const bool in_strip = grid[i].q <= grid[i].p && grid[i].p <= cd.condition34_max_p;
            pt.in_strip = in_strip;
            pt.asymptotic_lb_available = in_strip;
            if (in_strip) pt.biased_gap_ok = cd.c_lb_biased <= cd.c_ub_biased * (1.0 + 1e-12);
        }
        report.violation_count += pt.violation;
        report.points.push_back(pt);
    }
    return report;
}

} // namespace satphase
