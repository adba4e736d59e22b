#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "satphase/logspace.hpp"
#include "satphase/model.hpp"

// Closed-form moment analytics for the unrestricted random CNF model, all in
// natural-log space. Conventions used throughout:
//
//   x = (1-p)^n          y = (1-q)^n
//   alpha = (1-p)/(1-q)  beta = (1-p-q)/(1-q)   kappa = (p+q)n   c = m/n
//
// A clause misses (fails to satisfy) a fixed assignment with probability
// (1-p)^lambda (1-q)^(n-lambda), where lambda classifies the assignment by
// its count of false variables; in the unbiased model p == q this is x for
// every assignment.

namespace satphase {

struct MomentReport {
    double log2_E_N = 0.0;    // log2 of the mean solution count
    double log2_E_N2 = 0.0;   // log2 of the mean squared solution count
    double delta_sq = 0.0;    // relative variance E[N^2]/E[N]^2 - 1
    double prob_lower = 0.0;  // 1/(1 + delta_sq)
    double prob_upper = 0.0;  // min(1, E[N])
    double phi_ub = 0.0;      // 1 + c*ln(1-x)/ln 2; prob(SAT) <= 2^(n*phi_ub)
};

inline void to_json(nlohmann::json& j, const MomentReport& r) {
    j = nlohmann::json{{"log2_E_N", r.log2_E_N},   {"log2_E_N2", r.log2_E_N2},
                       {"delta_sq", r.delta_sq},   {"prob_lower", r.prob_lower},
                       {"prob_upper", r.prob_upper}, {"phi_ub", r.phi_ub}};
}

struct CriticalDensities {
    double c_ub = 0.0;                // -ln2 / ln(1-x)
    double c_cr = 0.0;                // ln2 (1-x)^2 / x, the matching-threshold density
    double c_cr_approx = 0.0;         // ln2 exp(kappa/2)
    double c_lb_biased = 0.0;         // ln2 / y
    double c_ub_biased = 0.0;         // ln2 / x
    double rel_gap = 0.0;             // (c_ub_biased - c_lb_biased)/c_ub_biased = 1 - x/y
    double c_mf = 0.0;                // mean-field critical density, equals c_ub
    double condition34_max_p = 0.0;   // largest p with a usable biased lower bound
    double trivial_density = 0.0;     // ((1-p-q)/(1-p))^n
};

inline void to_json(nlohmann::json& j, const CriticalDensities& d) {
    j = nlohmann::json{{"c_ub", d.c_ub},
                       {"c_cr", d.c_cr},
                       {"c_cr_approx", d.c_cr_approx},
                       {"c_lb_biased", d.c_lb_biased},
                       {"c_ub_biased", d.c_ub_biased},
                       {"rel_gap", d.rel_gap},
                       {"c_mf", d.c_mf},
                       {"condition34_max_p", d.condition34_max_p},
                       {"trivial_density", d.trivial_density}};
}

namespace detail {

// ln of the miss probability for an assignment with `lambda` false variables.
inline double log_clause_miss(const ModelParams& params, int lambda) {
    return lambda * std::log1p(-params.p) + (params.n - lambda) * std::log1p(-params.q);
}

inline double log_prob_from_log_miss(double log_miss) {
    return log1mexp(std::min(log_miss, 0.0));
}

// ln of the probability that one clause misses at least one member of an
// assignment pair with sigma mismatched positions, lambda matched positions
// of the (1-p) kind, and j of the mismatches oriented toward the first
// member. By inclusion-exclusion over the two miss events:
//   miss-or = A * (B_j + B_{sigma-j} - D)
//   A = (1-p)^lambda (1-q)^(n-sigma-lambda)
//   B_j = (1-p)^j (1-q)^(sigma-j)       D = (1-p-q)^sigma
// The bracket lies in [1, 2] of its largest term, so no cancellation occurs.
inline double log_pair_miss_split(const ModelParams& params, int sigma, int lambda, int j) {
    const double l1p = std::log1p(-params.p);
    const double l1q = std::log1p(-params.q);
    const double log_a = lambda * l1p + (params.n - sigma - lambda) * l1q;
    const double b1 = j * l1p + (sigma - j) * l1q;
    const double b2 = (sigma - j) * l1p + j * l1q;
    const double d = sigma * std::log1p(-(params.p + params.q));
    const double bmax = std::max(b1, b2);
    const double bracket = std::exp(b1 - bmax) + std::exp(b2 - bmax) - std::exp(d - bmax);
    return std::min(log_a + bmax + std::log(bracket), 0.0);
}

inline double log_pair_sat_split(const ModelParams& params, int sigma, int lambda, int j) {
    return log_prob_from_log_miss(log_pair_miss_split(params, sigma, lambda, j));
}

// Unbiased pair-satisfaction probability, ln(1 - 2x + x beta^sigma), written
// via the miss-or form x*(2 - beta^sigma) which is a plain union probability.
inline double log_pair_sat_unbiased(const ModelParams& params, int sigma) {
    const double beta = params.beta();
    const double bsig = sigma == 0 ? 1.0 : (beta > 0.0 ? std::exp(sigma * std::log(beta)) : 0.0);
    const double log_miss = params.log_x() + std::log(2.0 - bsig);
    return log_prob_from_log_miss(log_miss);
}

} // namespace detail

// P(n, lambda) = 1 - (1-p)^lambda (1-q)^(n-lambda): probability that a random
// clause satisfies an assignment with `lambda` false variables. Independent
// of lambda in the unbiased model: 1 - (1-p)^n.
inline double clause_sat_prob(const ModelParams& params, int lambda) {
    params.validate();
    if (lambda < 0 || lambda > params.n)
        throw std::invalid_argument("clause_sat_prob: lambda out of range");
    return -std::expm1(detail::log_clause_miss(params, lambda));
}

// P(n, lambda, sigma) = 1 - (1-p)^lambda (1-q)^(n-lambda-sigma) *
//   {(1-p)^sigma + (1-q)^sigma - (1-p-q)^sigma}:
// probability that one clause satisfies both members of an assignment pair
// with sigma mismatches whose mismatched digits are aligned one way. With
// p == q this is the pair probability of every sigma-mismatch pair,
// 1 - 2x + (1-2p)^sigma (1-p)^(n-sigma); sigma = 0 reduces to clause_sat_prob.
inline double pair_sat_prob(const ModelParams& params, int sigma, int lambda) {
    params.validate();
    if (sigma < 0 || sigma > params.n)
        throw std::invalid_argument("pair_sat_prob: sigma out of range");
    if (lambda < 0 || lambda > params.n - sigma)
        throw std::invalid_argument("pair_sat_prob: lambda out of range");
    return -std::expm1(detail::log_pair_miss_split(params, sigma, lambda, sigma));
}

// Exact pair-satisfaction probability resolved by the mismatch split j:
// j mismatched digits take the (1-p) orientation on the first member,
// sigma-j on the second. pair_sat_prob is the j == sigma case.
inline double pair_sat_prob_split(const ModelParams& params, int sigma, int lambda, int j) {
    params.validate();
    if (sigma < 0 || sigma > params.n)
        throw std::invalid_argument("pair_sat_prob_split: sigma out of range");
    if (lambda < 0 || lambda > params.n - sigma)
        throw std::invalid_argument("pair_sat_prob_split: lambda out of range");
    if (j < 0 || j > sigma)
        throw std::invalid_argument("pair_sat_prob_split: j out of range");
    return -std::expm1(detail::log_pair_miss_split(params, sigma, lambda, j));
}

namespace detail {

// Assignment-class route: log2 sum_lambda C(n,lambda) P(n,lambda)^m. Valid
// for any (p, q); reduces to n + m log2(1-x) at p == q.
inline double log2_expected_solutions_classes(const ModelParams& params) {
    LogSumExp acc;
    for (int lambda = 0; lambda <= params.n; ++lambda) {
        const double log_p = log_prob_from_log_miss(log_clause_miss(params, lambda));
        acc.add(log_binomial(params.n, lambda) + params.m * log_p);
    }
    return acc.value() / kLn2;
}

// Ordered-pair route: diagonal terms plus the sum over assignment pairs
// resolved by (sigma, lambda, j), so every pair carries its exact
// joint-satisfaction probability. Valid for any (p, q); O(n^3) terms.
inline double log2_second_moment_pairs(const ModelParams& params) {
    LogSumExp acc;
    for (int lambda = 0; lambda <= params.n; ++lambda) {
        const double log_p = log_prob_from_log_miss(log_clause_miss(params, lambda));
        acc.add(log_binomial(params.n, lambda) + params.m * log_p);
    }
    for (int sigma = 1; sigma <= params.n; ++sigma) {
        for (int lambda = 0; lambda + sigma <= params.n; ++lambda) {
            const double log_w = log_binomial(params.n, sigma) +
                                 log_binomial(params.n - sigma, lambda);
            for (int j = 0; j <= sigma; ++j) {
                acc.add(log_w + log_binomial(sigma, j) +
                        params.m * log_pair_sat_split(params, sigma, lambda, j));
            }
        }
    }
    return acc.value() / kLn2;
}

// Unbiased route: log2 sum_sigma C(n,sigma) 2^n P2(sigma)^m.
inline double log2_second_moment_unbiased(const ModelParams& params) {
    LogSumExp acc;
    for (int sigma = 0; sigma <= params.n; ++sigma) {
        acc.add(log_binomial(params.n, sigma) +
                params.m * log_pair_sat_unbiased(params, sigma));
    }
    return params.n + acc.value() / kLn2;
}

} // namespace detail

// log2 E[N]. Unbiased: n + m log2(1-x); biased: log-sum-exp over assignment
// classes. Returns -inf when the mean is zero (p = q = 0 with m >= 1).
inline double log2_expected_solutions(const ModelParams& params) {
    params.validate();
    if (params.m == 0) return params.n;
    if (params.unbiased()) {
        const double log_p1 = log1mexp(params.log_x());
        return params.n + params.m * log_p1 / kLn2;
    }
    return detail::log2_expected_solutions_classes(params);
}

// log2 E[N^2]. Unbiased: the O(n)-term sigma sum with
// P2(sigma) = 1 - 2x + (1-2p)^sigma (1-p)^(n-sigma); biased: the exact
// ordered-pair sum.
inline double log2_second_moment(const ModelParams& params) {
    params.validate();
    if (params.m == 0) return 2.0 * params.n;
    if (params.unbiased()) return detail::log2_second_moment_unbiased(params);
    return detail::log2_second_moment_pairs(params);
}

namespace detail {

// delta^2 from the two log moments.
inline double relative_variance_generic(const ModelParams& params) {
    const double log2_en = log2_expected_solutions(params);
    if (log2_en == kNegInf)
        throw std::domain_error("relative_variance: undefined, E[N] = 0");
    const double log2_en2 = log2_second_moment(params);
    return std::max(0.0, std::expm1(kLn2 * (log2_en2 - 2.0 * log2_en)));
}

// Unbiased fast path: 2^-n sum_sigma C(n,sigma) [P2(sigma)/(1-x)^2]^m - 1,
// accumulated in log space.
inline double relative_variance_unbiased(const ModelParams& params) {
    const double log_p1 = log1mexp(params.log_x());
    if (log_p1 == kNegInf)
        throw std::domain_error("relative_variance: undefined, E[N] = 0");
    LogSumExp acc;
    for (int sigma = 0; sigma <= params.n; ++sigma) {
        acc.add(log_binomial(params.n, sigma) +
                params.m * (log_pair_sat_unbiased(params, sigma) - 2.0 * log_p1));
    }
    return std::max(0.0, std::expm1(acc.value() - params.n * kLn2));
}

} // namespace detail

// Relative variance of the solution count, E[N^2]/E[N]^2 - 1.
inline double relative_variance(const ModelParams& params) {
    params.validate();
    if (params.m == 0) return 0.0;
    if (params.unbiased()) return detail::relative_variance_unbiased(params);
    return detail::relative_variance_generic(params);
}

// Second-moment sandwich: 1/(1 + delta^2) <= prob(SAT) <= min(1, E[N]).
inline MomentReport sat_prob_bounds(const ModelParams& params) {
    params.validate();
    MomentReport r;
    r.log2_E_N = log2_expected_solutions(params);
    r.log2_E_N2 = log2_second_moment(params);
    if (r.log2_E_N == kNegInf) {
        r.delta_sq = std::numeric_limits<double>::infinity();
        r.prob_lower = 0.0;
    } else {
        r.delta_sq = relative_variance(params);
        r.prob_lower = 1.0 / (1.0 + r.delta_sq);
    }
    r.prob_upper = std::min(1.0, std::exp2(r.log2_E_N));
    if (params.m == 0) {
        r.phi_ub = 1.0;
    } else {
        const double pmax = std::max(params.p, params.q);
        const double log_1mx = log1mexp(params.n * std::log1p(-pmax));
        r.phi_ub = 1.0 + params.density() * log_1mx / kLn2;
    }
    return r;
}

// All critical-density expressions at one parameter point. Requires p, q > 0;
// at p = q = 0 no clause is ever satisfied and the densities are meaningless.
inline CriticalDensities critical_densities(const ModelParams& params) {
    params.validate();
    if (!(params.p > 0.0) || !(params.q > 0.0))
        throw std::domain_error("critical_densities: p and q must be positive");
    const double lx = params.log_x();
    const double ly = params.log_y();
    CriticalDensities d;
    d.c_ub = -kLn2 / log1mexp(lx);
    d.c_cr = kLn2 * std::exp(2.0 * log1mexp(lx) - lx);
    d.c_cr_approx = kLn2 * std::exp(params.mean_clause_len() / 2.0);
    d.c_lb_biased = kLn2 * std::exp(-ly);
    d.c_ub_biased = kLn2 * std::exp(-lx);
    d.rel_gap = -std::expm1(lx - ly);
    d.c_mf = d.c_ub;
    d.condition34_max_p = -std::expm1(std::log1p(-params.q) + std::log1p(-std::exp(ly) / 2.0) / params.n);
    d.trivial_density = std::exp(params.n * (std::log1p(-(params.p + params.q)) - std::log1p(-params.p)));
    return d;
}

struct KsatReference {
    double c_cr_K = 0.0;                      // -ln2 / ln(1 - 2^-K)
    double c_cr_K_asymptote = 0.0;            // 2^K ln2
    double pair_prob_ksat = 0.0;              // 1 - 2x + x ((n-sigma)/n)^K, x = 2^-K
    double pair_prob_unrestricted_shape = 0.0; // 1 - 2x' + x' beta^sigma, x' = (1-p)^n
};

inline void to_json(nlohmann::json& j, const KsatReference& r) {
    j = nlohmann::json{{"c_cr_K", r.c_cr_K},
                       {"c_cr_K_asymptote", r.c_cr_K_asymptote},
                       {"pair_prob_ksat", r.pair_prob_ksat},
                       {"pair_prob_unrestricted_shape", r.pair_prob_unrestricted_shape}};
}

// Fixed-clause-length (K-SAT) reference values, plus the matching pair
// correlation profiles for comparing the two models as functions of the
// Hamming distance sigma.
inline KsatReference ksat_reference(int k, int n, int sigma, double p) {
    if (k < 1 || k > n) throw std::invalid_argument("ksat_reference: K out of range");
    if (sigma < 0 || sigma > n) throw std::invalid_argument("ksat_reference: sigma out of range");
    if (!(p >= 0.0) || !(2.0 * p <= 1.0))
        throw std::invalid_argument("ksat_reference: p out of range");
    KsatReference r;
    const double x = std::exp2(-k);
    r.c_cr_K = -kLn2 / std::log1p(-x);
    r.c_cr_K_asymptote = std::exp2(k) * kLn2;
    r.pair_prob_ksat = 1.0 - 2.0 * x + x * std::pow((n - sigma) / static_cast<double>(n), k);
    const double xp = std::exp(n * std::log1p(-p));
    const double beta = (1.0 - 2.0 * p) / (1.0 - p);
    const double bsig = sigma == 0 ? 1.0 : std::pow(beta, sigma);
    r.pair_prob_unrestricted_shape = 1.0 - 2.0 * xp + xp * bsig;
    return r;
}

// The transition profile u(x) = (1 + 2^x)^-1.
inline double scaling_u(double x) {
    return 1.0 / (1.0 + std::exp2(x));
}

// Scaling approximation to prob(SAT) at the given parameter point:
// u(-n (1 - c/c_cr)). Defined for the unbiased model only.
inline double scaling_prob(const ModelParams& params) {
    params.validate();
    if (!params.unbiased())
        throw std::invalid_argument("scaling_prob: defined for the unbiased model (p == q) only");
    const double c_cr = critical_densities(params).c_cr;
    const double xt = -params.n * (1.0 - params.density() / c_cr);
    return scaling_u(xt);
}

struct MeanFieldReport {
    double prob_mf = 0.0;   // 1 - (1 - s)^t, s = (1-x)^m, t = 2^n
    double psi = 0.0;       // t * s
    double log2_psi = 0.0;
    double c_mf = 0.0;
};

inline void to_json(nlohmann::json& j, const MeanFieldReport& r) {
    j = nlohmann::json{{"prob_mf", r.prob_mf},
                       {"psi", r.psi},
                       {"log2_psi", r.log2_psi},
                       {"c_mf", r.c_mf}};
}

// Mean-field approximation: treat the satisfaction events of the 2^n
// assignments as independent. Satisfies psi/(1+psi) <= prob_mf <= min(1, psi).
inline MeanFieldReport mean_field_prob(const ModelParams& params) {
    params.validate();
    if (!params.unbiased())
        throw std::invalid_argument("mean_field_prob: defined for the unbiased model (p == q) only");
    MeanFieldReport r;
    const double lx = params.log_x();
    r.c_mf = -kLn2 / log1mexp(lx);
    const double log_s = params.m == 0 ? 0.0 : params.m * log1mexp(lx);
    r.log2_psi = params.n + log_s / kLn2;
    r.psi = std::exp2(r.log2_psi);
    const double log_1ms = log1mexp(std::min(log_s, 0.0));
    if (log_1ms == kNegInf) {
        r.prob_mf = 1.0; // s = 1
    } else if (log_1ms == 0.0) {
        r.prob_mf = 0.0; // s = 0
    } else {
        r.prob_mf = -std::expm1(std::exp2(params.n) * log_1ms);
    }
    return r;
}

struct SampleSpaceReport {
    double log2_v_min = 0.0;   // 2^n: log2 of the count of formula sets needed to cover all solution sets
    double log2_v_ksat = 0.0;  // C(n,K): log2 of the count of logically inequivalent K-SAT formulae
};

inline void to_json(nlohmann::json& j, const SampleSpaceReport& r) {
    j = nlohmann::json{{"log2_v_min", r.log2_v_min}, {"log2_v_ksat", r.log2_v_ksat}};
}

inline SampleSpaceReport sample_space_report(int n, int k) {
    if (n < 1) throw std::invalid_argument("sample_space_report: n must be >= 1");
    if (k < 1 || k > n) throw std::invalid_argument("sample_space_report: K out of range");
    return SampleSpaceReport{std::exp2(n), binomial(n, k)};
}

} // namespace satphase
