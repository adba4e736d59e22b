#include <doctest.h>

#include <cmath>
#include <vector>

#include "brute_force.hpp"
#include "satphase/analytics.hpp"

using namespace satphase;

namespace {

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

TEST_CASE("clause_sat_prob") {
    CHECK(clause_sat_prob(ModelParams{3, 0, 0.5, 0.5}, 0) == doctest::Approx(0.875).epsilon(1e-12));
    CHECK(clause_sat_prob(ModelParams{3, 0, 0.5, 0.5}, 2) == doctest::Approx(0.875).epsilon(1e-12));
    CHECK(clause_sat_prob(ModelParams{4, 0, 0.0, 0.0}, 2) == 0.0);

    const ModelParams biased{2, 0, 0.3, 0.1};
    CHECK(clause_sat_prob(biased, 1) == doctest::Approx(0.37).epsilon(1e-14));
    // brute force over the 9 weighted clauses against the assignment (-1, +1)
    CHECK(oracle::clause_sat_prob(biased, 0b10) == doctest::Approx(0.37).epsilon(1e-14));

    CHECK_THROWS_AS(clause_sat_prob(biased, 3), std::invalid_argument);
    CHECK_THROWS_AS(clause_sat_prob(biased, -1), std::invalid_argument);
}

TEST_CASE("pair_sat_prob reductions and oracle checks") {
    const ModelParams params{5, 0, 0.25, 0.25};
    for (int lambda = 0; lambda <= 5; ++lambda)
        CHECK(pair_sat_prob(params, 0, lambda) == clause_sat_prob(params, lambda));

    const ModelParams zero{4, 0, 0.0, 0.0};
    for (int sigma = 0; sigma <= 4; ++sigma)
        CHECK(pair_sat_prob(zero, sigma, 0) == 0.0);

    // sigma = 1, lambda = 0 at n = 2 against the pair (+1,+1), (-1,+1)
    const ModelParams quarter{2, 0, 0.25, 0.25};
    CHECK(pair_sat_prob(quarter, 1, 0) ==
          doctest::Approx(oracle::pair_sat_prob(quarter, 0b11, 0b10)).epsilon(1e-14));

    // split-resolved probabilities are exact for both mismatch orientations
    const ModelParams biased{2, 0, 0.3, 0.1};
    CHECK(pair_sat_prob_split(biased, 2, 0, 2) ==
          doctest::Approx(oracle::pair_sat_prob(biased, 0b11, 0b00)).epsilon(1e-14));
    CHECK(pair_sat_prob_split(biased, 2, 0, 1) ==
          doctest::Approx(oracle::pair_sat_prob(biased, 0b01, 0b10)).epsilon(1e-14));
    // the aligned orientation is what pair_sat_prob reports
    CHECK(pair_sat_prob(biased, 2, 0) == pair_sat_prob_split(biased, 2, 0, 2));

    CHECK_THROWS_AS(pair_sat_prob(biased, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(pair_sat_prob(biased, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(pair_sat_prob_split(biased, 1, 0, 2), std::invalid_argument);
}

TEST_CASE("log2_expected_solutions") {
    CHECK(log2_expected_solutions(ModelParams{7, 0, 0.3, 0.3}) == 7.0);
    CHECK(log2_expected_solutions(ModelParams{3, 2, 0.5, 0.5}) ==
          doctest::Approx(std::log2(6.125)).epsilon(1e-14));
    CHECK(log2_expected_solutions(ModelParams{2, 1, 0.25, 0.25}) ==
          doctest::Approx(std::log2(1.75)).epsilon(1e-14));
    CHECK(log2_expected_solutions(ModelParams{4, 1, 0.0, 0.0}) == kNegInf);

    // assignment-class route equals the unbiased closed form at p == q
    for (double p : {0.05, 0.2, 0.35, 0.5}) {
        for (int n : {3, 8, 14}) {
            ModelParams params{n, 3 * n, p, p};
            CHECK(close_rel(log2_expected_solutions(params),
                            detail::log2_expected_solutions_classes(params), 1e-9));
        }
    }
}

TEST_CASE("log2_second_moment") {
    CHECK(log2_second_moment(ModelParams{9, 0, 0.2, 0.2}) == 18.0);

    // pair-resolved route reduces to the unbiased route at p == q
    for (double p : {0.1, 0.25, 0.4}) {
        for (int n : {2, 6, 12}) {
            ModelParams params{n, 2 * n, p, p};
            CHECK(close_rel(log2_second_moment(params),
                            detail::log2_second_moment_pairs(params), 1e-9));
        }
    }
}

TEST_CASE("moments match exhaustive enumeration for tiny instances") {
    const std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.5};
    for (int n = 1; n <= 2; ++n) {
        for (int m = 0; m <= 2; ++m) {
            for (double p : grid) {
                for (double q : grid) {
                    CAPTURE(n); CAPTURE(m); CAPTURE(p); CAPTURE(q);
                    const ModelParams params{n, m, p, q};
                    const oracle::Moments mom = oracle::brute_moments(params);
                    CHECK(close_rel(log2_expected_solutions(params), std::log2(mom.e_n), 1e-12));
                    CHECK(close_rel(log2_second_moment(params), std::log2(mom.e_n2), 1e-12));
                    if (m > 0) {
                        const double delta = mom.e_n2 / (mom.e_n * mom.e_n) - 1.0;
                        CHECK(close_rel(relative_variance(params), delta, 1e-9));
                    }
                }
            }
        }
    }
}

TEST_CASE("relative_variance") {
    CHECK(relative_variance(ModelParams{6, 0, 0.3, 0.3}) == 0.0);
    CHECK_THROWS_AS(relative_variance(ModelParams{4, 2, 0.0, 0.0}), std::domain_error);

    // fast unbiased path against the generic two-moment route
    for (int n = 2; n <= 14; n += 3) {
        for (double p : {0.1, 0.25, 0.4}) {
            for (int m : {1, n, 4 * n}) {
                ModelParams params{n, m, p, p};
                CHECK(close_rel(detail::relative_variance_unbiased(params),
                                detail::relative_variance_generic(params), 1e-9));
            }
        }
    }
}

TEST_CASE("sat_prob_bounds") {
    const MomentReport free_report = sat_prob_bounds(ModelParams{5, 0, 0.2, 0.2});
    CHECK(free_report.prob_lower == 1.0);
    CHECK(free_report.prob_upper == 1.0);
    CHECK(free_report.phi_ub == 1.0);

    const MomentReport zero = sat_prob_bounds(ModelParams{5, 1, 0.0, 0.0});
    CHECK(zero.prob_lower == 0.0);
    CHECK(zero.prob_upper == 0.0);

    for (int n : {4, 8, 12}) {
        for (double p : {0.15, 0.3}) {
            for (int m : {1, 2 * n, 6 * n}) {
                const ModelParams params{n, m, p, p};
                const MomentReport r = sat_prob_bounds(params);
                CHECK(r.prob_lower <= r.prob_upper + 1e-15);
                CHECK(r.delta_sq >= 0.0);
                const double recomputed = std::exp2(r.log2_E_N2 - 2 * r.log2_E_N) - 1.0;
                CHECK(close_rel(r.delta_sq, recomputed, 1e-9));
                CHECK(r.log2_E_N2 >= 2 * r.log2_E_N - 1e-12);
            }
        }
    }
}

TEST_CASE("phi_ub changes sign exactly at c_ub") {
    const ModelParams base{10, 0, 0.2, 0.2};
    const double c_ub = critical_densities(base).c_ub;
    for (double eps : {1e-6}) {
        ModelParams lo = base, hi = base;
        lo.m = 1; hi.m = 1; // m unused by the phi formula below; use density directly
        const double phi_lo = 1.0 + c_ub * (1 - eps) * log1mexp(base.log_x()) / kLn2;
        const double phi_hi = 1.0 + c_ub * (1 + eps) * log1mexp(base.log_x()) / kLn2;
        CHECK(phi_lo > 0.0);
        CHECK(phi_hi < 0.0);
    }
}

TEST_CASE("critical_densities") {
    CHECK_THROWS_AS(critical_densities(ModelParams{5, 1, 0.0, 0.2}), std::domain_error);
    CHECK_THROWS_AS(critical_densities(ModelParams{5, 1, 0.2, 0.0}), std::domain_error);

    // unbiased: both biased densities coincide
    const CriticalDensities sym = critical_densities(ModelParams{12, 0, 0.2, 0.2});
    CHECK(sym.c_lb_biased == sym.c_ub_biased);
    CHECK(sym.rel_gap == 0.0);
    CHECK(sym.c_mf == sym.c_ub);

    // at small x the exact c_ub approaches the ln2/x form
    const CriticalDensities small_x = critical_densities(ModelParams{50, 0, 0.2, 0.2});
    CHECK(close_rel(small_x.c_ub, small_x.c_ub_biased, 1e-4));

    // p = q = 1/2 gives full clauses: c_ub equals the K-SAT value at K = n
    const CriticalDensities full = critical_densities(ModelParams{9, 0, 0.5, 0.5});
    CHECK(full.c_ub == doctest::Approx(ksat_reference(9, 9, 0, 0.0).c_cr_K).epsilon(1e-12));
    CHECK(full.trivial_density == 0.0);

    // frozen high-precision values at n = 12, q = 0.15
    const ModelParams probe{12, 0, 0.15, 0.15};
    const double max_p = critical_densities(probe).condition34_max_p;
    CHECK(max_p == doctest::Approx(0.15520981561161833).epsilon(1e-12));
    ModelParams strip{12, 0, max_p, 0.15};
    const CriticalDensities cd = critical_densities(strip);
    CHECK(cd.c_lb_biased == doctest::Approx(4.87302178006966).epsilon(1e-12));
    CHECK(cd.c_ub_biased == doctest::Approx(5.24613124316719).epsilon(1e-11));
    CHECK(cd.c_lb_biased <= cd.c_ub_biased);
    // at p = max_p the relative gap equals y/2 identically
    CHECK(cd.rel_gap == doctest::Approx(0.07112087856808606).epsilon(1e-12));

    // approximation quality: c_cr_approx tracks c_cr at fixed kappa
    ModelParams kappa6{50, 0, 0.06, 0.06};
    const CriticalDensities k6 = critical_densities(kappa6);
    CHECK(std::abs(k6.c_cr_approx / k6.c_cr - 1.0) < 0.02);
}

TEST_CASE("ksat_reference") {
    const KsatReference three = ksat_reference(3, 10, 0, 0.2);
    CHECK(std::abs(three.c_cr_K - 5.19089) < 1e-4);
    CHECK(three.c_cr_K == doctest::Approx(5.190893069684432).epsilon(1e-14));

    const KsatReference ten = ksat_reference(10, 20, 0, 0.2);
    CHECK(std::abs(ten.c_cr_K / ten.c_cr_K_asymptote - 1.0) < 0.001);

    // sigma = n/2 (even n): the K-SAT pair probability factorizes, (1-x)^2
    const int n = 10, k = 3;
    const KsatReference half = ksat_reference(k, n, n / 2, 0.2);
    const double x = std::exp2(-k);
    CHECK(half.pair_prob_ksat == doctest::Approx((1 - x) * (1 - x)).epsilon(1e-14));

    CHECK_THROWS_AS(ksat_reference(0, 10, 0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(ksat_reference(11, 10, 0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(ksat_reference(3, 10, 11, 0.2), std::invalid_argument);
}

TEST_CASE("scaling_prob") {
    CHECK(scaling_u(0.0) == 0.5);
    CHECK(scaling_u(14.0) == doctest::Approx(1.0 / (1 + 16384.0)).epsilon(1e-14));
    CHECK(scaling_u(-40.0) == doctest::Approx(1.0).epsilon(1e-10));

    ModelParams biased{10, 5, 0.3, 0.2};
    CHECK_THROWS_AS(scaling_prob(biased), std::invalid_argument);

    // m = 0 pushes x_tilde to -n and u toward 1
    CHECK(scaling_prob(ModelParams{14, 0, 0.2, 0.2}) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("mean_field_prob") {
    CHECK(mean_field_prob(ModelParams{6, 0, 0.2, 0.2}).prob_mf == 1.0);
    CHECK(mean_field_prob(ModelParams{6, 3, 0.0, 0.0}).prob_mf == 0.0);
    CHECK_THROWS_AS(mean_field_prob(ModelParams{6, 3, 0.3, 0.2}), std::invalid_argument);

    // sandwich psi/(1+psi) <= prob_mf <= min(1, psi) across a grid
    for (int n : {4, 8, 12, 16}) {
        for (double p : {0.1, 0.2, 0.3, 0.4, 0.5}) {
            for (int m : {1, n / 2, n, 3 * n, 10 * n}) {
                const ModelParams params{n, m, p, p};
                const MeanFieldReport r = mean_field_prob(params);
                const double lower = r.psi == std::numeric_limits<double>::infinity()
                                         ? 1.0
                                         : r.psi / (1.0 + r.psi);
                CHECK(r.prob_mf >= lower - 1e-12);
                CHECK(r.prob_mf <= std::min(1.0, r.psi) + 1e-12);
            }
        }
    }
}

TEST_CASE("sample_space_report") {
    const SampleSpaceReport r = sample_space_report(10, 3);
    CHECK(r.log2_v_min == 1024.0);
    CHECK(r.log2_v_ksat == 120.0);

    CHECK(sample_space_report(7, 7).log2_v_ksat == 1.0);

    const SampleSpaceReport big = sample_space_report(20, 3);
    CHECK(big.log2_v_min == 1048576.0);
    CHECK(big.log2_v_ksat == 1140.0);
    CHECK(big.log2_v_min > big.log2_v_ksat);

    CHECK_THROWS_AS(sample_space_report(10, 0), std::invalid_argument);
    CHECK_THROWS_AS(sample_space_report(10, 11), std::invalid_argument);
}

TEST_CASE("log-space paths stay finite at large n") {
    // (1-p)^n underflows linear doubles long before these sizes
    const ModelParams big{2000, 30000, 0.02, 0.02};
    const double log2_en = log2_expected_solutions(big);
    const double log2_en2 = log2_second_moment(big);
    CHECK(std::isfinite(log2_en));
    CHECK(std::isfinite(log2_en2));
    CHECK(log2_en2 >= 2 * log2_en - 1e-9 * std::abs(log2_en2));
    CHECK(std::isfinite(relative_variance(big)));
    const CriticalDensities cd = critical_densities(ModelParams{2000, 0, 0.02, 0.02});
    CHECK(std::isfinite(cd.c_cr));
    CHECK(cd.c_cr > 0.0);

    const ModelParams biased{300, 2000, 0.02, 0.015};
    const double b_en = log2_expected_solutions(biased);
    const double b_en2 = log2_second_moment(biased);
    CHECK(std::isfinite(b_en));
    CHECK(std::isfinite(b_en2));
    CHECK(b_en2 >= 2 * b_en - 1e-9 * std::abs(b_en2));
}

TEST_CASE("report JSON uses the canonical field names") {
    const nlohmann::json moments = sat_prob_bounds(ModelParams{8, 16, 0.2, 0.2});
    for (const char* key :
         {"log2_E_N", "log2_E_N2", "delta_sq", "prob_lower", "prob_upper", "phi_ub"})
        CHECK(moments.contains(key));

    const nlohmann::json critical = critical_densities(ModelParams{8, 16, 0.2, 0.2});
    for (const char* key : {"c_ub", "c_cr", "c_cr_approx", "c_lb_biased", "c_ub_biased",
                            "rel_gap", "c_mf", "condition34_max_p", "trivial_density"})
        CHECK(critical.contains(key));

    const nlohmann::json ksat = ksat_reference(3, 9, 2, 0.2);
    for (const char* key :
         {"c_cr_K", "c_cr_K_asymptote", "pair_prob_ksat", "pair_prob_unrestricted_shape"})
        CHECK(ksat.contains(key));

    const nlohmann::json space = sample_space_report(10, 3);
    CHECK(space.contains("log2_v_min"));
    CHECK(space.contains("log2_v_ksat"));
}

TEST_CASE("moment consistency across a mixed grid") {
    for (int n : {2, 5, 9}) {
        for (double p : {0.1, 0.3, 0.5}) {
            for (double q : {0.1, 0.3, 0.5}) {
                if (p + q > 1.0) continue;
                for (int m : {1, n, 3 * n}) {
                    const ModelParams params{n, m, p, q};
                    CHECK(log2_second_moment(params) >= 2 * log2_expected_solutions(params) - 1e-12);
                }
            }
        }
    }
}
