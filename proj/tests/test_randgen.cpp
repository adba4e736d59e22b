#include <doctest.h>

#include <bit>
#include <cmath>
#include <string>

#include "satphase/analytics.hpp"
#include "satphase/core.hpp"
#include "satphase/randgen.hpp"

using namespace satphase;

TEST_CASE("sample_clause degenerate parameter points") {
    Xoshiro256pp rng = derive_stream(SeedSpec{1, 0});
    ModelParams empty{6, 0, 0.0, 0.0};
    ModelParams full{6, 0, 0.5, 0.5};
    for (int i = 0; i < 200; ++i) {
        CHECK(sample_clause(empty, rng).empty());
        const Clause c = sample_clause(full, rng);
        CHECK((c.pos | c.neg) == variable_mask(6));
        CHECK((c.pos & c.neg) == 0);
    }
}

TEST_CASE("slot frequencies match the model") {
    const ModelParams params{10, 0, 0.25, 0.25};
    Xoshiro256pp rng = derive_stream(SeedSpec{2, 0});
    const int draws = 100000;
    long pos_total = 0;
    long len_total = 0;
    for (int i = 0; i < draws; ++i) {
        const Clause c = sample_clause(params, rng);
        pos_total += std::popcount(c.pos);
        len_total += c.size();
    }
    const double slots = static_cast<double>(draws) * params.n;
    const double pos_freq = pos_total / slots;
    const double se_slot = std::sqrt(0.25 * 0.75 / slots);
    CHECK(std::abs(pos_freq - 0.25) < 3 * se_slot);

    const double mean_len = static_cast<double>(len_total) / draws;
    const double se_len = std::sqrt(10 * 0.5 * 0.5 / draws);
    CHECK(std::abs(mean_len - 5.0) < 3 * se_len);
}

TEST_CASE("single-slot outcome frequencies match (p, q, 1-p-q)") {
    const ModelParams params{1, 0, 0.3, 0.2};
    Xoshiro256pp rng = derive_stream(SeedSpec{3, 0});
    const int draws = 100000;
    int npos = 0, nneg = 0, nabs = 0;
    for (int i = 0; i < draws; ++i) {
        const Clause c = sample_clause(params, rng);
        if (c.pos) ++npos;
        else if (c.neg) ++nneg;
        else ++nabs;
    }
    auto check_freq = [&](int count, double prob) {
        const double se = std::sqrt(prob * (1 - prob) / draws);
        CHECK(std::abs(static_cast<double>(count) / draws - prob) < 3 * se);
    };
    check_freq(npos, 0.3);
    check_freq(nneg, 0.2);
    check_freq(nabs, 0.5);
}

TEST_CASE("empty-clause frequency matches (1-p-q)^n") {
    const ModelParams params{5, 0, 0.1, 0.1};
    Xoshiro256pp rng = derive_stream(SeedSpec{4, 0});
    const int draws = 100000;
    int empties = 0;
    for (int i = 0; i < draws; ++i) empties += sample_clause(params, rng).empty();
    const double prob = std::pow(0.8, 5);
    const double se = std::sqrt(prob * (1 - prob) / draws);
    CHECK(std::abs(static_cast<double>(empties) / draws - prob) < 3 * se);
}

TEST_CASE("unbiased clause statistics are polarity symmetric") {
    const ModelParams params{12, 0, 0.2, 0.2};
    Xoshiro256pp rng = derive_stream(SeedSpec{5, 0});
    long more_pos = 0, more_neg = 0;
    for (int i = 0; i < 10000; ++i) {
        const Clause c = sample_clause(params, rng);
        const int np = std::popcount(c.pos), nn = std::popcount(c.neg);
        more_pos += np > nn;
        more_neg += nn > np;
    }
    const double diff = static_cast<double>(more_pos - more_neg);
    CHECK(std::abs(diff) < 3 * std::sqrt(static_cast<double>(more_pos + more_neg)));
}

TEST_CASE("generate_formula determinism and shape") {
    const ModelParams params{8, 20, 0.2, 0.3};
    const Formula a = generate_formula(params, SeedSpec{99, 5});
    const Formula b = generate_formula(params, SeedSpec{99, 5});
    CHECK(a == b);
    CHECK(a.num_clauses() == 20);
    CHECK(encode_dimacs(a, params, SeedSpec{99, 5}) == encode_dimacs(b, params, SeedSpec{99, 5}));

    const Formula c = generate_formula(params, SeedSpec{99, 6});
    CHECK_FALSE(a == c);

    CHECK(generate_formula(ModelParams{8, 0, 0.2, 0.3}, SeedSpec{}).num_clauses() == 0);
}

TEST_CASE("mean solution count matches the analytic mean") {
    const ModelParams params{12, 121, 0.2, 0.2};
    const double expected = std::exp2(log2_expected_solutions(params));
    const int trials = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Formula f = generate_formula(params, SeedSpec{2024, static_cast<std::uint64_t>(t)});
        const double count = static_cast<double>(count_solutions(f));
        sum += count;
        sum_sq += count * count;
    }
    const double mean = sum / trials;
    const double var = (sum_sq - sum * sum / trials) / (trials - 1);
    const double se = std::sqrt(var / trials);
    CHECK(std::abs(mean - expected) < 3 * se);
}

TEST_CASE("dimacs format fixed points") {
    Formula f(2, {Clause{0b01, 0b10}});
    const std::string text = encode_dimacs(f, ModelParams{2, 1, 0.5, 0.5}, SeedSpec{1, 0});
    CHECK(text.find("p cnf 2 1\n") != std::string::npos);
    CHECK(text.find("1 -2 0\n") != std::string::npos);

    Formula g(3, {Clause{}});
    const std::string empty_line = encode_dimacs(g, ModelParams{3, 1, 0.0, 0.0});
    CHECK(empty_line.find("\n0\n") != std::string::npos);
}

TEST_CASE("dimacs round trip over random formulas") {
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 1 + rep % 16;
        ModelParams params{n, 1 + rep % 12, 0.25, 0.2};
        const SeedSpec seed{7000, static_cast<std::uint64_t>(rep)};
        const Formula f = generate_formula(params, seed);
        const Formula g = decode_dimacs(encode_dimacs(f, params, seed));
        CHECK(f == g);
    }
}

TEST_CASE("dimacs parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(decode_dimacs("p dnf 2 1\n1 0\n"),
                         "line 1: malformed header, expected 'p cnf <n> <m>'", parse_error);
    CHECK_THROWS_WITH_AS(decode_dimacs("p cnf 2 1\n3 0\n"),
                         "line 2: variable index out of range", parse_error);
    CHECK_THROWS_WITH_AS(decode_dimacs("c hi\np cnf 2 1\n1 -2\n"),
                         "line 3: missing clause terminator 0", parse_error);
    CHECK_THROWS_WITH_AS(decode_dimacs("p cnf 2 2\n1 0\n"),
                         "line 2: clause count does not match header", parse_error);
    CHECK_THROWS_WITH_AS(decode_dimacs("p cnf 2 1\n1 -1 0\n"),
                         "line 2: variable occurs with both polarities in one clause", parse_error);
    CHECK_THROWS_AS(decode_dimacs("1 0\n"), parse_error);
    CHECK_THROWS_AS(decode_dimacs("p cnf 2 1\n1 x 0\n"), parse_error);

    try {
        decode_dimacs("p cnf 2 1\n\n3 0\n");
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("json instance round trip") {
    ModelParams params{6, 9, 0.3, 0.1};
    const SeedSpec seed{11, 22};
    const Formula f = generate_formula(params, seed);
    const nlohmann::json j = encode_instance_json(f, params, seed);
    CHECK(j.at("n") == 6);
    CHECK(j.at("m") == 9);
    CHECK(j.at("master_seed") == 11);
    const DecodedInstance back = decode_instance_json(j);
    CHECK(back.formula == f);
    CHECK(back.params.p == params.p);
    CHECK(back.seed == seed);

    nlohmann::json bad = j;
    bad["clauses"][0] = nlohmann::json::array({99});
    CHECK_THROWS_AS(decode_instance_json(bad), std::invalid_argument);
}
