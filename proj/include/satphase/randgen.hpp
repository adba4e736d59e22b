#pragma once

#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "satphase/core.hpp"
#include "satphase/model.hpp"
#include "satphase/rng.hpp"

// Instance generation and serialization. Clause sampling walks the variable
// slots in ascending order and spends exactly one uniform draw per slot, so a
// (params, seed) pair maps to one formula, bit-for-bit, on every platform.

namespace satphase {

class parse_error : public std::runtime_error {
  public:
    parse_error(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    int line() const { return line_; }

  private:
    int line_;
};

inline Clause sample_clause(const ModelParams& params, Xoshiro256pp& rng) {
    const double threshold_pos = params.p;
    const double threshold_neg = params.p + params.q;
    Clause c;
    for (int s = 0; s < params.n; ++s) {
        const double u = rng.next_double();
        if (u < threshold_pos) {
            c.pos |= 1ULL << s;
        } else if (u < threshold_neg) {
            c.neg |= 1ULL << s;
        }
    }
    return c;
}

inline Formula generate_formula(const ModelParams& params, SeedSpec seed) {
    params.validate();
    Xoshiro256pp rng = derive_stream(seed);
    Formula f(params.n);
    for (int j = 0; j < params.m; ++j) f.add_clause(sample_clause(params, rng));
    return f;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace detail

// Standard DIMACS CNF with metadata comments. One clause per line, variables
// in ascending index order, "0" terminator; the empty clause is a bare "0".
inline std::string encode_dimacs(const Formula& f, const ModelParams& params, SeedSpec seed = {}) {
    std::string out;
    out += "c satphase CNF instance\n";
    out += "c n=" + std::to_string(params.n) + " m=" + std::to_string(params.m) +
           " p=" + detail::format_double(params.p) + " q=" + detail::format_double(params.q) +
           " master_seed=" + std::to_string(seed.master_seed) +
           " stream_index=" + std::to_string(seed.stream_index) + "\n";
    out += "p cnf " + std::to_string(f.num_variables()) + " " + std::to_string(f.num_clauses()) + "\n";
    for (const Clause& c : f.clauses()) {
        for (int s = 0; s < f.num_variables(); ++s) {
            const std::uint64_t bit = 1ULL << s;
            if (c.pos & bit) out += std::to_string(s + 1) + " ";
            else if (c.neg & bit) out += "-" + std::to_string(s + 1) + " ";
        }
        out += "0\n";
    }
    return out;
}

inline Formula decode_dimacs(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    int n = -1, m = -1;
    std::vector<Clause> clauses;
    Clause current;
    bool in_clause = false;
    int clause_start_line = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == 'c') continue;
        if (line[0] == 'p') {
            if (n >= 0) throw parse_error(lineno, "duplicate problem line");
            std::istringstream ls(line);
            std::string tag, fmt;
            if (!(ls >> tag >> fmt >> n >> m) || fmt != "cnf" || n < 1 || m < 0)
                throw parse_error(lineno, "malformed header, expected 'p cnf <n> <m>'");
            if (n > kMaxVariables)
                throw parse_error(lineno, "variable count exceeds supported maximum of 64");
            continue;
        }
        if (n < 0) throw parse_error(lineno, "clause data before 'p cnf' header");
        std::istringstream ls(line);
        long long lit;
        while (ls >> lit) {
            if (lit == 0) {
                clauses.push_back(current);
                current = Clause{};
                in_clause = false;
                continue;
            }
            if (!in_clause) {
                in_clause = true;
                clause_start_line = lineno;
            }
            const long long var = lit > 0 ? lit : -lit;
            if (var > n) throw parse_error(lineno, "variable index out of range");
            const std::uint64_t bit = 1ULL << (var - 1);
            if ((lit > 0 && (current.neg & bit)) || (lit < 0 && (current.pos & bit)))
                throw parse_error(lineno, "variable occurs with both polarities in one clause");
            if (lit > 0) current.pos |= bit;
            else current.neg |= bit;
        }
        if (!ls.eof()) throw parse_error(lineno, "unexpected token in clause data");
    }
    if (n < 0) throw parse_error(lineno, "missing 'p cnf' header");
    if (in_clause) throw parse_error(clause_start_line, "missing clause terminator 0");
    if (static_cast<int>(clauses.size()) != m)
        throw parse_error(lineno, "clause count does not match header");
    return Formula(n, std::move(clauses));
}

// JSON instance format:
// {"n", "m", "p", "q", "master_seed", "stream_index", "clauses": [[signed ints]]}
inline nlohmann::json encode_instance_json(const Formula& f, const ModelParams& params, SeedSpec seed = {}) {
    nlohmann::json clauses = nlohmann::json::array();
    for (const Clause& c : f.clauses()) {
        nlohmann::json lits = nlohmann::json::array();
        for (int s = 0; s < f.num_variables(); ++s) {
            const std::uint64_t bit = 1ULL << s;
            if (c.pos & bit) lits.push_back(s + 1);
            else if (c.neg & bit) lits.push_back(-(s + 1));
        }
        clauses.push_back(std::move(lits));
    }
    return nlohmann::json{{"n", params.n},
                          {"m", params.m},
                          {"p", params.p},
                          {"q", params.q},
                          {"master_seed", seed.master_seed},
                          {"stream_index", seed.stream_index},
                          {"clauses", std::move(clauses)}};
}

struct DecodedInstance {
    Formula formula;
    ModelParams params;
    SeedSpec seed;
};

inline DecodedInstance decode_instance_json(const nlohmann::json& j) {
    ModelParams params{j.at("n").get<int>(), j.at("m").get<int>(),
                       j.at("p").get<double>(), j.at("q").get<double>()};
    params.validate();
    SeedSpec seed{j.at("master_seed").get<std::uint64_t>(), j.at("stream_index").get<std::uint64_t>()};
    Formula f(params.n);
    const auto& clauses = j.at("clauses");
    if (static_cast<int>(clauses.size()) != params.m)
        throw std::invalid_argument("instance JSON: clause count does not match m");
    for (const auto& lits : clauses) {
        Clause c;
        for (const auto& l : lits) {
            const long long lit = l.get<long long>();
            const long long var = lit > 0 ? lit : -lit;
            if (lit == 0 || var > params.n)
                throw std::invalid_argument("instance JSON: literal out of range");
            const std::uint64_t bit = 1ULL << (var - 1);
            if (lit > 0) c.pos |= bit;
            else c.neg |= bit;
        }
        f.add_clause(c);
    }
    return DecodedInstance{std::move(f), params, seed};
}

} // namespace satphase
