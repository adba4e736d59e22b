#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

// Bit-mask CNF representation. Variable a_s lives at bit (s-1); an
// Assignment bit of 1 means the variable is true. A Clause keeps one mask
// per polarity; pos and neg never overlap. The all-zero clause is the
// trivial (empty) clause, unsatisfiable by definition.

namespace satphase {

class capacity_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxVariables = 64;          // one machine word
inline constexpr int kDefaultEnumerationLimit = 30;

constexpr std::uint64_t variable_mask(int n) {
    return n >= 64 ? ~0ULL : ((1ULL << n) - 1);
}

struct Assignment {
    std::uint64_t bits = 0;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

// Number of false variables under the assignment (its count of -1 digits).
constexpr int false_count(Assignment a, int n) {
    return n - std::popcount(a.bits & variable_mask(n));
}

struct Clause {
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;

    bool empty() const { return pos == 0 && neg == 0; }
    int size() const { return std::popcount(pos) + std::popcount(neg); }

    bool satisfied_by(std::uint64_t bits) const {
        return ((pos & bits) | (neg & ~bits)) != 0;
    }

    friend bool operator==(const Clause&, const Clause&) = default;
};

class Formula {
  public:
    Formula(int n, std::vector<Clause> clauses = {}) : n_(n) {
        if (n < 1 || n > kMaxVariables)
            throw capacity_error("Formula: variable count must be in [1, 64]");
        clauses_.reserve(clauses.size());
        for (const Clause& c : clauses) add_clause(c);
    }

    void add_clause(Clause c) {
        const std::uint64_t mask = variable_mask(n_);
        if ((c.pos | c.neg) & ~mask)
            throw std::invalid_argument("Formula: clause mask exceeds variable count");
        if (c.pos & c.neg)
            throw std::invalid_argument("Formula: variable occurs with both polarities in one clause");
        clauses_.push_back(c);
    }

    int num_variables() const { return n_; }
    int num_clauses() const { return static_cast<int>(clauses_.size()); }
    const std::vector<Clause>& clauses() const { return clauses_; }
    std::uint64_t mask() const { return variable_mask(n_); }

    friend bool operator==(const Formula& a, const Formula& b) {
        return a.n_ == b.n_ && a.clauses_ == b.clauses_;
    }

  private:
    int n_;
    std::vector<Clause> clauses_;
};

// True iff every clause has a satisfied literal under the assignment.
inline bool evaluate(const Formula& f, Assignment a) {
    if (a.bits & ~f.mask())
        throw std::invalid_argument("evaluate: assignment wider than formula");
    for (const Clause& c : f.clauses()) {
        if ((c.pos & a.bits) == 0 && (c.neg & ~a.bits & f.mask()) == 0) return false;
    }
    return true;
}

namespace detail {

// Plain enumeration of all 2^n assignments with early clause exit.
inline std::uint64_t count_by_scan(const Formula& f) {
    const int n = f.num_variables();
    const std::uint64_t mask = f.mask();
    const std::uint64_t total = n == 64 ? 0 : (1ULL << n); // n <= 63 when called
    std::uint64_t count = 0;
    for (std::uint64_t bits = 0; bits < total; ++bits) {
        bool sat = true;
        for (const Clause& c : f.clauses()) {
            if ((c.pos & bits) == 0 && (c.neg & ~bits & mask) == 0) {
                sat = false;
                break;
            }
        }
        count += sat;
    }
    return count;
}

// Subcube-elimination sieve: start from the full bitset of 2^n assignments
// and clear, clause by clause, the subcube of assignments the clause does not
// satisfy (pos variables false, neg variables true, the rest free). The
// surviving bits are exactly the solutions.
inline std::uint64_t count_by_sieve(const Formula& f) {
    const int n = f.num_variables();
    const std::uint64_t total = 1ULL << n;
    const std::size_t words = static_cast<std::size_t>((total + 63) / 64);
    std::vector<std::uint64_t> alive(words, ~0ULL);
    if (n < 6) alive[0] = (1ULL << total) - 1;

    const std::uint64_t mask = f.mask();
    for (const Clause& c : f.clauses()) {
        if (c.empty()) return 0;
        const std::uint64_t free = mask & ~(c.pos | c.neg);
        std::uint64_t sub = 0;
        while (true) {
            const std::uint64_t dead = c.neg | sub;
            alive[dead >> 6] &= ~(1ULL << (dead & 63));
            if (sub == free) break;
            sub = (sub - free) & free;
        }
    }

    std::uint64_t count = 0;
    for (std::uint64_t w : alive) count += std::popcount(w);
    return count;
}

inline constexpr int kSieveLimit = 26; // 2^26 bits = 8 MiB of scratch

} // namespace detail

// Exact number of satisfying assignments by exhaustive enumeration.
inline std::uint64_t count_solutions(const Formula& f, int enumeration_limit = kDefaultEnumerationLimit) {
    if (f.num_variables() > enumeration_limit || f.num_variables() > 62)
        throw capacity_error("count_solutions: variable count exceeds enumeration limit");
    if (f.num_variables() <= detail::kSieveLimit) return detail::count_by_sieve(f);
    return detail::count_by_scan(f);
}

namespace detail {

struct DpllState {
    std::uint64_t assigned = 0;
    std::uint64_t value = 0; // meaningful only on assigned bits
};

inline bool dpll(const Formula& f, DpllState st, Assignment& witness) {
    const std::uint64_t mask = f.mask();

    // Propagate unit clauses and pure literals to fixpoint.
    bool changed = true;
    while (changed) {
        changed = false;
        std::uint64_t occ_pos = 0, occ_neg = 0;
        bool all_satisfied = true;
        for (const Clause& c : f.clauses()) {
            if ((c.pos & st.value & st.assigned) | (c.neg & ~st.value & st.assigned)) continue;
            const std::uint64_t rem_pos = c.pos & ~st.assigned;
            const std::uint64_t rem_neg = c.neg & ~st.assigned;
            const std::uint64_t rem = rem_pos | rem_neg;
            if (rem == 0) return false; // falsified clause
            all_satisfied = false;
            if (std::popcount(rem) == 1) {
                st.assigned |= rem;
                if (rem & rem_pos) st.value |= rem;
                changed = true;
            }
            occ_pos |= rem_pos;
            occ_neg |= rem_neg;
        }
        if (all_satisfied) {
            witness = Assignment{st.value & st.assigned & mask};
            return true;
        }
        if (changed) continue;
        const std::uint64_t pure_pos = occ_pos & ~occ_neg;
        const std::uint64_t pure_neg = occ_neg & ~occ_pos;
        if (pure_pos | pure_neg) {
            st.assigned |= pure_pos | pure_neg;
            st.value |= pure_pos;
            changed = true;
        }
    }

    // Branch on the unassigned variable with the most open occurrences.
    int best_var = -1, best_score = -1;
    int pos_hits = 0, neg_hits = 0;
    for (int v = 0; v < f.num_variables(); ++v) {
        const std::uint64_t bit = 1ULL << v;
        if (st.assigned & bit) continue;
        int cp = 0, cn = 0;
        for (const Clause& c : f.clauses()) {
            if ((c.pos & st.value & st.assigned) | (c.neg & ~st.value & st.assigned)) continue;
            cp += (c.pos & bit) != 0;
            cn += (c.neg & bit) != 0;
        }
        if (cp + cn > best_score) {
            best_score = cp + cn;
            best_var = v;
            pos_hits = cp;
            neg_hits = cn;
        }
    }
    if (best_var < 0) return false; // unreachable: open clause implies open variable

    const std::uint64_t bit = 1ULL << best_var;
    const bool first = pos_hits >= neg_hits;
    for (int attempt = 0; attempt < 2; ++attempt) {
        DpllState next = st;
        next.assigned |= bit;
        if (first == (attempt == 0)) next.value |= bit;
        else next.value &= ~bit;
        if (dpll(f, next, witness)) return true;
    }
    return false;
}

} // namespace detail

// Complete backtracking decision procedure (unit propagation + pure
// literals). Returns a satisfying assignment, or nullopt when UNSAT.
inline std::optional<Assignment> is_satisfiable(const Formula& f) {
    Assignment witness{0};
    if (detail::dpll(f, detail::DpllState{}, witness)) return witness;
    return std::nullopt;
}

} // namespace satphase
