#pragma once

#include <cmath>
#include <stdexcept>

namespace satphase {

// Parameters of the unrestricted random CNF model: a clause draws every
// variable independently, positive with probability p, negated with
// probability q, absent otherwise. q == p is the unbiased model.
struct ModelParams {
    int n = 0;          // variables
    int m = 0;          // clauses
    double p = 0.0;     // positive-literal probability per slot
    double q = 0.0;     // negative-literal probability per slot

    bool unbiased() const { return p == q; }

    double density() const { return static_cast<double>(m) / n; }       // c = m/n
    double mean_clause_len() const { return (p + q) * n; }              // kappa

    // ln((1-p)^n) and ln((1-q)^n); the linear values x and y underflow
    // quickly, so everything downstream works from the logs.
    double log_x() const { return n * std::log1p(-p); }
    double log_y() const { return n * std::log1p(-q); }
    double x() const { return std::exp(log_x()); }
    double y() const { return std::exp(log_y()); }

    double alpha() const { return (1.0 - p) / (1.0 - q); }              // (1-p)/(1-q)
    double beta() const { return (1.0 - p - q) / (1.0 - q); }           // (1-p-q)/(1-q)

    void validate() const {
        if (n < 1) throw std::invalid_argument("ModelParams: n must be >= 1");
        if (m < 0) throw std::invalid_argument("ModelParams: m must be >= 0");
        if (!(p >= 0.0) || !(q >= 0.0))
            throw std::invalid_argument("ModelParams: p and q must be >= 0");
        if (!(p + q <= 1.0))
            throw std::invalid_argument("ModelParams: p + q must be <= 1");
    }
};

inline ModelParams make_unbiased(int n, int m, double p) {
    return ModelParams{n, m, p, p};
}

} // namespace satphase
