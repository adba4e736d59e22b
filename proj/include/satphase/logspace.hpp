#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

// Log-space helpers. Products of many probabilities underflow doubles almost
// immediately at the sizes this library works with, so moment sums are
// accumulated as log(sum(exp(t_i))) with a running max pivot.

namespace satphase {

inline constexpr double kLn2 = 0.6931471805599453094;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(1 - exp(L)) for L <= 0.
inline double log1mexp(double L) {
    if (L > 0.0) throw std::domain_error("log1mexp: argument must be <= 0");
    if (L == 0.0) return kNegInf;
    if (L < -kLn2) return std::log1p(-std::exp(L));
    return std::log(-std::expm1(L));
}

// ln C(n, k) via log-gamma; exactness for small integers is at ulp level.
inline double log_binomial(int n, int k) {
    if (k < 0 || k > n) return kNegInf;
    if (k == 0 || k == n) return 0.0;
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Streaming log-sum-exp: add terms in log space, read back log of the sum.
class LogSumExp {
  public:
    void add(double t) {
        if (t == kNegInf) return;
        if (t <= max_) {
            sum_ += std::exp(t - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - t) + 1.0;
            max_ = t;
        }
    }

    double value() const {
        if (max_ == kNegInf) return kNegInf;
        return max_ + std::log(sum_);
    }

  private:
    double max_ = kNegInf;
    double sum_ = 0.0;
};

// C(n, k) as a double, exact while it fits the 53-bit mantissa.
inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
    }
    return c;
}

} // namespace satphase
