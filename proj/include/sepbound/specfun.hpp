#pragma once

#include <cmath>
#include <limits>

namespace sepbound {

// Probability (or probability bound) held as its natural logarithm.
struct LogProb {
    double log_value = -std::numeric_limits<double>::infinity();

    static LogProb from_log(double lv) { return LogProb{lv}; }
    static LogProb from_linear(double p);
    static LogProb zero() { return LogProb{}; }
    static LogProb one() { return LogProb{0.0}; }

    double value() const { return std::exp(log_value); }
    double log10() const { return log_value / std::log(10.0); }
    bool is_zero() const { return std::isinf(log_value) && log_value < 0; }
};

inline LogProb operator*(LogProb a, LogProb b) { return LogProb{a.log_value + b.log_value}; }

// log(e^a + e^b)
double log_add(double a, double b);
// log(e^a - e^b), requires a >= b
double log_sub(double a, double b);
// log(1 - e^x) for x <= 0
double log1m_exp(double x);

inline LogProb operator+(LogProb a, LogProb b) { return LogProb{log_add(a.log_value, b.log_value)}; }
inline LogProb complement(LogProb p) { return LogProb{log1m_exp(p.log_value)}; }

double ln_gamma(double x);
double ln_beta(double a, double b);

// I_z(a,b)
LogProb reg_inc_beta(double z, double a, double b);

// z^a (1-z)^(b-1) a^(b-1) / Gamma(b), an upper bound on I_z(a,b) for b in (0,1)
LogProb reg_inc_beta_upper(double z, double a, double b);

namespace detail {
// lgamma(x) - ((x-1/2)log x - x + log sqrt(2 pi)), x >= 10
double stirling_tail(double x);
}

} // namespace sepbound
