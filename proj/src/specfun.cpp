#include "sepbound/specfun.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sepbound {

namespace {

constexpr double kLnSqrt2Pi = 0.918938533204672741780329736406;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

void require(bool ok, const char *what)
{
    if (!ok)
        throw std::domain_error(what);
}

double lgamma_safe(double x)
{
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

// log( x0^a y0^b / B(a,b) ) with x0 = a/(a+b), y0 = b/(a+b)
double log_mode_prefactor(double a, double b)
{
    const double p = std::min(a, b), q = std::max(a, b);
    if (p >= 10.0) {
        const double corr = detail::stirling_tail(p) + detail::stirling_tail(q)
                          - detail::stirling_tail(p + q);
        return 0.5 * std::log(p * q / (p + q)) - kLnSqrt2Pi - corr;
    }
    if (q >= 10.0) {
        const double corr = detail::stirling_tail(q) - detail::stirling_tail(p + q);
        return p * std::log(p) - lgamma_safe(p) - corr - p
             + 0.5 * std::log1p(-p / (p + q));
    }
    return a * std::log(a / (a + b)) + b * std::log(b / (a + b)) - ln_beta(a, b);
}

// Lentz evaluation of the continued fraction for I_x(a,b).
double beta_cf(double x, double a, double b)
{
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    const int max_iter = 200000;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps)
            return h;
    }
    throw std::logic_error("reg_inc_beta: continued fraction did not converge");
}

// log of x^a y^b / (a B(a,b)) * cf, where d = x(a+b) - a is passed exactly
double log_ibeta_cf_side(double x, double a, double b, double d)
{
    const double log_pow = a * std::log1p(d / a) + b * std::log1p(-d / b);
    return log_mode_prefactor(a, b) + log_pow - std::log(a) + std::log(beta_cf(x, a, b));
}

} // namespace

LogProb LogProb::from_linear(double p)
{
    return LogProb{p > 0 ? std::log(p) : -std::numeric_limits<double>::infinity()};
}

double log_add(double a, double b)
{
    if (a < b) std::swap(a, b);
    if (std::isinf(b) && b < 0) return a;
    return a + std::log1p(std::exp(b - a));
}

double log_sub(double a, double b)
{
    if (std::isinf(b) && b < 0) return a;
    return a + log1m_exp(b - a);
}

double log1m_exp(double x)
{
    if (x > -0.6931471805599453)
        return std::log(-std::expm1(x));
    return std::log1p(-std::exp(x));
}

double detail::stirling_tail(double x)
{
    if (x < 10.0)
        return lgamma_safe(x) - ((x - 0.5) * std::log(x) - x + kLnSqrt2Pi);
    const double r = 1.0 / x, r2 = r * r;
    return r * (1.0 / 12 + r2 * (-1.0 / 360 + r2 * (1.0 / 1260 + r2 * (-1.0 / 1680
         + r2 * (1.0 / 1188 + r2 * (-691.0 / 360360 + r2 * (1.0 / 156)))))));
}

double ln_gamma(double x)
{
    require(x > 0 && std::isfinite(x), "ln_gamma: argument must be positive");
    return lgamma_safe(x);
}

double ln_beta(double a, double b)
{
    require(a > 0 && b > 0 && std::isfinite(a) && std::isfinite(b),
            "ln_beta: arguments must be positive");
    const double p = std::min(a, b), q = std::max(a, b);
    if (p >= 10.0) {
        const double corr = detail::stirling_tail(p) + detail::stirling_tail(q)
                          - detail::stirling_tail(p + q);
        return -0.5 * std::log(q) + kLnSqrt2Pi + corr + (p - 0.5) * std::log(p / (p + q))
             + q * std::log1p(-p / (p + q));
    }
    if (q >= 10.0) {
        const double corr = detail::stirling_tail(q) - detail::stirling_tail(p + q);
        return lgamma_safe(p) + corr + p - p * std::log(p + q)
             + (q - 0.5) * std::log1p(-p / (p + q));
    }
    return lgamma_safe(p) + lgamma_safe(q) - lgamma_safe(p + q);
}

LogProb reg_inc_beta(double z, double a, double b)
{
    require(z >= 0 && z <= 1, "reg_inc_beta: z outside [0,1]");
    require(a > 0 && b > 0 && std::isfinite(a) && std::isfinite(b),
            "reg_inc_beta: a and b must be positive");
    if (z == 0) return LogProb::zero();
    if (z == 1) return LogProb::one();

    const double d = std::fma(z, a + b, -a);
    if (z <= (a + 1.0) / (a + b + 2.0))
        return LogProb{log_ibeta_cf_side(z, a, b, d)};
    const double lower = log_ibeta_cf_side(1.0 - z, b, a, -d);
    return LogProb{log1m_exp(std::min(lower, 0.0))};
}

LogProb reg_inc_beta_upper(double z, double a, double b)
{
    require(z > 0 && z < 1, "reg_inc_beta_upper: z outside (0,1)");
    require(a > 0 && std::isfinite(a), "reg_inc_beta_upper: a must be positive");
    require(b > 0 && b < 1, "reg_inc_beta_upper: b outside (0,1)");
    return LogProb{a * std::log(z) + (b - 1.0) * std::log1p(-z) + (b - 1.0) * std::log(a)
                   - lgamma_safe(b)};
}

} // namespace sepbound
