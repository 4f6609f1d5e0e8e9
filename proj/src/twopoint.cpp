#include "sepbound/twopoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sepbound/numerics.hpp"

namespace sepbound {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2 = std::numbers::ln2;
constexpr double kPi = std::numbers::pi;

void check_alpha(double alpha)
{
    if (!(alpha > 0 && alpha <= 1))
        throw std::domain_error("alpha must lie in (0,1]");
}

void check_n(int n, int min_n, const char *what)
{
    if (n < min_n)
        throw std::domain_error(std::string(what) + ": dimension too small, need n >= " +
                                std::to_string(min_n));
}

// Integrate cos^(n-2)(u) h(sin(u)/alpha) over [0, pi/2], split at the images of the kinks.
// Returns log of the integral and a relative error estimate.
std::pair<double, double> kernel_integral(int n, double alpha, const RadialModel &radial,
                                          bool log_domain)
{
    std::vector<double> cuts{0.0, kPi / 2};
    std::vector<double> kinks = radial.kinks;
    kinks.push_back(1.0);
    for (double t : kinks) {
        const double s = alpha * t;
        if (s > 0 && s < 1) cuts.push_back(std::asin(s));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const double m = n - 2.0;
    QuadratureOptions opt;
    opt.rel_tol = 1e-12;
    opt.initial_panels = 8;

    double total = kNegInf, err = kNegInf;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        if (!(hi > lo)) continue;
        if (log_domain) {
            auto g = [&](double u) {
                const double c = std::cos(u);
                if (c <= 0) return m == 0 ? radial.log_h(n, 1.0 / alpha) : kNegInf;
                return m * std::log(c) + radial.log_h(n, std::sin(u) / alpha);
            };
            auto r = integrate_log_domain(g, lo, hi, opt);
            total = log_add(total, r.value);
            err = log_add(err, r.abs_error);
        } else {
            auto g = [&](double u) {
                const double c = std::cos(u);
                const double t = std::sin(u) / alpha;
                const double h = radial.ratio_cdf ? radial.ratio_cdf(n, t)
                                                  : std::exp(radial.log_h(n, t));
                return (m == 0 ? 1.0 : std::pow(std::max(c, 0.0), m)) * h;
            };
            auto r = integrate_adaptive(g, lo, hi, opt);
            total = log_add(total, r.value > 0 ? std::log(r.value) : kNegInf);
            err = log_add(err, r.abs_error > 0 ? std::log(r.abs_error) : kNegInf);
        }
    }
    const double rel = std::isinf(total) ? 0.0 : std::exp(err - total);
    return {total, rel};
}

double ball_log_h(int n, double t)
{
    if (t <= 0) return kNegInf;
    if (t <= 1) return n * std::log(t) - kLog2;
    return log1m_exp(-n * std::log(t) - kLog2);
}

// log h for the spherical layer on (0, 1]; h(t) = 1 - h(1/t) above 1
double layer_log_h_low(int n, double t, double R)
{
    if (t <= R) return kNegInf;
    const double lt = n * std::log(t);
    const double diff = lt + log1m_exp(n * std::log(R / t));
    return 2.0 * diff - lt - kLog2 - 2.0 * log1m_exp(n * std::log(R));
}

double exp_log_h_low(int n, double t)
{
    if (t <= 0) return kNegInf;
    const double z = 4.0 * t / ((1.0 + t) * (1.0 + t));
    return -kLog2 + reg_inc_beta(std::min(z, 1.0), n, 0.5).log_value;
}

} // namespace

const char *to_string(FKind k)
{
    switch (k) {
    case FKind::exact: return "exact";
    case FKind::upper_bound: return "upper_bound";
    case FKind::asymptotic: return "asymptotic";
    }
    return "?";
}

double RadialModel::log_h(int n, double t) const
{
    if (log_ratio_cdf) return log_ratio_cdf(n, t);
    const double h = ratio_cdf(n, t);
    return h > 0 ? std::log(h) : kNegInf;
}

RadialModel uniform_ball_radial()
{
    RadialModel m;
    m.log_ratio_cdf = ball_log_h;
    m.ratio_cdf = [](int n, double t) { return std::exp(ball_log_h(n, t)); };
    m.description = "uniform ball";
    return m;
}

RadialModel spherical_layer_radial(double R)
{
    if (!(R > 0 && R < 1))
        throw std::domain_error("spherical layer: R must lie in (0,1)");
    RadialModel m;
    m.log_ratio_cdf = [R](int n, double t) {
        if (t <= 1) return layer_log_h_low(n, t, R);
        return log1m_exp(layer_log_h_low(n, 1.0 / t, R));
    };
    m.ratio_cdf = [R](int n, double t) { return layer_ratio_cdf(n, t, R); };
    m.kinks = {R, 1.0 / R};
    m.description = "spherical layer R=" + std::to_string(R);
    return m;
}

RadialModel exponential_radial()
{
    RadialModel m;
    m.log_ratio_cdf = [](int n, double t) {
        if (t <= 1) return exp_log_h_low(n, t);
        return log1m_exp(exp_log_h_low(n, 1.0 / t));
    };
    m.ratio_cdf = [](int n, double t) {
        if (t <= 0) return 0.0;
        return reg_inc_beta(t / (1.0 + t), n, n).value();
    };
    m.description = "exponential (Gamma(n) radius)";
    return m;
}

double layer_ratio_cdf(int n, double t, double R)
{
    if (!(R > 0 && R < 1))
        throw std::domain_error("layer_ratio_cdf: R must lie in (0,1)");
    if (t <= R) return 0.0;
    if (t >= 1.0 / R) return 1.0;
    const double Rn = std::pow(R, n);
    const double den = 2.0 * (1.0 - Rn) * (1.0 - Rn);
    if (t <= 1) {
        const double tn = std::pow(t, n);
        return (tn - Rn) * (tn - Rn) / (tn * den);
    }
    const double tn = std::pow(t, n);
    const double d = Rn - 1.0 / tn;
    return 1.0 - tn * d * d / den;
}

TwoPointResult ball_upper(int n, double alpha)
{
    check_alpha(alpha);
    check_n(n, 1, "ball_upper");
    return {LogProb{-kLog2 - n * std::log(2.0 * alpha)},
            alpha == 1.0 ? FKind::exact : FKind::upper_bound, 0.0};
}

TwoPointResult spherical_generic(int n, double alpha, const RadialModel &radial)
{
    check_alpha(alpha);
    check_n(n, 2, "spherical_generic");
    auto [li, rel] = kernel_integral(n, alpha, radial, n > 60 || !radial.ratio_cdf);
    return {LogProb{li - ln_beta((n - 1) / 2.0, 0.5)}, FKind::exact, rel};
}

TwoPointResult ball_exact(int n, double alpha)
{
    check_n(n, 2, "ball_exact");
    return spherical_generic(n, alpha, uniform_ball_radial());
}

TwoPointResult ball_asymptotic(int n, double alpha)
{
    check_alpha(alpha);
    if (n <= 3)
        throw std::domain_error("ball_asymptotic: need n > 3");
    const double s = std::sqrt(0.5);
    if (std::fabs(alpha - s) < 1e-15)
        throw HypothesisError("ball_asymptotic: alpha = sqrt(2)/2 is excluded");
    if (alpha > s) return {LogProb{-kLog2 - n * std::log(2.0 * alpha)}, FKind::upper_bound, 0.0};
    const double a2 = alpha * alpha;
    const double lq = -0.5 * std::log(2.0 * kPi) - std::log(alpha * (1.0 - 2.0 * a2))
                    + 1.5 * std::log(double(n)) - 2.0 * std::log(n - 3.0)
                    + 0.5 * (n + 3.0) * std::log1p(-a2);
    return {LogProb{lq}, FKind::upper_bound, 0.0};
}

TwoPointResult normal_exact(int n, double alpha)
{
    check_alpha(alpha);
    check_n(n, 1, "normal_exact");
    const LogProb I = reg_inc_beta(1.0 / (1.0 + alpha * alpha), 0.5 * n, 0.5);
    return {LogProb{I.log_value - kLog2}, FKind::exact, 1e-13};
}

TwoPointResult exponential_exact(int n, double alpha)
{
    check_n(n, 2, "exponential_exact");
    auto radial = exponential_radial();
    radial.ratio_cdf = nullptr;
    check_alpha(alpha);
    auto [li, rel] = kernel_integral(n, alpha, radial, n > 60);
    return {LogProb{li - ln_beta((n - 1) / 2.0, 0.5)}, FKind::exact, rel};
}

TwoPointResult exponential_asymptotic(int n, double alpha)
{
    check_alpha(alpha);
    check_n(n, 4, "exponential_asymptotic");
    const double a2 = alpha * alpha;
    const double t0 = (std::sqrt(1.0 + 8.0 * a2) - 1.0) / (4.0 * a2);
    const double w = 1.0 - a2 * t0 * t0;
    const double h0 = 0.5 * std::log(w) + std::log(4.0 * t0) - 2.0 * std::log1p(t0);
    const double h2 = -a2 * (1.0 + a2 * t0 * t0) / (w * w) - 1.0 / (t0 * t0)
                    + 2.0 / ((1.0 + t0) * (1.0 + t0));
    const double lp = std::log(alpha) - 0.5 * std::log(2.0 * kPi * n) - 1.5 * std::log(w)
                    + std::log((1.0 + t0) / (1.0 - t0)) - 0.5 * std::log(2.0 * std::fabs(h2))
                    + n * h0;
    return {LogProb{lp}, FKind::asymptotic, 0.0};
}

TwoPointResult exponential_asymptotic_printed(int n, double alpha)
{
    check_alpha(alpha);
    check_n(n, 4, "exponential_asymptotic_printed");
    const double a2 = alpha * alpha;
    const double s = std::sqrt(1.0 + 8.0 * a2);
    const double pre = 0.5 * std::log(1.0 + 5.0 * a2 + (1.0 + a2) * s)
                     - std::log(2.0 * alpha * std::sqrt(kPi * n)) - 0.25 * std::log(s);
    const double base = std::log(4.0 * std::sqrt(2.0) * alpha * (s - 1.0))
                      - 1.5 * std::log(s + 4.0 * a2 - 1.0);
    return {LogProb{pre + n * base}, FKind::asymptotic, 0.0};
}

LogProb rotgeneral_phi(double t, int n)
{
    if (!(t > 0)) return LogProb{-0.25 * n};
    const double nn = n;
    QuadratureOptions opt;
    opt.rel_tol = 1e-11;
    opt.initial_panels = 4;
    double acc = kNegInf;

    // t <= x <= 2t: -psi' = n(x-t)/(2t^2) exp(-n(x-t)^2/(4t^2))
    auto psi_mid = [&](double x) { return -nn * (x - t) * (x - t) / (4.0 * t * t); };
    const double split = std::clamp(1.0, t, 2.0 * t);
    if (split > t) {
        auto g = [&](double x) {
            if (x <= t) return kNegInf;
            return -nn * (1.0 - x) * (1.0 - x) / 4.0 + std::log(nn * (x - t) / (2.0 * t * t))
                 + psi_mid(x);
        };
        acc = log_add(acc, integrate_log_domain(g, t, split, opt).value);
    }
    if (split < 2.0 * t)
        acc = log_add(acc, log_sub(psi_mid(split), psi_mid(2.0 * t)));

    // x >= 2t: -psi' = n/(8t) exp(-n x/(8t))
    if (2.0 * t < 1.0) {
        auto g = [&](double x) {
            return -nn * (1.0 - x) * (1.0 - x) / 4.0 + std::log(nn / (8.0 * t)) - nn * x / (8.0 * t);
        };
        acc = log_add(acc, integrate_log_domain(g, 2.0 * t, 1.0, opt).value);
    }
    acc = log_add(acc, -nn * std::max(2.0 * t, 1.0) / (8.0 * t));
    return LogProb{std::min(acc, 0.0)};
}

TwoPointResult rotgeneral_f(int n, double alpha)
{
    check_alpha(alpha);
    check_n(n, 1, "rotgeneral_f");
    if (n == 1) {
        // the pair law degenerates to ||x||/||y|| <= 1/alpha with a sign coincidence
        return {LogProb{rotgeneral_phi(1.0 / alpha, 1).log_value - kLog2}, FKind::upper_bound, 1e-10};
    }
    std::vector<double> cuts{0.0, kPi / 2};
    for (double t : {0.5, 1.0}) {
        const double s = alpha * t;
        if (s < 1) cuts.push_back(std::asin(s));
    }
    std::sort(cuts.begin(), cuts.end());
    const double m = n - 2.0;
    QuadratureOptions opt;
    opt.rel_tol = 1e-10;
    opt.initial_panels = 8;
    auto g = [&](double u) {
        const double c = std::cos(u);
        if (c <= 0 && m > 0) return kNegInf;
        return (m > 0 ? m * std::log(c) : 0.0) + rotgeneral_phi(std::sin(u) / alpha, n).log_value;
    };
    double total = kNegInf, err = kNegInf;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        auto r = integrate_log_domain(g, cuts[i], cuts[i + 1], opt);
        total = log_add(total, r.value);
        err = log_add(err, r.abs_error);
    }
    return {LogProb{total - ln_beta((n - 1) / 2.0, 0.5)}, FKind::upper_bound, std::exp(err - total)};
}

TwoPointResult rotsimple_f(int n, double alpha)
{
    check_alpha(alpha);
    check_n(n, 1, "rotsimple_f");
    if (!(alpha > 0.5))
        throw HypothesisError("rot_simple: requires alpha > 1/2");
    const double r = (2.0 * alpha - 1.0) / (2.0 * alpha + 1.0);
    return {LogProb{kLog2 - n * r * r / 4.0}, FKind::upper_bound, 0.0};
}

TwoPointResult slc_f(int n, double alpha, const SlcParams &slc, bool improved)
{
    check_alpha(alpha);
    check_n(n, 1, "slc_f");
    const double g = slc.gamma;
    if (!(g > 0))
        throw std::domain_error("slc: gamma must be positive");
    double mu;
    if (slc.mu) {
        mu = *slc.mu;
    } else {
        if (!(n * g > 1))
            throw HypothesisError("slc: the norm estimate needs n > 1/gamma");
        mu = std::sqrt(n - 1.0 / g);
    }
    const double a2 = alpha * alpha, mu2 = mu * mu;
    if (!improved) {
        const double e = g * a2 * mu2 / (2.0 * (1.0 + alpha) * (1.0 + alpha));
        return {LogProb{kLog2 - e}, FKind::upper_bound, 0.0};
    }
    if (!(n > (1.0 + 2.0 * a2) / (g * a2)))
        throw HypothesisError("slc_improved: requires n > (1+2 alpha^2)/(gamma alpha^2)");
    const double t1 = std::log(a2) - 1.5 * std::log1p(a2) + 0.5 * std::log(2.0 * kPi * g)
                    + std::log(mu) - g * a2 * mu2 / (2.0 * (1.0 + a2));
    const double t2 = -g * a2 * mu2 / 2.0;
    return {LogProb{log_add(t1, t2)}, FKind::upper_bound, 0.0};
}

double indbound_exponent(const std::vector<SlcParams> &points, double alpha)
{
    check_alpha(alpha);
    if (points.empty())
        throw std::invalid_argument("indbound_exponent: need at least one distribution");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto &pi = points[i];
        if (!pi.mu)
            throw std::invalid_argument("indbound_exponent: norm expectation mu missing");
        if (!(pi.gamma > 0))
            throw std::domain_error("indbound_exponent: gamma must be positive");
        for (std::size_t j = 0; j < points.size(); ++j) {
            const auto &pj = points[j];
            const double gap = *pi.mu * alpha - pj.x0_norm;
            if (!(gap > 0))
                throw HypothesisError("independent_slc: ||x0_" + std::to_string(j) +
                                      "|| < alpha mu_" + std::to_string(i) + " fails");
            const double den = std::sqrt(pj.gamma) * alpha + std::sqrt(pi.gamma);
            best = std::min(best, pi.gamma * pj.gamma * gap * gap / (4.0 * den * den));
        }
    }
    return best;
}

TwoPointResult product_hoeffding_f(int n, double alpha, double sigma0, const HoeffdingCenter &center)
{
    check_alpha(alpha);
    check_n(n, 1, "product_hoeffding_f");
    if (!(sigma0 > 0 && sigma0 <= 0.5))
        throw std::domain_error("product_hoeffding: sigma0 must lie in (0, 1/2]");
    const double s2 = sigma0 * sigma0;
    double t = alpha * s2, w = 0.0;
    switch (center.kind) {
    case CenterKind::arbitrary: {
        const double c = center.c_prime;
        if (!(c >= 0.5 && c <= 1.0))
            throw std::domain_error("product_hoeffding: c' must lie in [1/2, 1]");
        t -= (1.0 - alpha) * center.offset_sq;
        w = alpha >= 0.5 ? c - c * c * (1.0 - alpha) + c * c / (4.0 * alpha) : c;
        break;
    }
    case CenterKind::cube_center:
        t -= (1.0 - alpha) * center.offset_sq;
        w = alpha >= 0.5 ? (1.0 + 2.0 * alpha) * (1.0 + 2.0 * alpha) / (16.0 * alpha) : 0.5;
        break;
    case CenterKind::mean:
        w = alpha >= 0.5 ? alpha + 1.0 / (4.0 * alpha)
                         : (1.0 - alpha) + 1.0 / (4.0 * (1.0 - alpha));
        break;
    }
    if (!(t > 0))
        throw HypothesisError("product_hoeffding: t = alpha sigma0^2 - (1-alpha) offset must be positive");
    return {LogProb{-2.0 * n * t * t / (w * w)}, FKind::upper_bound, 0.0};
}

TwoPointResult product_bernstein_f(int n, double alpha, double sigma0)
{
    check_alpha(alpha);
    check_n(n, 1, "product_bernstein_f");
    if (!(sigma0 > 0 && sigma0 <= 0.5))
        throw std::domain_error("product_bernstein: sigma0 must lie in (0, 1/2]");
    const double a2 = alpha * alpha;
    const double k = alpha >= 0.5 ? 24.0 * a2 / (12.0 * a2 + 13.0)
                                  : 6.0 * a2 / (2.0 * a2 + alpha + 3.0);
    return {LogProb{-k * n * sigma0 * sigma0}, FKind::upper_bound, 0.0};
}

TwoPointResult dependent_f(int n, double alpha, double sigma0)
{
    check_alpha(alpha);
    check_n(n, 1, "dependent_f");
    const double gap = sigma0 * sigma0 - 1.0 / (16.0 * alpha * alpha);
    if (!(gap > 0))
        throw HypothesisError("dependent: requires sigma0^2 > 1/(16 alpha^2)");
    const double r = 4.0 * alpha / (2.0 * alpha + 1.0);
    return {LogProb{-2.0 * std::pow(r, 4) * gap * gap * n}, FKind::upper_bound, 0.0};
}

} // namespace sepbound
