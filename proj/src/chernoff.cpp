#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <memory>
#include <string>

#include "sepbound/numerics.hpp"
#include "sepbound/twopoint.hpp"

namespace sepbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLambdaCap = 1e6;

// log E[e^{lambda z}] and E[z e^{lambda z}] / E[e^{lambda z}] for z = x y - alpha x^2
struct Tilt {
    double log_m;
    double ratio;
};

struct Atom {
    double value, prob;
};

Tilt discrete_tilt(const std::vector<Atom> &atoms, double lambda, double alpha)
{
    double m = -kInf;
    std::vector<double> lw;
    std::vector<double> zs;
    for (const auto &a : atoms)
        for (const auto &b : atoms) {
            if (a.prob <= 0 || b.prob <= 0) continue;
            const double z = a.value * b.value - alpha * a.value * a.value;
            lw.push_back(std::log(a.prob) + std::log(b.prob) + lambda * z);
            zs.push_back(z);
            m = std::max(m, lw.back());
        }
    double s = 0.0, sz = 0.0;
    for (std::size_t i = 0; i < lw.size(); ++i) {
        const double w = std::exp(lw[i] - m);
        s += w;
        sz += w * zs[i];
    }
    return {m + std::log(s), sz / s};
}

// uniform on [-1/2, 1/2]: log of 2 sinh(s/2)/s and d/ds of that
double log_mgf_u(double s)
{
    const double a = std::fabs(s);
    if (a < 1e-3) return s * s / 24.0 - s * s * s * s / 2880.0;
    return a / 2.0 + log1m_exp(-a) - std::log(a);
}

double dlog_mgf_u(double s)
{
    if (std::fabs(s) < 1e-3) return s / 12.0 - s * s * s / 720.0;
    return 0.5 / std::tanh(s / 2.0) - 1.0 / s;
}

Tilt uniform_tilt(double lambda, double alpha)
{
    QuadratureOptions opt;
    opt.rel_tol = 1e-12;
    opt.initial_panels = 2;
    auto w = [&](double x) { return std::exp(-lambda * alpha * x * x + log_mgf_u(lambda * x)); };
    const auto m = integrate_adaptive(w, 0.0, 0.5, opt);
    opt.abs_floor = 1e-15;
    const auto mz = integrate_adaptive(
        [&](double x) { return w(x) * (x * dlog_mgf_u(lambda * x) - alpha * x * x); }, 0.0, 0.5, opt);
    // integrals over [0, 1/2] of an even integrand; the factor 2 cancels against the density 1
    return {std::log(2.0 * m.value), mz.value / m.value};
}

Tilt normal_tilt(double lambda, double alpha)
{
    const double d = 1.0 + 2.0 * lambda * alpha - lambda * lambda;
    if (!(d > 0)) return {kInf, kInf};
    return {-0.5 * std::log(d), (lambda - alpha) / d};
}

struct Tabulated {
    std::vector<double> x, rho;
    double mean = 0.0;
};

Tabulated normalise(const TabulatedDensity &t)
{
    if (t.x.size() < 2 || t.x.size() != t.density.size())
        throw std::invalid_argument("tabulated density: need matching grids of size >= 2");
    for (std::size_t i = 0; i + 1 < t.x.size(); ++i)
        if (!(t.x[i] < t.x[i + 1]))
            throw std::invalid_argument("tabulated density: grid must be increasing");
    for (double d : t.density)
        if (!(d >= 0) || !std::isfinite(d))
            throw std::invalid_argument("tabulated density: values must be finite and nonnegative");
    double mass = 0.0, first = 0.0;
    for (std::size_t i = 0; i + 1 < t.x.size(); ++i) {
        const double h = t.x[i + 1] - t.x[i];
        mass += 0.5 * h * (t.density[i] + t.density[i + 1]);
        // exact first moment of a linear piece
        first += h * (t.density[i] * (2 * t.x[i] + t.x[i + 1]) + t.density[i + 1] * (t.x[i] + 2 * t.x[i + 1])) / 6.0;
    }
    if (!(mass > 0))
        throw std::invalid_argument("tabulated density: zero total mass");
    Tabulated r{t.x, t.density, first / mass};
    for (auto &v : r.rho) v /= mass;
    return r;
}

// composite fixed-order Gauss-Kronrod over the grid pieces
template <class F>
double tab_integrate(const Tabulated &t, F &&f)
{
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < t.x.size(); ++i) {
        const double a = t.x[i], b = t.x[i + 1];
        constexpr int sub = 4;
        for (int k = 0; k < sub; ++k) {
            const double lo = a + (b - a) * k / sub, hi = a + (b - a) * (k + 1) / sub;
            double xs[15], ys[15];
            detail::gk15_nodes(lo, hi, xs);
            for (int j = 0; j < 15; ++j) {
                const double u = (xs[j] - a) / (b - a);
                ys[j] = ((1 - u) * t.rho[i] + u * t.rho[i + 1]) * f(xs[j]);
            }
            double k15, g7;
            detail::gk15_combine(ys, 0.5 * (hi - lo), k15, g7);
            acc += k15;
        }
    }
    return acc;
}

Tilt tabulated_tilt(const Tabulated &t, double lambda, double alpha)
{
    const double mu = t.mean;
    // inner moments depend on lambda*(x - mu) only; shift the exponent by its max to stay finite
    const double lo = t.x.front() - mu, hi = t.x.back() - mu;
    const double span = std::max(std::fabs(lo), std::fabs(hi));
    const double shift = lambda * span * span * (1.0 + alpha);
    const double m = tab_integrate(t, [&](double xr) {
        const double x = xr - mu;
        return tab_integrate(t, [&](double yr) {
            return std::exp(lambda * (x * (yr - mu) - alpha * x * x) - shift);
        });
    });
    const double mz = tab_integrate(t, [&](double xr) {
        const double x = xr - mu;
        return tab_integrate(t, [&](double yr) {
            const double z = x * (yr - mu) - alpha * x * x;
            return z * std::exp(lambda * z - shift);
        });
    });
    return {std::log(m) + shift, mz / m};
}

struct Evaluator {
    std::function<Tilt(double)> tilt;
    double lambda_max = kInf;
};

Evaluator make_evaluator(const ComponentSpec &c, double alpha)
{
    if (!(component_variance(c) > 0))
        throw std::domain_error("chernoff: component has zero variance");
    return std::visit(
        [alpha](const auto &v) -> Evaluator {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform01>) {
                return {[alpha](double l) { return uniform_tilt(l, alpha); }};
            } else if constexpr (std::is_same_v<T, SymmetricBernoulli>) {
                std::vector<Atom> atoms{{-0.5, 0.5}, {0.5, 0.5}};
                return {[alpha, atoms](double l) { return discrete_tilt(atoms, l, alpha); }};
            } else if constexpr (std::is_same_v<T, ThreePoint>) {
                const double p = 2.0 * v.sigma0 * v.sigma0;
                std::vector<Atom> atoms{{-0.5, p}, {0.0, 1.0 - 2.0 * p}, {0.5, p}};
                return {[alpha, atoms](double l) { return discrete_tilt(atoms, l, alpha); }};
            } else if constexpr (std::is_same_v<T, Laplace>) {
                throw std::domain_error(
                    "chernoff: the moment generating function of x*y is infinite for every "
                    "lambda > 0 under a Laplace component");
            } else if constexpr (std::is_same_v<T, StandardNormal>) {
                return {[alpha](double l) { return normal_tilt(l, alpha); },
                        alpha + std::sqrt(alpha * alpha + 1.0)};
            } else {
                auto tab = std::make_shared<Tabulated>(normalise(v));
                return {[alpha, tab](double l) { return tabulated_tilt(*tab, l, alpha); }};
            }
        },
        c);
}

struct SupResult {
    double value = 0.0, lambda = 0.0, curvature = 0.0;
};

// sup over lambda >= 0 of -sum log M_i(lambda)
SupResult chernoff_sup(const std::vector<Evaluator> &ev)
{
    if (ev.empty()) return {};
    double lmax = kInf;
    for (const auto &e : ev) lmax = std::min(lmax, e.lambda_max);
    const double feasible = std::isfinite(lmax) ? lmax * (1.0 - 1e-9) : kLambdaCap;

    auto slope = [&](double l) {
        double s = 0.0;
        for (const auto &e : ev) s += e.tilt(l).ratio;
        return s;
    };
    auto objective = [&](double l) {
        double s = 0.0;
        for (const auto &e : ev) s -= e.tilt(l).log_m;
        return s;
    };

    // the objective is concave; double the bracket until it turns down at the right end
    double lo = 0.0, hi = std::min(1.0, feasible);
    while (slope(hi) < 0 && hi < feasible) {
        lo = hi;
        hi = std::min(2.0 * hi, feasible);
    }
    const auto r = maximize_unimodal(objective, lo, hi, 1e-12 * std::max(hi, 1.0));
    SupResult out{r.max_value, r.argmax, 0.0};
    const double h = out.lambda * 1e-4;
    if (h > 0 && out.lambda + h < feasible)
        out.curvature = (slope(out.lambda + h) - slope(out.lambda - h)) / (2.0 * h);
    return out;
}

} // namespace

double component_mean(const ComponentSpec &c)
{
    return std::visit(
        [](const auto &v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform01>) return 0.5;
            else if constexpr (std::is_same_v<T, SymmetricBernoulli>) return 0.5;
            else if constexpr (std::is_same_v<T, ThreePoint>) return 0.5;
            else if constexpr (std::is_same_v<T, TabulatedDensity>) return normalise(v).mean;
            else return 0.0;
        },
        c);
}

double component_variance(const ComponentSpec &c)
{
    return std::visit(
        [](const auto &v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform01>) return 1.0 / 12.0;
            else if constexpr (std::is_same_v<T, SymmetricBernoulli>) return 0.25;
            else if constexpr (std::is_same_v<T, ThreePoint>) {
                if (!(v.sigma0 >= 0 && v.sigma0 <= 0.5))
                    throw std::domain_error("three-point component: sigma0 must lie in [0, 1/2]");
                return v.sigma0 * v.sigma0;
            } else if constexpr (std::is_same_v<T, Laplace>) return 2.0 * v.scale * v.scale;
            else if constexpr (std::is_same_v<T, StandardNormal>) return 1.0;
            else {
                const auto t = normalise(v);
                return tab_integrate(t, [&](double x) { return (x - t.mean) * (x - t.mean); });
            }
        },
        c);
}

std::string component_name(const ComponentSpec &c)
{
    return std::visit(
        [](const auto &v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform01>) return "uniform01";
            else if constexpr (std::is_same_v<T, SymmetricBernoulli>) return "bernoulli";
            else if constexpr (std::is_same_v<T, ThreePoint>) return "threepoint(" + std::to_string(v.sigma0) + ")";
            else if constexpr (std::is_same_v<T, Laplace>) return "laplace";
            else if constexpr (std::is_same_v<T, StandardNormal>) return "normal";
            else return "tabulated";
        },
        c);
}

double chernoff_log_mgf(const ComponentSpec &component, double lambda, double alpha)
{
    return make_evaluator(component, alpha).tilt(lambda).log_m;
}

ChernoffResult chernoff_gamma(const ComponentSpec &component, double alpha)
{
    if (!(alpha > 0 && alpha <= 1))
        throw std::domain_error("alpha must lie in (0,1]");
    const auto s = chernoff_sup({make_evaluator(component, alpha)});
    return {0.5 * s.value, s.lambda, s.curvature};
}

double chernoff_gamma_n(const std::vector<ComponentSpec> &components, double alpha)
{
    if (!(alpha > 0 && alpha <= 1))
        throw std::domain_error("alpha must lie in (0,1]");
    std::vector<Evaluator> ev;
    ev.reserve(components.size());
    for (const auto &c : components) ev.push_back(make_evaluator(c, alpha));
    return 0.5 * chernoff_sup(ev).value;
}

} // namespace sepbound
