// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sepbound/bounds.hpp"
#include "sepbound/montecarlo.hpp"
#include "sepbound/tables.hpp"
#include "sepbound/twopoint.hpp"

using namespace sepbound;

namespace {

int failures = 0;

void report(int id, const char *name, bool ok, const std::string &detail, double seconds)
{
    std::printf("%s %2d %-34s %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, name, detail.c_str(), seconds);
    std::fflush(stdout);
    failures += !ok;
}

template <class F>
void criterion(int id, const char *name, F body)
{
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception &e) {
        detail << "exception: " << e.what();
    }
    report(id, name, ok, detail.str(),
           std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

double rel(double a, double b) { return std::fabs(a / b - 1.0); }

bool tables(std::ostream &d)
{
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    int cells = 0, bad = 0;
    for (int id = 1; id <= kTableCount; ++id) {
        const Table t = make_table(id);
        for (const auto &c : t.cells) {
            ++cells;
            if (!c.match.ok) {
                ++bad;
                d << "[table " << id << " " << c.row << "/" << c.column << " " << c.display << " vs " << c.printed
                  << "] ";
            }
        }
        ok = ok && t.all_match();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    d << cells - bad << "/" << cells << " cells match";
    return ok && secs < 120.0;
}

bool examples(std::ostream &d)
{
    struct Ex {
        const char *id;
        int n;
        double alpha;
        Center center;
        std::optional<double> sigma0;
        double printed, tol;
    };
    const std::vector<Ex> ex = {
        {"normal_known", 100, 0.9, OriginCenter{}, {}, 276671, 1e-3},
        {"normal_simple", 100, 0.9, OriginCenter{}, {}, 1132950, 1e-2},
        {"normal_optimal", 100, 0.9, OriginCenter{}, {}, 1141060, 1e-2},
        {"ball_simple", 200, 0.5, OriginCenter{}, {}, 642645, 1e-2},
        {"ball_optimal", 200, 0.5, OriginCenter{}, {}, 661243, 1e-2},
        {"product_legacy", 500, 1.0, OriginCenter{}, 0.5, 141.7, 1e-3},
        {"product_hoeffding", 500, 1.0, OriginCenter{}, 0.5, 48516519, 1e-3},
        {"product_hoeffding", 100, 1.0, CubeCenter{}, 0.5, 37901503, 1e-3},
        {"product_bernstein", 1000, 1.0, CubeCenter{}, 0.2, 21799877, 1e-3},
        {"product_hoeffding", 500, 0.9, MeanCenter{}, 0.5, 8411607, 1e-3},
        {"rot_alpha1", 400, 1.0, OriginCenter{}, {}, 144625706429.0, 1e-3},
    };
    bool ok = true;
    double worst = 0.0;
    for (const auto &e : ex) {
        TheoremParams p;
        p.sigma0 = e.sigma0;
        const double M = bound(SeparabilityQuery{e.n, e.alpha, 0.01, e.center}, e.id, p).M();
        const double r = rel(M, e.printed);
        worst = std::max(worst, r);
        if (r > e.tol) {
            ok = false;
            d << "[" << e.id << " n=" << e.n << ": " << M << " vs " << e.printed << "] ";
        }
    }
    d << ex.size() << " examples, max rel dev " << worst;
    return ok;
}

bool chernoff(std::ostream &d)
{
    const double gu = chernoff_gamma(Uniform01{}, 1.0).gamma;
    bool ok = std::fabs(gu - 0.23319) <= 1e-5;
    double worst = 0.0;
    for (double a : {0.3, 0.6, 1.0})
        worst = std::max(worst, std::fabs(chernoff_gamma(StandardNormal{}, a).gamma - 0.25 * std::log1p(a * a)));
    ok = ok && worst <= 1e-9;
    d << "uniform gamma " << gu << ", normal max |err| " << worst;
    return ok;
}

bool exactness(std::ostream &d)
{
    struct Case {
        DistributionSpec spec;
        int n;
        double alpha;
        std::function<TwoPointResult(int, double)> f;
        const char *name;
    };
    const std::vector<Case> cases = {
        {dist::UniformBall{}, 10, 1.0, ball_exact, "ball"},
        {dist::StandardNormal{}, 1, 0.6, normal_exact, "normal"},
        {dist::StandardNormal{}, 1, 1.0, normal_exact, "normal"},
        {dist::StandardNormal{}, 10, 0.6, normal_exact, "normal"},
        {dist::StandardNormal{}, 10, 1.0, normal_exact, "normal"},
        {dist::SphericalExponential{}, 12, 0.8, exponential_exact, "exponential"},
        {dist::SphericalExponential{}, 12, 1.0, exponential_exact, "exponential"},
    };
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const auto &c = cases[k];
        const auto e = estimate_two_point(c.spec, c.n, c.alpha, {}, 10000000, kDefaultSeed + k);
        const double f = c.f(c.n, c.alpha).f.value();
        if (!e.contains(f)) {
            ok = false;
            d << "[" << c.name << " n=" << c.n << " a=" << c.alpha << ": f=" << f << " CI [" << e.ci_low << ", "
              << e.ci_high << "]] ";
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    d << cases.size() << " cases at 1e7 pairs";
    return ok && secs <= 300.0;
}

bool calibration(std::ostream &d)
{
    const int n = 30;
    const double f = ball_exact(n, 1.0).f.value();
    // M(M-1) f = 1/2
    const auto M = static_cast<std::size_t>(std::llround(0.5 + std::sqrt(0.25 + 0.5 / f)));
    const std::uint64_t sets = 2000;
    McOptions opt;
    opt.budget = 1e13;
    const auto e = estimate_set_separability(dist::UniformBall{}, n, M, 1.0, {}, sets, kDefaultSeed, opt);
    const double lo = e.mean_inseparable_pairs - 3.0 * e.stderr_pairs, hi = e.mean_inseparable_pairs + 3.0 * e.stderr_pairs;
    d << "M=" << M << " expected " << M * (M - 1.0) * f << ", mean " << e.mean_inseparable_pairs << " +- "
      << e.stderr_pairs << " over " << sets << " sets";
    return lo >= 0.4 && hi <= 0.6;
}

bool alpha1_fact(std::ostream &d)
{
    double worst = INFINITY;
    for (int n : {1, 2, 5, 10, 50, 100, 500, 1000, 2000, 4000})
        worst = std::min(worst, -rotgeneral_f(n, 1.0).f.log_value / n);
    d << "min -log f/n = " << worst;
    return worst >= 0.14;
}

bool tightness(std::ostream &d)
{
    auto ball = [](int n) { return std::exp(ball_asymptotic(n, 0.5).f.log_value - ball_exact(n, 0.5).f.log_value); };
    auto normal = [](int n) {
        const double a = 1.0;
        const double est = std::log(0.5) + reg_inc_beta_upper(1.0 / (1.0 + a * a), 0.5 * n, 0.5).log_value;
        return std::exp(est - normal_exact(n, a).f.log_value);
    };
    auto expo = [](int n) {
        return std::exp(exponential_asymptotic(n, 1.0).f.log_value - exponential_exact(n, 1.0).f.log_value);
    };
    bool ok = true;
    const char *sep = "";
    const std::pair<const char *, std::function<double(int)>> forms[] = {{"ball", ball}, {"normal", normal},
                                                                         {"exponential", expo}};
    for (const auto &[name, ratio] : forms) {
        const double r1 = ratio(100), r2 = ratio(500), r3 = ratio(2000);
        d << sep << name << " " << r1 << " " << r2 << " " << r3;
        sep = "; ";
        ok = ok && r1 >= 1.0 && r2 >= 1.0 && r3 >= 1.0 && r1 > r2 && r2 > r3 && r3 <= 1.05;
    }
    return ok;
}

bool exponents(std::ostream &d)
{
    TheoremParams g;
    g.gamma = 1.0;
    struct E {
        const char *id;
        double want;
        TheoremParams p;
    };
    const std::vector<E> es = {{"ball_optimal", 0.5 * std::log(2.0), {}},
                               {"normal_optimal", 0.25 * std::log(2.0), {}},
                               {"exponential_optimal", std::log(std::pow(27.0, 0.25) / 2.0), {}},
                               {"slc", 1.0 / 16, g},
                               {"slc_improved", 1.0 / 8, g}};
    bool ok = true;
    double worst_closed = 0.0, worst_numeric = 0.0;
    for (const auto &e : es) {
        const double b = exponent_b(e.id, 1.0, e.p);
        const double bn = exponent_b_at(e.id, 2000, 1.0, e.p);
        worst_closed = std::max(worst_closed, std::fabs(b - e.want));
        worst_numeric = std::max(worst_numeric, rel(bn, e.want));
        ok = ok && std::fabs(b - e.want) < 5e-5 && rel(bn, e.want) <= 0.02;
    }
    d << "closed forms max |err| " << worst_closed << ", n=2000 extraction max rel dev " << worst_numeric;
    return ok;
}

bool properties(std::ostream &d)
{
    constexpr int kCases = 1000;
    std::mt19937_64 g(909);
    auto U = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); };
    auto I = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(g); };
    int bad[6] = {0, 0, 0, 0, 0, 0};

    for (int k = 0; k < kCases; ++k) {
        const int n = I(2, 600);
        const double a = U(0.05, 1.0), b = std::min(1.0, a + U(0.01, 0.3));
        for (auto fn : {&ball_exact, &normal_exact, &exponential_exact}) {
            const double fa = fn(n, a).f.log_value;
            if (!(fa <= 1e-12) || fn(n, b).f.log_value > fa + 1e-9 || fn(n + 1, a).f.log_value > fa + 1e-9) ++bad[0];
        }
        if (ball_upper(n, a).f.log_value < ball_exact(n, a).f.log_value - 1e-9) ++bad[0];
    }
    for (int k = 0; k < kCases; ++k) {
        const int n = I(1, 3000);
        const double t = U(0.01, 3.0), w = 4.0 * t / ((1.0 + t) * (1.0 + t));
        const double lhs = reg_inc_beta(t / (1.0 + t), n, n).log_value;
        const double half = std::log(0.5) + reg_inc_beta(w, n, 0.5).log_value;
        if (t <= 1.0 ? std::fabs(lhs - half) > 1e-9 * std::max(1.0, std::fabs(lhs))
                     : std::fabs(std::exp(lhs) - (1.0 - std::exp(half))) > 1e-12)
            ++bad[1];
    }
    for (int k = 0; k < kCases; ++k) {
        const double z = U(0.0, 1.0), a = std::exp(U(std::log(0.5), std::log(2000.0))),
                     b = std::exp(U(std::log(0.5), std::log(2000.0)));
        if (std::fabs(reg_inc_beta(z, a, b).value() + reg_inc_beta(1.0 - z, b, a).value() - 1.0) > 1e-12) ++bad[2];
    }
    for (int k = 0; k < kCases; ++k) {
        const int n = I(1, 12);
        auto dy = [&](int lim) {
            Eigen::VectorXd v(n);
            for (int i = 0; i < n; ++i) v(i) = I(-lim, lim) / 4.0;
            return v;
        };
        const Eigen::VectorXd x = dy(8), y = dy(8), c = dy(2), v = dy(8);
        const double alpha = I(1, 4) / 4.0, s = std::ldexp(1.0, I(-6, 6));
        const bool base = is_inseparable_ordered(x, y, alpha, c);
        if (base != is_inseparable_ordered(Eigen::VectorXd(s * x), Eigen::VectorXd(s * y), alpha, Eigen::VectorXd(s * c)) ||
            base != is_inseparable_ordered(Eigen::VectorXd(x + v), Eigen::VectorXd(y + v), alpha, Eigen::VectorXd(c + v)))
            ++bad[3];
    }
    for (int k = 0; k < kCases; ++k) {
        const int n = I(1, 50);
        auto rng = make_stream(905, k);
        const auto pts = sample_points(dist::DependentHalfCube{}, n, 2, rng);
        if (!is_inseparable_ordered(pts.col(1), pts.col(0), U(0.01, 1.0), Eigen::VectorXd::Constant(n, 0.5)))
            ++bad[4];
    }
    for (int k = 0; k < kCases; ++k) {
        const int n = I(1, 20), m = I(2, 15), s = I(0, m - 1);
        const double alpha = U(0.1, 1.0);
        auto rng = make_stream(906, k);
        const Eigen::MatrixXd pts = sample_points(dist::StandardNormal{}, n, m, rng);
        std::uint64_t extra = 2;
        for (int j = 0; j < m; ++j)
            if (j != s)
                extra += is_inseparable_ordered(pts.col(s), pts.col(j), alpha) +
                         is_inseparable_ordered(pts.col(j), pts.col(s), alpha);
        Eigen::MatrixXd dup(n, m + 1);
        dup << pts, pts.col(s);
        if (count_inseparable_pairs(dup, alpha) != count_inseparable_pairs(pts, alpha) + extra) ++bad[5];
    }
    const char *names[6] = {"two-point", "halved-beta", "reflection", "scale/shift", "half-cube", "duplicate"};
    bool ok = true;
    for (int i = 0; i < 6; ++i) {
        d << names[i] << " " << kCases - bad[i] << "/" << kCases << (i < 5 ? ", " : "");
        ok = ok && bad[i] == 0;
    }
    return ok;
}

bool adversarial(std::ostream &d)
{
    const int n = 25;
    const auto M = static_cast<std::size_t>(20 * std::ceil(std::exp(1.2 * std::sqrt(double(n)))));
    const auto e = estimate_set_separability(dist::LaplaceProduct{}, n, M, 1.0, {}, 200, kDefaultSeed);
    d << "M=" << M << ", separable fraction " << e.p_separable.p_hat << " [" << e.p_separable.ci_low << ", "
      << e.p_separable.ci_high << "], mean pairs " << e.mean_inseparable_pairs;
    return e.p_separable.p_hat < 0.9;
}

} // namespace

int main()
{
    criterion(1, "table reproduction", tables);
    criterion(2, "named example values", examples);
    criterion(3, "Chernoff constants", chernoff);
    criterion(4, "exactness vs Monte Carlo", exactness);
    criterion(5, "expected-pair calibration", calibration);
    criterion(6, "log-concave exponent fact", alpha1_fact);
    criterion(7, "asymptotic tightness", tightness);
    criterion(8, "exponent suite", exponents);
    criterion(9, "property tests", properties);
    criterion(10, "adversarial onset", adversarial);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures ? 1 : 0;
}
