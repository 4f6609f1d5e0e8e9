#include "sepbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "sepbound/numerics.hpp"

namespace sepbound {

namespace {

constexpr double kLn10 = std::numbers::ln10;
constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

const std::vector<std::string> kIds = {
    "prototype",        "prototype_set",     "ball_known",          "ball_optimal",
    "ball_simple",      "layer_optimal",     "slc",                 "slc_improved",
    "independent_slc",  "mixture_slc",       "normal_known",        "normal_optimal",
    "normal_simple",    "spherical_custom",  "exponential_optimal", "exponential_simple",
    "rot_simple",       "rot_general",       "rot_alpha1",          "product_hoeffding",
    "product_bernstein", "product_chernoff", "product_legacy",      "dependent",
    "perturbed"};

const std::vector<std::string> kIff = {"ball_optimal", "normal_optimal", "spherical_custom",
                                       "exponential_optimal", "layer_optimal"};

double need(const std::optional<double> &v, const char *name, const std::string &theorem)
{
    if (!v)
        throw std::invalid_argument(theorem + ": missing parameter " + name);
    return *v;
}

void require_alpha_one(double alpha, const std::string &theorem)
{
    if (alpha != 1.0)
        throw HypothesisError(theorem + ": stated for alpha = 1 only");
}

// log of 1/2 + sqrt(1/4 + e^r)
double log_exact_m(double r)
{
    if (r < 0) return std::log(0.5 + std::sqrt(0.25 + std::exp(r)));
    return 0.5 * r + std::log(std::sqrt(1.0 + 0.25 * std::exp(-r)) + 0.5 * std::exp(-0.5 * r));
}

BoundResult from_log_m(const std::string &id, double log_m, BoundMode mode, MMode formula)
{
    BoundResult r;
    r.theorem_id = id;
    r.log10_M = log_m / kLn10;
    r.mode = mode;
    r.formula = formula;
    if (log_m < 53.0 * std::numbers::ln2) {
        const double m = std::exp(log_m);
        r.M_exact = static_cast<std::uint64_t>(std::floor(m));
    }
    if (log_m < 0) r.notes.push_back("vacuous: bound below 1");
    return r;
}

HoeffdingCenter hoeffding_center(const SeparabilityQuery &q, const TheoremParams &p,
                                 std::vector<std::string> &notes)
{
    HoeffdingCenter c;
    c.offset_sq = p.offset_sq.value_or(0.0);
    std::visit(
        [&](const auto &v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, OriginCenter>) {
                c.kind = CenterKind::arbitrary;
                c.c_prime = 1.0;
            } else if constexpr (std::is_same_v<T, CubeCenter>) {
                c.kind = CenterKind::cube_center;
            } else if constexpr (std::is_same_v<T, MeanCenter>) {
                c.kind = CenterKind::mean;
            } else {
                if (static_cast<int>(v.point.size()) != q.n)
                    throw std::invalid_argument("explicit center must have length n");
                c.kind = CenterKind::arbitrary;
                c.c_prime = 0.5;
                for (double x : v.point) {
                    if (!(x >= 0 && x <= 1))
                        throw std::domain_error("explicit center must lie in the unit cube");
                    c.c_prime = std::max(c.c_prime, std::max(x, 1.0 - x));
                }
            }
        },
        q.center);
    if (c.kind != CenterKind::mean && q.alpha < 1.0 && !p.offset_sq)
        notes.push_back("offset (1/n) sum (mu_i - c_i)^2 taken as 0");
    return c;
}

bool center_is_origin_or_mean(const Center &c)
{
    return std::holds_alternative<OriginCenter>(c) || std::holds_alternative<MeanCenter>(c);
}

std::optional<double> closed_b(const std::string &id, double alpha, const TheoremParams &p)
{
    const double a2 = alpha * alpha;
    if (id == "ball_known" || id == "ball_optimal" || id == "ball_simple") {
        if (id == "ball_known" || alpha >= std::sqrt(0.5)) return 0.5 * std::log(2.0 * alpha);
        return -0.25 * std::log1p(-a2);
    }
    if (id == "prototype" || id == "prototype_set") {
        if (!p.r) return std::nullopt;
        return 0.5 * std::log(2.0 * *p.r * alpha);
    }
    if (id == "normal_known" || id == "normal_optimal" || id == "normal_simple")
        return 0.25 * std::log1p(a2);
    if (id == "exponential_simple" || (id == "exponential_optimal" && alpha == 1.0))
        return std::log(std::pow(27.0, 0.25) / 2.0);
    if (id == "rot_simple") {
        const double r = (2.0 * alpha - 1.0) / (2.0 * alpha + 1.0);
        return r * r / 8.0;
    }
    if (id == "rot_alpha1") return 0.07;
    if (id == "slc" && p.gamma) return a2 * *p.gamma / (4.0 * (1.0 + alpha) * (1.0 + alpha));
    if (id == "slc_improved" && p.gamma) return a2 * *p.gamma / (4.0 * (1.0 + a2));
    if (id == "product_bernstein" && p.sigma0) {
        const double k = alpha >= 0.5 ? 24.0 * a2 / (12.0 * a2 + 13.0)
                                      : 6.0 * a2 / (2.0 * a2 + alpha + 3.0);
        return 0.5 * k * *p.sigma0 * *p.sigma0;
    }
    if (id == "dependent" && p.sigma0) {
        const double r = 4.0 * alpha / (2.0 * alpha + 1.0);
        const double g = *p.sigma0 * *p.sigma0 - 1.0 / (16.0 * a2);
        return std::pow(r, 4) * g * g;
    }
    if (id == "product_legacy" && p.sigma0) return std::pow(*p.sigma0, 4) / 4.0;
    if (id == "product_chernoff" && p.components.empty())
        return chernoff_gamma(p.component.value_or(Uniform01{}), alpha).gamma;
    return std::nullopt;
}

} // namespace

const char *to_string(MMode m) { return m == MMode::exact ? "exact" : "simple"; }

const char *to_string(BoundMode m)
{
    return m == BoundMode::exact_necessary_sufficient ? "exact_necessary_sufficient" : "sufficient";
}

double BoundResult::M() const { return std::pow(10.0, log10_M); }

const std::vector<std::string> &theorem_ids() { return kIds; }

bool is_iff_theorem(const std::string &id)
{
    return std::find(kIff.begin(), kIff.end(), id) != kIff.end();
}

BoundResult m_from_f(LogProb f, double delta, MMode mode)
{
    if (!(delta > 0 && delta < 1))
        throw std::domain_error("delta must lie in (0,1)");
    if (f.is_zero() || std::isnan(f.log_value))
        throw std::domain_error("m_from_f: f must be positive");
    const double r = std::log(delta) - f.log_value;
    const double lm = mode == MMode::exact ? log_exact_m(r) : 0.5 * r;
    auto res = from_log_m("", lm, BoundMode::sufficient, mode);
    res.log_f = f.log_value;
    if (f.log_value > 0) res.notes.push_back("two-point bound exceeds 1");
    return res;
}

std::optional<LogProb> two_point_log_f(const std::string &id, int n, double alpha,
                                       const TheoremParams &p)
{
    if (id == "ball_optimal") return ball_exact(n, alpha).f;
    if (id == "layer_optimal") return spherical_generic(n, alpha, spherical_layer_radial(need(p.R, "R", id))).f;
    if (id == "spherical_custom") {
        if (!p.radial) throw std::invalid_argument(id + ": missing radial model");
        return spherical_generic(n, alpha, *p.radial).f;
    }
    if (id == "normal_optimal") return normal_exact(n, alpha).f;
    if (id == "exponential_optimal") return exponential_exact(n, alpha).f;
    if (id == "rot_general") return rotgeneral_f(n, alpha).f;
    if (id == "rot_simple") return rotsimple_f(n, alpha).f;
    if (id == "slc" || id == "slc_improved")
        return slc_f(n, alpha, SlcParams{need(p.gamma, "gamma", id), p.mu, 0.0}, id == "slc_improved").f;
    if (id == "product_bernstein") return product_bernstein_f(n, alpha, need(p.sigma0, "sigma0", id)).f;
    if (id == "dependent") return dependent_f(n, alpha, need(p.sigma0, "sigma0", id)).f;
    return std::nullopt;
}

BoundResult bound(const SeparabilityQuery &q, const std::string &id, const TheoremParams &p)
{
    if (std::find(kIds.begin(), kIds.end(), id) == kIds.end())
        throw std::invalid_argument("unknown theorem id: " + id);
    if (q.n < 1)
        throw std::domain_error("n must be a positive integer");
    if (!(q.alpha > 0 && q.alpha <= 1))
        throw std::domain_error("alpha must lie in (0,1]");
    if (!(q.delta > 0 && q.delta < 1))
        throw std::domain_error("delta must lie in (0,1)");

    const int n = q.n;
    const double a = q.alpha, ld = std::log(q.delta);
    const bool iff = is_iff_theorem(id);
    const BoundMode bmode = iff ? BoundMode::exact_necessary_sufficient : BoundMode::sufficient;
    const MMode fmode = iff ? MMode::exact : p.mode_override.value_or(MMode::simple);
    std::vector<std::string> notes;

    auto direct = [&](double log_m) {
        auto r = from_log_m(id, log_m, bmode, MMode::simple);
        return r;
    };

    BoundResult res;
    bool done = false;
    if (id == "prototype" || id == "prototype_set") {
        const double r = need(p.r, "r", id), C = need(p.C, "C", id);
        if (!(a > 0.5))
            throw HypothesisError(id + ": requires alpha > 1/2");
        if (!(r < 1 && r > 1.0 / (2.0 * a)))
            throw HypothesisError(id + ": requires 1 > r > 1/(2 alpha)");
        if (!(C > 0))
            throw std::domain_error(id + ": C must be positive");
        const double lr = std::log(2.0 * r * a);
        res = direct(id == "prototype" ? ld + n * lr - std::log(C)
                                       : 0.5 * (ld - std::log(C)) + 0.5 * n * lr);
        done = true;
    } else if (id == "ball_known") {
        res = direct(0.5 * std::log(2.0 * q.delta) + 0.5 * n * std::log(2.0 * a));
        done = true;
    } else if (id == "ball_simple") {
        if (!(a < std::sqrt(0.5)))
            throw HypothesisError(id + ": requires alpha < 1/sqrt(2)");
        if (n <= 3)
            throw HypothesisError(id + ": requires n > 3");
        const double a2 = a * a;
        res = direct(0.25 * std::log(2.0 * kPi) + 0.5 * std::log(q.delta * a * (1.0 - 2.0 * a2))
                     + std::log(n - 3.0) - 0.75 * std::log(double(n))
                     - 0.25 * (n + 3.0) * std::log1p(-a2));
        done = true;
    } else if (id == "normal_known") {
        res = direct(0.5 * ld + 0.25 * n * std::log1p(a * a));
        done = true;
    } else if (id == "normal_simple") {
        const double a2 = a * a;
        res = direct(0.25 * std::log(2.0 * kPi * n * a2 * q.delta * q.delta / (1.0 + a2))
                     + 0.25 * n * std::log1p(a2));
        done = true;
    } else if (id == "exponential_simple") {
        require_alpha_one(a, id);
        res = direct(0.5 * ld + 0.25 * std::log(kPi * n) + n * std::log(std::pow(27.0, 0.25) / 2.0));
        notes.push_back("asymptotic form; not a rigorous bound at finite n");
        done = true;
    } else if (id == "rot_alpha1") {
        require_alpha_one(a, id);
        if (n > 4000)
            throw HypothesisError(id + ": stated for 1 <= n <= 4000");
        res = direct(0.5 * ld + 0.07 * n);
        done = true;
    } else if (id == "independent_slc" || id == "mixture_slc") {
        std::vector<SlcParams> pts = p.slc_points;
        if (pts.empty()) pts.push_back(SlcParams{need(p.gamma, "gamma", id), p.mu, 0.0});
        for (auto &pt : pts) {
            if (pt.mu) continue;
            if (!(pt.gamma * n > 1))
                throw HypothesisError(id + ": the norm estimate needs n > 1/gamma");
            pt.mu = std::sqrt(n - 1.0 / pt.gamma);
        }
        res = direct(0.5 * std::log(q.delta / 2.0) + indbound_exponent(pts, a));
        done = true;
    } else if (id == "product_legacy") {
        const double s = need(p.sigma0, "sigma0", id);
        const double L = 0.5 * std::log(q.delta / 3.0) + n * std::pow(s, 4) / 4.0;
        if (!(L > 0))
            throw HypothesisError(id + ": bound is not positive for these parameters");
        res = direct(L + log1m_exp(-L));
        done = true;
    } else if (id == "perturbed") {
        const double eps = need(p.epsilon, "epsilon", id);
        if (!(eps > 0 && eps < 1))
            throw std::domain_error(id + ": epsilon must lie in (0,1)");
        if (n < 2)
            throw std::domain_error(id + ": requires n >= 2");
        double lo = -50.0, hi = std::log(1e300);
        auto ok = [&](double lm) { return perturbed_probability_log(n, lm, eps).log_deficit <= ld; };
        if (!ok(lo))
            throw HypothesisError(id + ": no sample size reaches probability 1 - delta");
        if (ok(hi)) {
            lo = hi;
            notes.push_back("bound exceeds 1e300; search range exhausted");
        } else {
            for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, std::fabs(hi)); ++i) {
                const double mid = 0.5 * (lo + hi);
                (ok(mid) ? lo : hi) = mid;
            }
        }
        res = direct(lo);
        done = true;
    }

    if (!done) {
        std::optional<LogProb> f;
        if (id == "product_hoeffding") {
            const auto c = hoeffding_center(q, p, notes);
            f = product_hoeffding_f(n, a, need(p.sigma0, "sigma0", id), c).f;
        } else if (id == "product_chernoff") {
            double g;
            if (!p.components.empty()) {
                if (static_cast<int>(p.components.size()) != n)
                    throw std::invalid_argument(id + ": component list must have length n");
                g = chernoff_gamma_n(p.components, a);
            } else {
                g = n * chernoff_gamma(p.component.value_or(Uniform01{}), a).gamma;
            }
            f = LogProb{-2.0 * g};
        } else {
            f = two_point_log_f(id, n, a, p);
        }
        res = m_from_f(*f, q.delta, fmode);
        res.theorem_id = id;
        res.mode = bmode;
        if (id == "product_bernstein" && !std::holds_alternative<CubeCenter>(q.center) &&
            !std::holds_alternative<MeanCenter>(q.center))
            notes.push_back("assumes the mean sits at the cube center");
        if (id == "dependent" && !std::holds_alternative<CubeCenter>(q.center))
            notes.push_back("bound is for the cube center");
    }

    if (!center_is_origin_or_mean(q.center) && id != "product_hoeffding" && id != "product_bernstein" &&
        id != "dependent")
        notes.push_back("center ignored; theorem is stated about the distribution's center");
    res.notes.insert(res.notes.end(), notes.begin(), notes.end());
    res.b_exponent = closed_b(id, a, p);
    if (id == "product_hoeffding" && p.sigma0) {
        if (res.log_f) res.b_exponent = -*res.log_f / (2.0 * n);
    }
    return res;
}

PerturbedResult perturbed_probability_log(int n, double log_m, double epsilon)
{
    if (n < 2)
        throw std::domain_error("perturbed: requires n >= 2");
    if (!(epsilon > 0 && epsilon < 1))
        throw std::domain_error("perturbed: epsilon must lie in (0,1)");
    const double nn = n;
    auto log_d = [&](double th) {
        const double t1 = std::numbers::ln2 + 2.0 * log_m - std::log(th) - 0.5 * std::log(nn)
                        + 0.5 * (nn + 1.0) * std::log1p(-th * th);
        const double t2 = log_m + nn * std::log(2.0 * th / epsilon);
        return log_add(th >= 1.0 ? kNegInf : t1, t2);
    };
    const double lo = 1.0 / std::sqrt(nn), hi = 1.0;
    const auto r = maximize_unimodal([&](double th) { return -log_d(th); }, lo, hi, 1e-13);
    const double ldf = -r.max_value;
    return {-std::expm1(ldf), ldf, r.argmax};
}

PerturbedResult perturbed_probability(int n, double M, double epsilon)
{
    if (!(M >= 1))
        throw std::domain_error("perturbed: requires M >= 1");
    return perturbed_probability_log(n, std::log(M), epsilon);
}

namespace {

double exponent_log_f(const std::string &id, int n, double alpha, const TheoremParams &p)
{
    if (id == "product_hoeffding") {
        SeparabilityQuery q{n, alpha, 0.01, CubeCenter{}};
        std::vector<std::string> notes;
        return product_hoeffding_f(n, alpha, need(p.sigma0, "sigma0", id), hoeffding_center(q, p, notes))
            .f.log_value;
    }
    auto f = two_point_log_f(id, n, alpha, p);
    if (!f) throw std::invalid_argument(id + ": exponent b is not available");
    return f->log_value;
}

void check_exponent_id(const std::string &id)
{
    if (std::find(kIds.begin(), kIds.end(), id) == kIds.end())
        throw std::invalid_argument("unknown theorem id: " + id);
    if (id == "perturbed" || id == "independent_slc" || id == "mixture_slc")
        throw std::invalid_argument(id + ": exponent b is not defined");
}

} // namespace

double exponent_b_at(const std::string &id, int n, double alpha, const TheoremParams &p)
{
    check_exponent_id(id);
    if (n < 1) throw std::domain_error("exponent_b_at: n must be positive");
    return -exponent_log_f(id, n, alpha, p) / (2.0 * n);
}

double exponent_b(const std::string &id, double alpha, const TheoremParams &p)
{
    check_exponent_id(id);
    if (auto b = closed_b(id, alpha, p)) return *b;

    // b_n = b + c log(n)/n + d/n through three points
    const double ns[3] = {500, 1000, 2000};
    Eigen::Matrix3d A;
    Eigen::Vector3d y;
    for (int i = 0; i < 3; ++i) {
        const double n = ns[i];
        A.row(i) << 1.0, std::log(n) / n, 1.0 / n;
        y(i) = -exponent_log_f(id, static_cast<int>(n), alpha, p) / (2.0 * n);
    }
    return A.colPivHouseholderQr().solve(y)(0);
}

} // namespace sepbound
