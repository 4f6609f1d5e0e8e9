#include "sepbound/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

namespace sepbound {

namespace {

constexpr std::uint64_t kTwoPointBlock = 1 << 16;

double sample_component(const ComponentSpec &c, std::mt19937_64 &rng)
{
    return std::visit(
        [&rng](const auto &v) -> double {
            using T = std::decay_t<decltype(v)>;
            std::uniform_real_distribution<double> u(0.0, 1.0);
            if constexpr (std::is_same_v<T, Uniform01>) {
                return u(rng);
            } else if constexpr (std::is_same_v<T, SymmetricBernoulli>) {
                return u(rng) < 0.5 ? 0.0 : 1.0;
            } else if constexpr (std::is_same_v<T, ThreePoint>) {
                const double p = 2.0 * v.sigma0 * v.sigma0, r = u(rng);
                return r < p ? 0.0 : (r < 1.0 - p ? 0.5 : 1.0);
            } else if constexpr (std::is_same_v<T, Laplace>) {
                std::exponential_distribution<double> e(1.0 / v.scale);
                return u(rng) < 0.5 ? -e(rng) : e(rng);
            } else if constexpr (std::is_same_v<T, StandardNormal>) {
                return std::normal_distribution<double>(0.0, 1.0)(rng);
            } else {
                // inverse CDF of the piecewise-linear density
                const auto &x = v.x;
                const auto &d = v.density;
                std::vector<double> cum(x.size(), 0.0);
                for (std::size_t i = 0; i + 1 < x.size(); ++i)
                    cum[i + 1] = cum[i] + 0.5 * (x[i + 1] - x[i]) * (d[i] + d[i + 1]);
                const double target = u(rng) * cum.back();
                std::size_t i = std::upper_bound(cum.begin(), cum.end(), target) - cum.begin();
                i = std::clamp<std::size_t>(i, 1, x.size() - 1) - 1;
                const double h = x[i + 1] - x[i], r = target - cum[i];
                const double slope = (d[i + 1] - d[i]) / h;
                double s;
                if (std::fabs(slope) * h < 1e-12 * std::max(d[i], 1e-300)) {
                    s = d[i] > 0 ? r / d[i] : 0.5 * h;
                } else {
                    // d_i s + slope s^2 / 2 = r
                    const double disc = std::max(0.0, d[i] * d[i] + 2.0 * slope * r);
                    s = 2.0 * r / (d[i] + std::sqrt(disc));
                }
                return x[i] + std::clamp(s, 0.0, h);
            }
        },
        c);
}

void fill_direction(Eigen::Ref<Eigen::VectorXd> v, std::mt19937_64 &rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    double nrm = 0.0;
    do {
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = g(rng);
        nrm = v.norm();
    } while (nrm == 0.0);
    v /= nrm;
}

double inverse_normal_two_sided(double confidence)
{
    // solve erf(z / sqrt 2) = confidence by Newton steps
    double z = 2.0;
    for (int i = 0; i < 50; ++i) {
        const double f = std::erf(z / std::numbers::sqrt2) - confidence;
        const double df = std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * z * z);
        const double step = f / df;
        z -= step;
        if (std::fabs(step) < 1e-15) break;
    }
    return z;
}

unsigned worker_count(const McOptions &opt, std::uint64_t tasks)
{
    unsigned w = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::uint64_t>(w, std::max<std::uint64_t>(tasks, 1)));
}

template <class F>
void parallel_for(std::uint64_t tasks, unsigned workers, F &&body)
{
    std::atomic<std::uint64_t> next{0};
    auto run = [&] {
        for (std::uint64_t t; (t = next.fetch_add(1)) < tasks;) body(t);
    };
    if (workers <= 1) {
        run();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(run);
    for (auto &th : pool) th.join();
}

Eigen::MatrixXd perturbed_bases(const dist::PerturbedModel &p, int n, std::size_t count)
{
    Eigen::MatrixXd b(n, count);
    for (std::size_t i = 0; i < count; ++i) b.col(i) = p.base_points[i % p.base_points.size()];
    return b;
}

} // namespace

std::string describe(const DistributionSpec &spec)
{
    return std::visit(
        [](const auto &v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, dist::UniformBall>) return "uniform ball";
            else if constexpr (std::is_same_v<T, dist::SphericalLayer>) return "spherical layer R=" + std::to_string(v.R);
            else if constexpr (std::is_same_v<T, dist::StandardNormal>) return "standard normal";
            else if constexpr (std::is_same_v<T, dist::SphericalExponential>) return "spherical exponential";
            else if constexpr (std::is_same_v<T, dist::SphericalRadial>) return "spherical (custom radius)";
            else if constexpr (std::is_same_v<T, dist::UniformCube>) return "uniform cube";
            else if constexpr (std::is_same_v<T, dist::ProductIID>) return "product of " + component_name(v.component);
            else if constexpr (std::is_same_v<T, dist::ProductGeneral>) return "product (mixed components)";
            else if constexpr (std::is_same_v<T, dist::GaussianSLC>) return "gaussian gamma=" + std::to_string(v.gamma);
            else if constexpr (std::is_same_v<T, dist::SlcMixture>) return "gaussian mixture";
            else if constexpr (std::is_same_v<T, dist::LaplaceProduct>) return "laplace product";
            else if constexpr (std::is_same_v<T, dist::PerturbedModel>) return "perturbed eps=" + std::to_string(v.epsilon);
            else return "dependent half cube";
        },
        spec);
}

void validate(const DistributionSpec &spec, int n)
{
    if (n < 1)
        throw std::invalid_argument("dimension must be positive");
    std::visit(
        [n](const auto &v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, dist::SphericalLayer>) {
                if (!(v.R > 0 && v.R < 1))
                    throw std::invalid_argument("spherical layer: R must lie in (0,1)");
            } else if constexpr (std::is_same_v<T, dist::SphericalRadial>) {
                if (!v.radius)
                    throw std::invalid_argument("spherical radial: radius sampler missing");
            } else if constexpr (std::is_same_v<T, dist::ProductIID>) {
                if (auto *t = std::get_if<ThreePoint>(&v.component); t && !(t->sigma0 >= 0 && t->sigma0 <= 0.5))
                    throw std::invalid_argument("three-point component: sigma0 must lie in [0, 1/2]");
                component_variance(v.component);
            } else if constexpr (std::is_same_v<T, dist::ProductGeneral>) {
                if (static_cast<int>(v.components.size()) != n)
                    throw std::invalid_argument("product: need one component per coordinate");
                for (const auto &c : v.components) component_variance(c);
            } else if constexpr (std::is_same_v<T, dist::GaussianSLC>) {
                if (!(v.gamma > 0))
                    throw std::invalid_argument("gaussian: gamma must be positive");
            } else if constexpr (std::is_same_v<T, dist::SlcMixture>) {
                const auto k = v.weights.size();
                if (k == 0 || v.means.size() != k || v.gammas.size() != k)
                    throw std::invalid_argument("mixture: weights, means and gammas must have equal length");
                double s = 0.0;
                for (std::size_t i = 0; i < k; ++i) {
                    if (!(v.weights[i] >= 0) || !(v.gammas[i] > 0) || v.means[i].size() != n)
                        throw std::invalid_argument("mixture: invalid component");
                    s += v.weights[i];
                }
                if (std::fabs(s - 1.0) > 1e-9)
                    throw std::invalid_argument("mixture: weights must sum to 1");
            } else if constexpr (std::is_same_v<T, dist::PerturbedModel>) {
                if (!(v.epsilon > 0 && v.epsilon < 1))
                    throw std::invalid_argument("perturbed: epsilon must lie in (0,1)");
                if (v.base_points.empty())
                    throw std::invalid_argument("perturbed: base points missing");
                for (const auto &b : v.base_points)
                    if (b.size() != n || b.norm() > 1.0 - v.epsilon)
                        throw std::invalid_argument("perturbed: base points must lie in the ball of radius 1-eps");
            }
        },
        spec);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t key)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32), 0x5eb0u};
    return std::mt19937_64(seq);
}

Eigen::MatrixXd sample_points(const DistributionSpec &spec, int n, std::size_t count, std::mt19937_64 &rng)
{
    validate(spec, n);
    Eigen::MatrixXd out(n, static_cast<Eigen::Index>(count));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    std::visit(
        [&](const auto &v) {
            using T = std::decay_t<decltype(v)>;
            for (std::size_t k = 0; k < count; ++k) {
                auto col = out.col(static_cast<Eigen::Index>(k));
                if constexpr (std::is_same_v<T, dist::UniformBall>) {
                    fill_direction(col, rng);
                    col *= std::exp(std::log(u(rng)) / n);
                } else if constexpr (std::is_same_v<T, dist::SphericalLayer>) {
                    fill_direction(col, rng);
                    const double rn = std::pow(v.R, n);
                    col *= std::pow(rn + u(rng) * (1.0 - rn), 1.0 / n);
                } else if constexpr (std::is_same_v<T, dist::StandardNormal>) {
                    for (int i = 0; i < n; ++i) col(i) = g(rng);
                } else if constexpr (std::is_same_v<T, dist::SphericalExponential>) {
                    fill_direction(col, rng);
                    col *= std::gamma_distribution<double>(n, 1.0)(rng);
                } else if constexpr (std::is_same_v<T, dist::SphericalRadial>) {
                    fill_direction(col, rng);
                    col *= v.radius(rng, n);
                } else if constexpr (std::is_same_v<T, dist::UniformCube>) {
                    for (int i = 0; i < n; ++i) col(i) = u(rng);
                } else if constexpr (std::is_same_v<T, dist::ProductIID>) {
                    for (int i = 0; i < n; ++i) col(i) = sample_component(v.component, rng);
                } else if constexpr (std::is_same_v<T, dist::ProductGeneral>) {
                    for (int i = 0; i < n; ++i) col(i) = sample_component(v.components[i], rng);
                } else if constexpr (std::is_same_v<T, dist::GaussianSLC>) {
                    const double s = 1.0 / std::sqrt(v.gamma);
                    for (int i = 0; i < n; ++i) col(i) = s * g(rng);
                } else if constexpr (std::is_same_v<T, dist::SlcMixture>) {
                    std::discrete_distribution<std::size_t> pick(v.weights.begin(), v.weights.end());
                    const std::size_t c = pick(rng);
                    const double s = 1.0 / std::sqrt(v.gammas[c]);
                    for (int i = 0; i < n; ++i) col(i) = v.means[c](i) + s * g(rng);
                } else if constexpr (std::is_same_v<T, dist::LaplaceProduct>) {
                    std::exponential_distribution<double> e(std::numbers::sqrt2);
                    for (int i = 0; i < n; ++i) col(i) = u(rng) < 0.5 ? -e(rng) : e(rng);
                } else if constexpr (std::is_same_v<T, dist::PerturbedModel>) {
                    fill_direction(col, rng);
                    col *= v.epsilon * std::exp(std::log(u(rng)) / n);
                    col += v.base_points[k % v.base_points.size()];
                } else {
                    if (k % 2 == 0) {
                        for (int i = 0; i < n; ++i) col(i) = u(rng) < 0.5 ? 0.0 : 1.0;
                    } else {
                        const auto y = out.col(static_cast<Eigen::Index>(k - 1));
                        for (int i = 0; i < n; ++i) col(i) = u(rng) < 0.5 ? 0.5 : y(i);
                    }
                }
            }
        },
        spec);
    return out;
}

BudgetError::BudgetError(double req, double lim)
    : std::runtime_error("compute budget exceeded: trials*M^2 = " + std::to_string(req) +
                         " exceeds the limit " + std::to_string(lim) + " (set SEPBOUND_MAX_BUDGET)"),
      required(req), limit(lim)
{
}

double max_budget(const McOptions &opt)
{
    if (opt.budget) return *opt.budget;
    if (const char *env = std::getenv("SEPBOUND_MAX_BUDGET")) {
        char *end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v > 0) return v;
    }
    return 1e13;
}

MCEstimate wilson(std::uint64_t hits, std::uint64_t trials, double confidence)
{
    if (trials == 0)
        throw std::invalid_argument("wilson: no trials");
    if (!(confidence > 0 && confidence < 1))
        throw std::invalid_argument("wilson: confidence must lie in (0,1)");
    const double N = static_cast<double>(trials), p = hits / N;
    const double z = inverse_normal_two_sided(confidence), z2 = z * z;
    const double den = 1.0 + z2 / N;
    const double centre = (p + z2 / (2.0 * N)) / den;
    const double half = z / den * std::sqrt(p * (1.0 - p) / N + z2 / (4.0 * N * N));
    MCEstimate e;
    e.trials = trials;
    e.hits = hits;
    e.p_hat = p;
    e.ci_low = std::clamp(std::min(centre - half, p), 0.0, 1.0);
    e.ci_high = std::clamp(std::max(centre + half, p), 0.0, 1.0);
    e.confidence = confidence;
    return e;
}

MCEstimate estimate_two_point(const DistributionSpec &spec, int n, double alpha, const Eigen::VectorXd &c,
                              std::uint64_t trials, std::uint64_t seed, const McOptions &opt)
{
    validate(spec, n);
    if (trials == 0)
        throw std::invalid_argument("estimate_two_point: trials must be positive");
    if (c.size() != 0 && c.size() != n)
        throw std::invalid_argument("estimate_two_point: center dimension mismatch");
    const Eigen::VectorXd centre = c.size() ? c : Eigen::VectorXd::Zero(n);
    const bool dependent = std::holds_alternative<dist::DependentHalfCube>(spec);
    const std::uint64_t blocks = (trials + kTwoPointBlock - 1) / kTwoPointBlock;
    std::vector<std::uint64_t> hits(blocks, 0);
    parallel_for(blocks, worker_count(opt, blocks), [&](std::uint64_t b) {
        auto rng = make_stream(seed, b);
        const std::uint64_t m = std::min(kTwoPointBlock, trials - b * kTwoPointBlock);
        const Eigen::MatrixXd pts = sample_points(spec, n, 2 * m, rng);
        std::uint64_t h = 0;
        for (std::uint64_t t = 0; t < m; ++t) {
            // for the dependent model column 2t is y and 2t+1 the x built from it
            const auto x = pts.col(2 * t + (dependent ? 1 : 0));
            const auto y = pts.col(2 * t + (dependent ? 0 : 1));
            h += is_inseparable_ordered(x, y, alpha, centre);
        }
        hits[b] = h;
    });
    std::uint64_t total = 0;
    for (auto h : hits) total += h;
    auto e = wilson(total, trials, opt.confidence);
    e.seed = seed;
    return e;
}

SetEstimate estimate_set_separability(const DistributionSpec &spec, int n, std::size_t M, double alpha,
                                      const Eigen::VectorXd &c, std::uint64_t trials, std::uint64_t seed,
                                      const McOptions &opt)
{
    validate(spec, n);
    if (M < 2)
        throw std::invalid_argument("estimate_set_separability: need M >= 2");
    if (trials == 0)
        throw std::invalid_argument("estimate_set_separability: trials must be positive");
    if (c.size() != 0 && c.size() != n)
        throw std::invalid_argument("estimate_set_separability: center dimension mismatch");
    const double need = static_cast<double>(trials) * static_cast<double>(M) * static_cast<double>(M);
    const double limit = max_budget(opt);
    if (need > limit) throw BudgetError(need, limit);

    const auto *perturbed = std::get_if<dist::PerturbedModel>(&spec);
    const Eigen::MatrixXd bases = perturbed ? perturbed_bases(*perturbed, n, M) : Eigen::MatrixXd();
    std::vector<std::uint64_t> counts(trials, 0);
    parallel_for(trials, worker_count(opt, trials), [&](std::uint64_t t) {
        auto rng = make_stream(seed, t);
        const Eigen::MatrixXd pts = sample_points(spec, n, M, rng);
        counts[t] = perturbed ? count_perturbed_inseparable_pairs(pts, bases, alpha)
                              : count_inseparable_pairs(pts, alpha, c);
    });
    std::uint64_t separable = 0;
    double sum = 0.0, sum2 = 0.0;
    for (auto k : counts) {
        separable += (k == 0);
        sum += static_cast<double>(k);
        sum2 += static_cast<double>(k) * static_cast<double>(k);
    }
    SetEstimate r;
    r.p_separable = wilson(separable, trials, opt.confidence);
    r.p_separable.seed = seed;
    const double T = static_cast<double>(trials);
    r.mean_inseparable_pairs = sum / T;
    r.stderr_pairs = trials > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * sum / T) / (T - 1.0)) / T) : 0.0;
    return r;
}

} // namespace sepbound
