#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "sepbound/twopoint.hpp"

namespace sepbound {

namespace dist {
struct UniformBall {};
struct SphericalLayer {
    double R = 0.5;
};
struct StandardNormal {};
struct SphericalExponential {};
struct SphericalRadial {
    std::function<double(std::mt19937_64 &, int)> radius; // draws ||x|| for dimension n
};
struct UniformCube {};
struct ProductIID {
    ComponentSpec component;
};
struct ProductGeneral {
    std::vector<ComponentSpec> components;
};
struct GaussianSLC {
    double gamma = 1.0;
};
struct SlcMixture {
    std::vector<double> weights;
    std::vector<Eigen::VectorXd> means;
    std::vector<double> gammas;
};
struct LaplaceProduct {};
// x_i uniform in the epsilon-ball around base point y_i (cycled when fewer than requested)
struct PerturbedModel {
    double epsilon = 0.1;
    std::vector<Eigen::VectorXd> base_points;
};
// columns come in (y, x) pairs: y a cube vertex, x a vertex of the cube spanned by the center and y
struct DependentHalfCube {};
} // namespace dist

using DistributionSpec =
    std::variant<dist::UniformBall, dist::SphericalLayer, dist::StandardNormal, dist::SphericalExponential,
                 dist::SphericalRadial, dist::UniformCube, dist::ProductIID, dist::ProductGeneral,
                 dist::GaussianSLC, dist::SlcMixture, dist::LaplaceProduct, dist::PerturbedModel,
                 dist::DependentHalfCube>;

std::string describe(const DistributionSpec &spec);
void validate(const DistributionSpec &spec, int n);

// Stream for (seed, key): distinct keys give independent generators.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t key);

// n x count matrix, one point per column
Eigen::MatrixXd sample_points(const DistributionSpec &spec, int n, std::size_t count, std::mt19937_64 &rng);

template <class Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sample(const DistributionSpec &spec, int n,
                                                             std::size_t count, std::uint64_t seed)
{
    auto rng = make_stream(seed, 0);
    return sample_points(spec, n, count, rng).template cast<Scalar>();
}

// alpha (x-c, x-c) <= (x-c, y-c): the Fisher inequality fails for the ordered pair (x, y)
template <class DX, class DY, class DC>
bool is_inseparable_ordered(const Eigen::MatrixBase<DX> &x, const Eigen::MatrixBase<DY> &y,
                            typename DX::Scalar alpha, const Eigen::MatrixBase<DC> &c)
{
    if (x.size() != y.size() || x.size() != c.size())
        throw std::invalid_argument("is_inseparable_ordered: dimension mismatch");
    const auto xc = (x - c).eval();
    return alpha * xc.squaredNorm() <= xc.dot(y - c);
}

template <class DX, class DY>
bool is_inseparable_ordered(const Eigen::MatrixBase<DX> &x, const Eigen::MatrixBase<DY> &y,
                            typename DX::Scalar alpha)
{
    return is_inseparable_ordered(x, y, alpha, DX::PlainObject::Zero(x.rows(), x.cols()));
}

// Ordered pairs (i, j), i != j, with column i inseparable from column j.
// c may be empty for the origin.
std::uint64_t count_inseparable_pairs(const Eigen::MatrixXd &points, double alpha,
                                      const Eigen::VectorXd &c = {});

// Variant for the perturbed model: alpha (x_i - y_i, x_i - y_i) <= (x_i - y_i, x_j - y_i).
std::uint64_t count_perturbed_inseparable_pairs(const Eigen::MatrixXd &points, const Eigen::MatrixXd &bases,
                                                double alpha);

struct MCEstimate {
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t seed = 0;
    double confidence = 0.997;

    bool contains(double p) const { return ci_low <= p && p <= ci_high; }
};

MCEstimate wilson(std::uint64_t hits, std::uint64_t trials, double confidence);

struct SetEstimate {
    MCEstimate p_separable;
    double mean_inseparable_pairs = 0.0;
    double stderr_pairs = 0.0;
};

struct BudgetError : std::runtime_error {
    double required, limit;
    BudgetError(double req, double lim);
};

struct McOptions {
    unsigned workers = 0; // 0: hardware concurrency
    double confidence = 0.997;
    std::optional<double> budget; // trials * M^2; defaults to SEPBOUND_MAX_BUDGET or 1e13
};

constexpr std::uint64_t kDefaultSeed = 20190901;

double max_budget(const McOptions &opt);

MCEstimate estimate_two_point(const DistributionSpec &spec, int n, double alpha, const Eigen::VectorXd &c,
                              std::uint64_t trials, std::uint64_t seed, const McOptions &opt = {});

SetEstimate estimate_set_separability(const DistributionSpec &spec, int n, std::size_t M, double alpha,
                                      const Eigen::VectorXd &c, std::uint64_t trials, std::uint64_t seed,
                                      const McOptions &opt = {});

} // namespace sepbound
