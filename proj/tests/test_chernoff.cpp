#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "sepbound/twopoint.hpp"

using namespace sepbound;

namespace {

// Exact P[alpha |x-c|^2 <= (x-c, y-c)] for i.i.d. product laws on a finite grid, c = 1/2,
// by enumerating all pairs of lattice points.
double enumerate_pair_probability(const std::vector<double> &atoms, const std::vector<double> &probs, int n,
                                  double alpha)
{
    const int k = static_cast<int>(atoms.size());
    int total = 1;
    for (int i = 0; i < n; ++i) total *= k;
    std::vector<std::vector<double>> pts(total, std::vector<double>(n));
    std::vector<double> w(total, 1.0);
    for (int idx = 0; idx < total; ++idx) {
        int r = idx;
        for (int d = 0; d < n; ++d, r /= k) {
            pts[idx][d] = atoms[r % k] - 0.5;
            w[idx] *= probs[r % k];
        }
    }
    double p = 0.0;
    for (int i = 0; i < total; ++i) {
        double xx = 0.0;
        for (double v : pts[i]) xx += v * v;
        for (int j = 0; j < total; ++j) {
            double xy = 0.0;
            for (int d = 0; d < n; ++d) xy += pts[i][d] * pts[j][d];
            if (alpha * xx <= xy) p += w[i] * w[j];
        }
    }
    return p;
}

} // namespace

TEST(Chernoff, UniformConstant)
{
    const auto r = chernoff_gamma(Uniform01{}, 1.0);
    EXPECT_NEAR(r.gamma, 0.23319, 1e-5);
    EXPECT_GT(r.lambda_star, 0.0);
}

TEST(Chernoff, NormalClosedForm)
{
    for (double a : {0.3, 0.6, 1.0}) {
        const auto r = chernoff_gamma(StandardNormal{}, a);
        EXPECT_NEAR(r.gamma, 0.25 * std::log1p(a * a), 1e-9) << a;
        EXPECT_NEAR(r.lambda_star, a, 1e-6) << a;
        EXPECT_NEAR(r.c_star, 1.0 / (1.0 + a * a), 1e-4) << a;
    }
}

TEST(Chernoff, SymmetricBernoulli)
{
    EXPECT_NEAR(chernoff_gamma(SymmetricBernoulli{}, 1.0).gamma, 0.5 * std::log(2.0), 1e-9);
}

TEST(Chernoff, TabulatedUniformMatchesUniform)
{
    TabulatedDensity t;
    for (int i = 0; i <= 20; ++i) {
        t.x.push_back(i / 20.0);
        t.density.push_back(1.0);
    }
    EXPECT_NEAR(chernoff_gamma(t, 1.0).gamma, chernoff_gamma(Uniform01{}, 1.0).gamma, 1e-8);
}

TEST(Chernoff, LaplaceHasNoFiniteRate)
{
    EXPECT_THROW(chernoff_gamma(Laplace{}, 1.0), std::domain_error);
}

TEST(Chernoff, SumOverComponents)
{
    std::vector<ComponentSpec> mix{Uniform01{}, SymmetricBernoulli{}, Uniform01{}};
    // one lambda serves every coordinate, so the rate is at most the sum of the separate optima
    const double g = chernoff_gamma_n(mix, 1.0);
    const double gu = chernoff_gamma(Uniform01{}, 1.0).gamma, gb = chernoff_gamma(SymmetricBernoulli{}, 1.0).gamma;
    EXPECT_LE(g, 2 * gu + gb + 1e-12);
    EXPECT_GT(g, 2 * gu + gb - 1e-3);
    std::vector<ComponentSpec> same(7, Uniform01{});
    EXPECT_NEAR(chernoff_gamma_n(same, 1.0), 7 * gu, 1e-10);
}

TEST(Chernoff, LogMgfIsZeroAtOrigin)
{
    for (const ComponentSpec &c : {ComponentSpec{Uniform01{}}, ComponentSpec{ThreePoint{0.3}},
                                   ComponentSpec{StandardNormal{}}})
        EXPECT_NEAR(chernoff_log_mgf(c, 0.0, 0.7), 0.0, 1e-14);
}

TEST(ProductBounds, DominateEnumeratedBernoulli)
{
    const int n = 8;
    for (double a : {0.6, 0.8, 1.0}) {
        const double exact = enumerate_pair_probability({0.0, 1.0}, {0.5, 0.5}, n, a);
        const double lexact = std::log(exact);
        EXPECT_GE(-2.0 * n * chernoff_gamma(SymmetricBernoulli{}, a).gamma, lexact - 1e-12) << a;
        EXPECT_GE(product_bernstein_f(n, a, 0.5).f.log_value, lexact) << a;
        EXPECT_GE(product_hoeffding_f(n, a, 0.5, HoeffdingCenter{CenterKind::cube_center, 0.5, 0.0}).f.log_value,
                  lexact)
            << a;
    }
}

TEST(ProductBounds, DominateEnumeratedThreePoint)
{
    const int n = 6;
    const double s = 0.35, p = 2.0 * s * s;
    for (double a : {0.7, 1.0}) {
        const double exact = enumerate_pair_probability({0.0, 0.5, 1.0}, {p, 1.0 - 2.0 * p, p}, n, a);
        const double lexact = std::log(exact);
        EXPECT_GE(-2.0 * n * chernoff_gamma(ThreePoint{s}, a).gamma, lexact - 1e-12) << a;
        EXPECT_GE(product_bernstein_f(n, a, s).f.log_value, lexact) << a;
    }
}
