#include <cmath>

#include <gtest/gtest.h>

#include "sepbound/bounds.hpp"

using namespace sepbound;

namespace {

double M_of(const std::string &id, int n, double alpha, const TheoremParams &p = {}, Center c = OriginCenter{})
{
    return bound(SeparabilityQuery{n, alpha, 0.01, c}, id, p).M();
}

TheoremParams sigma(double s)
{
    TheoremParams p;
    p.sigma0 = s;
    return p;
}

void expect_rel(double got, double want, double tol)
{
    EXPECT_LE(std::fabs(got / want - 1.0), tol) << "got " << got << " want " << want;
}

} // namespace

TEST(Bounds, NormalExampleTriple)
{
    expect_rel(M_of("normal_known", 100, 0.9), 276671, 1e-3);
    expect_rel(M_of("normal_simple", 100, 0.9), 1132950, 1e-2);
    expect_rel(M_of("normal_optimal", 100, 0.9), 1141060, 1e-2);
}

TEST(Bounds, BallExamplePair)
{
    expect_rel(M_of("ball_simple", 200, 0.5), 642645, 1e-2);
    expect_rel(M_of("ball_optimal", 200, 0.5), 661243, 1e-2);
}

TEST(Bounds, ProductExamples)
{
    expect_rel(M_of("product_legacy", 500, 1.0, sigma(0.5)), 141.7, 1e-3);
    expect_rel(M_of("product_hoeffding", 500, 1.0, sigma(0.5)), 48516519, 1e-3);
    expect_rel(M_of("product_hoeffding", 100, 1.0, sigma(0.5), CubeCenter{}), 37901503, 1e-3);
    expect_rel(M_of("product_hoeffding", 500, 0.9, sigma(0.5), MeanCenter{}), 8411607, 1e-3);
    expect_rel(M_of("product_bernstein", 1000, 1.0, sigma(0.2), CubeCenter{}), 21799877, 1e-3);
}

TEST(Bounds, RotAlphaOneExample) { expect_rel(M_of("rot_alpha1", 400, 1.0), 144625706429.0, 1e-3); }

TEST(Bounds, TableSpotValues)
{
    TheoremParams proto;
    proto.r = 0.75;
    proto.C = 1.0;
    expect_rel(M_of("prototype", 100, 0.8, proto), 828180, 1e-3);
    expect_rel(M_of("prototype_set", 100, 0.8, proto), 910, 1e-3);
    expect_rel(M_of("ball_known", 100, 1.0), 1.6e14, 0.05);
    TheoremParams g;
    g.gamma = 0.6;
    expect_rel(M_of("slc_improved", 500, 1.0, g), 4.3e14, 0.05);
    TheoremParams d = sigma(0.45);
    expect_rel(M_of("dependent", 1000, 1.0, d, CubeCenter{}), 8e25, 0.1);
}

TEST(Bounds, IffTheoremsUseExactFormula)
{
    const auto r = bound(SeparabilityQuery{50, 1.0, 0.01}, "ball_optimal");
    EXPECT_EQ(r.mode, BoundMode::exact_necessary_sufficient);
    EXPECT_EQ(r.formula, MMode::exact);
    const auto s = bound(SeparabilityQuery{50, 0.5, 0.01}, "ball_simple");
    EXPECT_EQ(s.mode, BoundMode::sufficient);
    EXPECT_EQ(s.formula, MMode::simple);
}

TEST(Bounds, MFromF)
{
    // f = delta: M(M-1) = 1
    const auto r = m_from_f(LogProb{std::log(0.01)}, 0.01, MMode::exact);
    EXPECT_NEAR(r.M(), 1.6180339887, 1e-9);
    const auto s = m_from_f(LogProb{std::log(1e-6)}, 0.01, MMode::simple);
    EXPECT_NEAR(s.M(), 100.0, 1e-9);
    EXPECT_THROW(m_from_f(LogProb{-1.0}, 0.0, MMode::simple), std::domain_error);
    EXPECT_THROW(m_from_f(LogProb{-1.0}, 1.0, MMode::simple), std::domain_error);
}

TEST(Bounds, ExponentClosedForms)
{
    EXPECT_NEAR(exponent_b("ball_optimal", 1.0), 0.5 * std::log(2.0), 5e-5);
    EXPECT_NEAR(exponent_b("normal_optimal", 1.0), 0.25 * std::log(2.0), 5e-5);
    EXPECT_NEAR(exponent_b("exponential_optimal", 1.0), std::log(std::pow(27.0, 0.25) / 2.0), 5e-5);
    EXPECT_NEAR(exponent_b("exponential_optimal", 1.0), 0.1308, 5e-5);
    TheoremParams g;
    g.gamma = 1.0;
    EXPECT_NEAR(exponent_b("slc", 1.0, g), 1.0 / 16, 5e-5);
    EXPECT_NEAR(exponent_b("slc_improved", 1.0, g), 1.0 / 8, 5e-5);
}

TEST(Bounds, ExponentFromFiniteN)
{
    TheoremParams g;
    g.gamma = 1.0;
    for (const char *id : {"ball_optimal", "normal_optimal", "exponential_optimal"})
        expect_rel(exponent_b_at(id, 2000, 1.0), exponent_b(id, 1.0), 0.02);
    for (const char *id : {"slc", "slc_improved"})
        expect_rel(exponent_b_at(id, 2000, 1.0, g), exponent_b(id, 1.0, g), 0.02);
    EXPECT_THROW(exponent_b_at("ball_optimal", 0, 1.0), std::domain_error);
    EXPECT_THROW(exponent_b("no_such_theorem", 1.0), std::invalid_argument);
}

TEST(Bounds, Errors)
{
    EXPECT_THROW(bound(SeparabilityQuery{10, 1.0, 0.01}, "no_such_theorem"), std::invalid_argument);
    EXPECT_THROW(bound(SeparabilityQuery{10, 1.0, 0.01}, "slc"), std::invalid_argument);
    TheoremParams g;
    g.gamma = 1.0;
    // n > 1/gamma fails
    EXPECT_THROW(bound(SeparabilityQuery{1, 1.0, 0.01}, "slc", g), HypothesisError);
    EXPECT_THROW(bound(SeparabilityQuery{5000, 1.0, 0.01}, "rot_alpha1"), HypothesisError);
}

TEST(Bounds, PerturbedProbability)
{
    const auto r = perturbed_probability(1000, 1e5, 0.5);
    EXPECT_GT(r.probability, 0.999);
    EXPECT_LT(r.probability, 1.0);
    EXPECT_NEAR(r.probability, -std::expm1(r.log_deficit), 1e-12);
    EXPECT_LT(perturbed_probability(500, 1e5, 0.1).probability, 0.0);
    // more dimensions never hurt
    EXPECT_LT(perturbed_probability(5000, 1e5, 0.2).log_deficit, perturbed_probability(2000, 1e5, 0.2).log_deficit);
    const auto big = perturbed_probability_log(20000, std::log(1e5), 0.5);
    EXPECT_NEAR(big.probability, 1.0, 1e-12);
    EXPECT_LT(big.log_deficit, -100.0);
}

TEST(Bounds, RotGeneralAtLeastItsAlphaOneCorollary)
{
    // 0.1 exp(0.07 n) at n = 200 is 120,260; the full bound can only be larger
    expect_rel(M_of("rot_alpha1", 200, 1.0), 120260, 1e-3);
    EXPECT_GE(M_of("rot_general", 200, 1.0), 120260);
}
