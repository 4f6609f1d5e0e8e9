#pragma once

#include <functional>
#include <stdexcept>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sepbound/specfun.hpp"

namespace sepbound {

enum class FKind { exact, upper_bound, asymptotic };

const char *to_string(FKind k);

struct TwoPointResult {
    LogProb f;
    FKind kind = FKind::exact;
    double numeric_error = 0.0; // relative
};

// Thrown when a theorem's hypotheses do not hold for the requested parameters.
struct HypothesisError : std::domain_error {
    using std::domain_error::domain_error;
};

// Law of ||x||/||y|| for i.i.d. spherically invariant x, y.
// log_ratio_cdf is optional; it is preferred when present because h underflows at large n.
struct RadialModel {
    std::function<double(int, double)> ratio_cdf;
    std::function<double(int, double)> log_ratio_cdf;
    std::vector<double> kinks;
    std::string description;

    double log_h(int n, double t) const;
};

RadialModel uniform_ball_radial();
RadialModel spherical_layer_radial(double R);
RadialModel exponential_radial();

struct SlcParams {
    double gamma = 1.0;
    std::optional<double> mu;
    double x0_norm = 0.0;
};

// Coordinate laws for product distributions.
struct Uniform01 {};
struct SymmetricBernoulli {};
struct ThreePoint {
    double sigma0 = 0.5;
};
struct Laplace {
    double scale = 0.7071067811865476;
};
struct StandardNormal {};
struct TabulatedDensity {
    std::vector<double> x;       // increasing grid
    std::vector<double> density; // values at grid points, piecewise linear in between
};
using ComponentSpec =
    std::variant<Uniform01, SymmetricBernoulli, ThreePoint, Laplace, StandardNormal, TabulatedDensity>;

double component_mean(const ComponentSpec &c);
double component_variance(const ComponentSpec &c);
std::string component_name(const ComponentSpec &c);

enum class CenterKind { arbitrary, cube_center, mean };

struct HoeffdingCenter {
    CenterKind kind = CenterKind::arbitrary;
    double c_prime = 1.0;   // max_i max(c_i, 1-c_i); 1 is the worst case
    double offset_sq = 0.0; // (1/n) sum (mu_i - c_i)^2
};

struct ChernoffResult {
    double gamma = 0.0;
    double lambda_star = 0.0;
    double c_star = 0.0;
};

TwoPointResult ball_upper(int n, double alpha);
TwoPointResult ball_exact(int n, double alpha);
TwoPointResult ball_asymptotic(int n, double alpha);

double layer_ratio_cdf(int n, double t, double R);

TwoPointResult spherical_generic(int n, double alpha, const RadialModel &radial);

TwoPointResult normal_exact(int n, double alpha);

TwoPointResult exponential_exact(int n, double alpha);
// Laplace-method equivalent of the exponential-family integral, as derived in the proof.
TwoPointResult exponential_asymptotic(int n, double alpha);
// The closed form as printed in the statement; carries a constant factor over the derivation.
TwoPointResult exponential_asymptotic_printed(int n, double alpha);

TwoPointResult rotgeneral_f(int n, double alpha);
// phi(t,n): bound on P[||x||/||y|| <= t] for log-concave radial laws with E||x|| = 1
LogProb rotgeneral_phi(double t, int n);
TwoPointResult rotsimple_f(int n, double alpha);

TwoPointResult slc_f(int n, double alpha, const SlcParams &slc, bool improved);
double indbound_exponent(const std::vector<SlcParams> &points, double alpha);

TwoPointResult product_hoeffding_f(int n, double alpha, double sigma0, const HoeffdingCenter &center);
TwoPointResult product_bernstein_f(int n, double alpha, double sigma0);

ChernoffResult chernoff_gamma(const ComponentSpec &component, double alpha);
double chernoff_gamma_n(const std::vector<ComponentSpec> &components, double alpha);
// log E[exp(lambda (x y - alpha x^2))] for centred i.i.d. x, y of the given law
double chernoff_log_mgf(const ComponentSpec &component, double lambda, double alpha);

TwoPointResult dependent_f(int n, double alpha, double sigma0);

} // namespace sepbound
