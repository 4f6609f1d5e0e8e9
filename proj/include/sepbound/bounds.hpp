#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sepbound/twopoint.hpp"

namespace sepbound {

struct OriginCenter {};
struct CubeCenter {};
struct MeanCenter {};
struct ExplicitCenter {
    std::vector<double> point;
};
using Center = std::variant<OriginCenter, CubeCenter, MeanCenter, ExplicitCenter>;

struct SeparabilityQuery {
    int n = 0;
    double alpha = 1.0;
    double delta = 0.01;
    Center center = OriginCenter{};
};

// exact: M < 1/2 + sqrt(1/4 + delta/f); simple: M <= sqrt(delta/f)
enum class MMode { exact, simple };
enum class BoundMode { exact_necessary_sufficient, sufficient };

const char *to_string(MMode m);
const char *to_string(BoundMode m);

struct BoundResult {
    std::string theorem_id;
    double log10_M = 0.0;
    std::optional<std::uint64_t> M_exact; // floor of the bound when it is below 2^53
    BoundMode mode = BoundMode::sufficient;
    MMode formula = MMode::simple;
    std::optional<double> b_exponent;
    std::optional<double> log_f;
    std::vector<std::string> notes;

    double M() const;
};

struct TheoremParams {
    std::optional<double> gamma;
    std::optional<double> sigma0;
    std::optional<double> epsilon;
    std::optional<double> R;
    std::optional<double> r;
    std::optional<double> C;
    std::optional<double> mu;
    std::optional<double> offset_sq;
    std::optional<ComponentSpec> component;
    std::vector<ComponentSpec> components;
    std::vector<SlcParams> slc_points;
    std::optional<RadialModel> radial;
    std::optional<MMode> mode_override;
};

BoundResult m_from_f(LogProb f, double delta, MMode mode);

const std::vector<std::string> &theorem_ids();
bool is_iff_theorem(const std::string &id);

// throws std::invalid_argument for unknown ids or missing parameters, HypothesisError when
// the theorem does not apply
BoundResult bound(const SeparabilityQuery &q, const std::string &theorem, const TheoremParams &p = {});

// log f(n, alpha) for theorems whose bound goes through a two-point probability
std::optional<LogProb> two_point_log_f(const std::string &theorem, int n, double alpha,
                                       const TheoremParams &p);

struct PerturbedResult {
    double probability = 0.0; // 1 - D, may be negative
    double log_deficit = 0.0; // log D
    double theta = 0.0;
};

PerturbedResult perturbed_probability(int n, double M, double epsilon);
PerturbedResult perturbed_probability_log(int n, double log_M, double epsilon);

double exponent_b(const std::string &theorem, double alpha, const TheoremParams &p = {});
// -log f(n, alpha) / (2n), the finite-n estimate of b
double exponent_b_at(const std::string &theorem, int n, double alpha, const TheoremParams &p = {});

} // namespace sepbound
