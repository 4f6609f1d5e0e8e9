#include "sepbound/tables.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "sepbound/twopoint.hpp"

namespace sepbound {

namespace {

const std::vector<int> kDims = {10, 50, 100, 200, 500, 1000};
const std::vector<int> kNoisyDims = {500, 1000, 2000, 5000, 10000, 20000};

std::string dim_label(int n) { return "n=" + std::to_string(n); }

// Cell text of the printed tables, row by row.
using Printed = std::vector<std::vector<std::string>>;

const Printed kTable1 = {
    {"17.7", "0.06"},
    {"1.7\\cdot 10^6", "91"},
    {"3.1 \\cdot 10^{12}", "828,180"},
    {"9.7 \\cdot 10^{24}", "6.8 \\cdot 10^{13}"},
    {"2.9 \\cdot 10^{62}", "3.9 \\cdot 10^{37}"},
    {"8.6 \\cdot 10^{124}", "1.5 \\cdot 10^{77}"},
};
const Printed kTable2 = {
    {"17.7", "0.25"},
    {"1.7\\cdot 10^6", "9.54"},
    {"3.1 \\cdot 10^{12}", "910"},
    {"9.7 \\cdot 10^{24}", "8.2 \\cdot 10^6"},
    {"2.9 \\cdot 10^{62}", "6.2 \\cdot 10^{18}"},
    {"8.6 \\cdot 10^{124}", "3.9 \\cdot 10^{38}"},
};
const Printed kTable3 = {
    {"0.35", "1.48", "4.52"},
    {"13.5", "17,927", "4.7 \\cdot 10^6"},
    {"1287", "2.2 \\cdot 10^9", "1.6 \\cdot 10^{14}"},
    {"1.1 \\cdot 10^7", "3.6 \\cdot 10^{19}", "1.8 \\cdot 10^{29}"},
    {"8.8 \\cdot 10^{18}", "1.5 \\cdot 10^{50}", "2.5 \\cdot 10^{74}"},
    {"5.5 \\cdot 10^{38}", "1.6 \\cdot 10^{101}", "4.6 \\cdot 10^{149}"},
};
const Printed kTable4 = {
    {"<0", "<0", "<0"},
    {"<0", "<0", "0.9998"},
    {"<0", "<0", "1-5.8 \\cdot 10^{-18}"},
    {"<0", "0.95", "1-1.2 \\cdot 10^{-57}"},
    {"<0", "1-5\\cdot 10^{-13}", "1-1.3 \\cdot 10^{-123}"},
    {"0.96", "1-8\\cdot 10^{-35}", "1 - 2.2 \\cdot 10^{-255}"},
};
const Printed kTable5 = {
    {"0.12", "0.15", "0.18"},
    {"1.71", "5.56", "18"},
    {"61", "692", "7974"},
    {"92,783", "1.2 \\cdot 10^7", "1.8 \\cdot 10^9"},
    {"4.3 \\cdot 10^{14}", "1.1 \\cdot 10^{20}", "2.7 \\cdot 10^{25}"},
    {"7 \\cdot 10^{30}", "4.7 \\cdot 10^{41}", "3.2 \\cdot 10^{52}"},
};
const Printed kTable6 = {
    {"1.19", "1.45", "1.99"},
    {"14", "164", "2075"},
    {"794", "93,806", "1.4 \\cdot 10^7"},
    {"2\\cdot 10^6", "2.6 \\cdot 10^{10}", "5.6 \\cdot 10^{14}"},
    {"2.6 \\cdot 10^{16}", "4.2 \\cdot 10^{26}", "2.6 \\cdot 10^{37}"},
    {"1.5 \\cdot 10^{33}", "3.6 \\cdot 10^{53}", "1.3 \\cdot 10^{75}"},
};
const Printed kTable7 = {
    {"0.25", "0.34", "0.2"},
    {"8.9", "60", "350"},
    {"400", "19,491", "1.9 \\cdot 10^{6}"},
    {"642,645", "1.6 \\cdot 10^9", "4.8 \\cdot 10^{13}"},
    {"1.9 \\cdot 10^{15}", "7.1 \\cdot 10^{23}", "5.2 \\cdot 10^{35}"},
    {"9.4 \\cdot 10^{30}", "1.4 \\cdot 10^{48}", "2.2 \\cdot 10^{72}"},
};
const Printed kTable8 = {
    {"0.65", "0.81", "1.06"},
    {"7.6", "43", "249"},
    {"218", "6,662", "203,805"},
    {"154,501", "1.3 \\cdot 10^8", "1.1 \\cdot 10^{11}"},
    {"4.1 \\cdot 10^{13}", "7.6 \\cdot 10^{20}", "1.6 \\cdot 10^{28}"},
    {"3.8 \\cdot 10^{27}", "1.1 \\cdot 10^{42}", "4.8 \\cdot 10^{56}"},
};
const Printed kTable9 = {
    {"0.2"}, {"3.3"}, {"109"}, {"120,260"}, {"1.5 \\cdot 10^{14}"}, {"2.5 \\cdot 10^{29}"},
};
const Printed kTable10 = {
    {"1.02"}, {"11,578"}, {"1.3 \\cdot 10^9"}, {"1.7 \\cdot 10^{19}"}, {"4.3 \\cdot 10^{49}"}, {"1.8 \\cdot 10^{100}"},
};
const Printed kTable11 = {
    {"0.13", "0.18", "0.3"},
    {"0.44", "2.21", "25"},
    {"2", "49", "6,691"},
    {"40", "24,017", "4.4 \\cdot 10^8"},
    {"334,248", "2.8 \\cdot 10^{12}", "1.3 \\cdot 10^{23}"},
    {"1.1 \\cdot 10^{12}", "8 \\cdot 10^{25}", "1.7 \\cdot 10^{47}"},
};

constexpr double kClosedTol = 1e-3;
constexpr double kIntegralTol = 1e-2;

struct Builder {
    Table t;
    const Printed *printed = nullptr;

    void magnitude(std::size_t r, std::size_t c, double log10_value)
    {
        TableCell cell;
        cell.row = t.rows[r];
        cell.column = t.columns[c];
        cell.log10_value = log10_value;
        cell.display = format_display_log10(log10_value);
        cell.printed = (*printed)[r][c];
        cell.match = match_magnitude(parse_printed(cell.printed), log10_value, t.tolerance);
        t.cells.push_back(std::move(cell));
    }

    void probability(std::size_t r, std::size_t c, const PerturbedResult &p)
    {
        TableCell cell;
        cell.row = t.rows[r];
        cell.column = t.columns[c];
        cell.log10_value = std::numeric_limits<double>::quiet_NaN();
        cell.probability = p;
        cell.display = format_probability(p);
        cell.printed = (*printed)[r][c];
        cell.match = match_probability(parse_printed(cell.printed), p, t.tolerance);
        t.cells.push_back(std::move(cell));
    }

    // one column per parameter value, one row per dimension
    void grid(const std::vector<double> &params, const std::function<double(int, double)> &log10_at)
    {
        for (std::size_t r = 0; r < kDims.size(); ++r)
            for (std::size_t c = 0; c < params.size(); ++c) magnitude(r, c, log10_at(kDims[r], params[c]));
    }
};

Builder start(int id, std::string title, const Printed &printed, std::vector<std::string> columns,
              double tol, const std::vector<int> &dims = kDims)
{
    Builder b;
    b.t.id = id;
    b.t.title = std::move(title);
    b.t.row_header = "n";
    for (int n : dims) b.t.rows.push_back(dim_label(n));
    b.t.columns = std::move(columns);
    b.t.tolerance = tol;
    b.printed = &printed;
    return b;
}

double bound_log10(int n, double alpha, const std::string &id, const TheoremParams &p = {})
{
    return bound(SeparabilityQuery{n, alpha, 0.01}, id, p).log10_M;
}

Table prototype_table(int id)
{
    const bool set = id == 2;
    auto b = start(id,
                   set ? "Bound on |Y| for Fisher separability of Y itself (alpha=0.8, r=0.75, C=1, p=0.99)"
                       : "Bound on |Y| for separating a random point from Y (alpha=0.8, r=0.75, C=1, p=0.99)",
                   set ? kTable2 : kTable1, {"rho/rho_uniform <=", "|Y| <="}, kClosedTol);
    TheoremParams p;
    p.r = 0.75;
    p.C = 1.0;
    for (std::size_t r = 0; r < kDims.size(); ++r) {
        const int n = kDims[r];
        b.magnitude(r, 0, (std::log(*p.C) - n * std::log(*p.r)) / std::log(10.0));
        b.magnitude(r, 1, bound_log10(n, 0.8, set ? "prototype_set" : "prototype", p));
    }
    return b.t;
}

} // namespace

bool Table::all_match() const
{
    for (const auto &c : cells)
        if (!c.match.ok) return false;
    return true;
}

double Table::max_rel_dev() const
{
    double m = 0.0;
    for (const auto &c : cells)
        if (std::isfinite(c.match.rel_dev)) m = std::max(m, c.match.rel_dev);
    return m;
}

Table make_table(int id)
{
    switch (id) {
    case 1:
    case 2: return prototype_table(id);
    case 3: {
        auto b = start(3, "Bound on M, uniform distribution in the ball, known-form estimate (p>0.99)", kTable3,
                       {"alpha=0.6", "alpha=0.8", "alpha=1"}, kClosedTol);
        b.grid({0.6, 0.8, 1.0}, [](int n, double a) { return bound_log10(n, a, "ball_known"); });
        return b.t;
    }
    case 4: {
        auto b = start(4, "Lower bound on the probability that 100,000 perturbed points are Fisher separable",
                       kTable4, {"epsilon=1/10", "epsilon=1/5", "epsilon=1/2"}, kIntegralTol, kNoisyDims);
        const double eps[3] = {0.1, 0.2, 0.5};
        for (std::size_t r = 0; r < kNoisyDims.size(); ++r)
            for (std::size_t c = 0; c < 3; ++c) b.probability(r, c, perturbed_probability(kNoisyDims[r], 1e5, eps[c]));
        return b.t;
    }
    case 5: {
        auto b = start(5, "Bound on M, isotropic gamma-SLC distributions (alpha=1, p>0.99)", kTable5,
                       {"gamma=0.6", "gamma=0.8", "gamma=1"}, kClosedTol);
        b.grid({0.6, 0.8, 1.0}, [](int n, double g) {
            TheoremParams p;
            p.gamma = g;
            return bound_log10(n, 1.0, "slc_improved", p);
        });
        return b.t;
    }
    case 6: {
        auto b = start(6, "Bound on M, standard normal distribution (p>0.99)", kTable6,
                       {"alpha=0.6", "alpha=0.8", "alpha=1"}, kIntegralTol);
        b.grid({0.6, 0.8, 1.0}, [](int n, double a) { return bound_log10(n, a, "normal_optimal"); });
        return b.t;
    }
    case 7: {
        auto b = start(7, "Bound on M, uniform distribution in the ball, asymptotic form (p>0.99)", kTable7,
                       {"alpha=0.5", "alpha=0.6", "alpha=0.7"}, kIntegralTol);
        b.grid({0.5, 0.6, 0.7}, [](int n, double a) { return bound_log10(n, a, "ball_simple"); });
        return b.t;
    }
    case 8: {
        auto b = start(8, "Bound on M, spherical exponential distribution (p>0.99)", kTable8,
                       {"alpha=0.6", "alpha=0.8", "alpha=1"}, kIntegralTol);
        // the printed grid follows M = sqrt(1/4 + delta/f)
        b.grid({0.6, 0.8, 1.0}, [](int n, double a) {
            const double lf = exponential_exact(n, a).f.log_value;
            const double r = std::log(0.01) - lf;
            return 0.5 * log_add(std::log(0.25), r) / std::log(10.0);
        });
        return b.t;
    }
    case 9: {
        auto b = start(9, "Bound on M, any log-concave spherically invariant distribution (alpha=1, delta=0.01)",
                       kTable9, {"M <="}, kIntegralTol);
        b.grid({1.0}, [](int n, double a) { return bound_log10(n, a, "rot_alpha1"); });
        return b.t;
    }
    case 10: {
        auto b = start(10, "Bound on M, uniform distribution in the cube (alpha=1, delta=0.01)", kTable10,
                       {"M <="}, kClosedTol);
        b.grid({1.0}, [](int n, double a) {
            TheoremParams p;
            p.component = Uniform01{};
            return bound_log10(n, a, "product_chernoff", p);
        });
        return b.t;
    }
    case 11: {
        auto b = start(11, "Bound on M, dependent cube coordinates (alpha=1, delta=0.01)", kTable11,
                       {"sigma0=0.4", "sigma0=0.45", "sigma0=0.5"}, kClosedTol);
        b.grid({0.4, 0.45, 0.5}, [](int n, double s) {
            TheoremParams p;
            p.sigma0 = s;
            return bound_log10(n, 1.0, "dependent", p);
        });
        return b.t;
    }
    default: throw std::invalid_argument("unknown table id " + std::to_string(id) + " (expected 1..11)");
    }
}

} // namespace sepbound
