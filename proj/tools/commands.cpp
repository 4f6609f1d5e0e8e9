#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <queue>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sepbound/bounds.hpp"
#include "sepbound/format.hpp"
#include "sepbound/montecarlo.hpp"
#include "sepbound/tables.hpp"
#include "sepbound/twopoint.hpp"

namespace sepbound::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------------------------
// parsing helpers

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

double to_double(const std::string &s, const std::string &what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw UsageError("invalid number for " + what + ": '" + s + "'");
    return v;
}

TabulatedDensity read_tabulated(const std::string &path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open density table " + path);
    TabulatedDensity t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line, ',');
        if (cells.size() != 2) throw UsageError("density table rows need two columns: " + line);
        t.x.push_back(to_double(cells[0], "density grid"));
        t.density.push_back(to_double(cells[1], "density value"));
    }
    return t;
}

ComponentSpec parse_component(const std::string &text, std::optional<double> sigma0)
{
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (name == "uniform01" || name == "uniform") return Uniform01{};
    if (name == "bernoulli") return SymmetricBernoulli{};
    if (name == "normal") return StandardNormal{};
    if (name == "laplace") return Laplace{};
    if (name == "threepoint") {
        if (!arg.empty()) return ThreePoint{to_double(arg, "threepoint sigma0")};
        if (!sigma0) throw UsageError("threepoint component needs a sigma0 (threepoint:0.4 or --sigma0)");
        return ThreePoint{*sigma0};
    }
    if (name == "tabulated") {
        if (arg.empty()) throw UsageError("tabulated component needs a file: tabulated:path.csv");
        return read_tabulated(arg);
    }
    throw UsageError("unknown component '" + text + "' (uniform01, bernoulli, threepoint[:s], normal, laplace, "
                     "tabulated:file)");
}

Center parse_center(const std::string &text)
{
    if (text == "origin") return OriginCenter{};
    if (text == "mean") return MeanCenter{};
    if (text == "cube-center" || text == "cube") return CubeCenter{};
    ExplicitCenter c;
    for (const auto &v : split(text, ',')) c.point.push_back(to_double(v, "--center"));
    if (c.point.empty()) throw UsageError("unknown center '" + text + "'");
    return c;
}

// Eigen vector for a center given the dimension and the distribution's mean.
Eigen::VectorXd center_vector(const Center &c, int n, const Eigen::VectorXd &mean)
{
    if (std::holds_alternative<OriginCenter>(c)) return Eigen::VectorXd::Zero(n);
    if (std::holds_alternative<MeanCenter>(c)) return mean;
    if (std::holds_alternative<CubeCenter>(c)) return Eigen::VectorXd::Constant(n, 0.5);
    const auto &p = std::get<ExplicitCenter>(c).point;
    if (static_cast<int>(p.size()) != n) throw UsageError("--center has the wrong dimension");
    return Eigen::Map<const Eigen::VectorXd>(p.data(), n);
}

std::uint64_t to_count(double v, const std::string &what)
{
    if (!(v >= 1) || v > 1e18 || std::floor(v) != v) throw UsageError(what + " must be a positive integer");
    return static_cast<std::uint64_t>(v);
}

struct NRange {
    int from = 0, to = 0, step = 1;
};

NRange parse_range(const std::string &text)
{
    auto parts = split(text, ':');
    if (parts.empty() || parts.size() > 3) throw UsageError("--n expects N or FROM:TO[:STEP]");
    NRange r;
    r.from = static_cast<int>(to_double(parts[0], "--n"));
    r.to = parts.size() > 1 ? static_cast<int>(to_double(parts[1], "--n")) : r.from;
    r.step = parts.size() > 2 ? static_cast<int>(to_double(parts[2], "--n")) : 1;
    if (r.from < 1 || r.to < r.from || r.step < 1) throw UsageError("empty or invalid n range " + text);
    return r;
}

// ---------------------------------------------------------------------------------------------
// output

enum class Format { human, csv, json };

struct Output {
    std::ostream *stream;
    std::unique_ptr<std::ofstream> file;

    std::ostream &os() { return *stream; }
};

Output open_output(const std::string &path, std::ostream &fallback)
{
    Output o{&fallback, nullptr};
    if (!path.empty()) {
        o.file = std::make_unique<std::ofstream>(path);
        if (!*o.file) throw UsageError("cannot write " + path);
        o.stream = o.file.get();
    }
    return o;
}

std::string csv_field(const std::string &s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::string join(const std::vector<std::string> &v, const char *sep = "; ")
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

// left-justify counting code points, so "·" takes one column
std::string pad(const std::string &s, std::size_t width)
{
    const auto chars = static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
    return chars >= width ? s + " " : s + std::string(width - chars, ' ');
}

std::string opt_full(const std::optional<double> &v) { return v ? format_full(*v) : ""; }

// One line of a bound report or sweep.
struct ReportRow {
    std::string theorem;
    int n = 0;
    double alpha = 1.0, delta = 0.01;
    std::optional<double> log10_M;
    std::string display;
    std::string mode;
    std::optional<double> b;
    std::vector<std::string> notes;
    bool violated = false;
};

const char *kCsvHeader = "theorem,n,alpha,delta,log10_M,M_display,mode,b_exponent,notes";

void write_rows(std::ostream &os, const std::vector<ReportRow> &rows, Format f)
{
    if (f == Format::csv) {
        os << kCsvHeader << '\n';
        for (const auto &r : rows)
            os << csv_field(r.theorem) << ',' << r.n << ',' << format_full(r.alpha) << ',' << format_full(r.delta)
               << ',' << opt_full(r.log10_M) << ',' << csv_field(r.display) << ',' << r.mode << ','
               << opt_full(r.b) << ',' << csv_field(join(r.notes)) << '\n';
        return;
    }
    if (f == Format::json) {
        json arr = json::array();
        for (const auto &r : rows) {
            json o{{"theorem", r.theorem}, {"n", r.n},       {"alpha", r.alpha},    {"delta", r.delta},
                   {"M_display", r.display}, {"mode", r.mode}, {"notes", r.notes}};
            o["log10_M"] = r.log10_M ? json(*r.log10_M) : json(nullptr);
            o["b_exponent"] = r.b ? json(*r.b) : json(nullptr);
            arr.push_back(o);
        }
        os << arr.dump(2) << '\n';
        return;
    }
    std::size_t w = 8;
    for (const auto &r : rows) w = std::max(w, r.theorem.size());
    os << std::left << std::setw(static_cast<int>(w) + 2) << "theorem" << std::setw(8) << "n" << std::setw(7)
       << "alpha" << std::setw(16) << "M" << std::setw(16) << "log10 M" << std::setw(28) << "mode" << "b"
       << '\n';
    for (const auto &r : rows) {
        os << std::left << std::setw(static_cast<int>(w) + 2) << r.theorem << std::setw(8) << r.n << std::setw(7)
           << format_full(r.alpha) << pad(r.log10_M ? r.display : "-", 16)
           << pad(r.log10_M ? format_full(*r.log10_M) : "-", 16) << std::setw(28) << r.mode
           << (r.b ? format_full(*r.b) : "-") << '\n';
        for (const auto &note : r.notes) os << "    note: " << note << '\n';
    }
}

// ---------------------------------------------------------------------------------------------
// families shared by two-point, verify and check-dataset

struct FamilyOptions {
    std::optional<double> gamma, sigma0, R;
    std::string component;
};

struct Family {
    std::string name;
    std::optional<DistributionSpec> sampler;
    std::function<TwoPointResult(int, double)> f; // empty when no theory is available
    Center default_center = OriginCenter{};
    std::function<Eigen::VectorXd(int)> mean_at = [](int n) { return Eigen::VectorXd::Zero(n); };
};

double need_opt(const std::optional<double> &v, const char *flag, const std::string &family)
{
    if (!v) throw UsageError("family " + family + " needs " + flag);
    return *v;
}

const char *kFamilies =
    "ball, layer, normal, exponential, rot_general, rot_simple, slc, cube, product, bernstein, hoeffding, "
    "dependent, half-cube, laplace";

Family make_family(const std::string &name, const FamilyOptions &o)
{
    Family fam;
    fam.name = name;
    if (name == "ball") {
        fam.sampler = dist::UniformBall{};
        fam.f = [](int n, double a) { return ball_exact(n, a); };
    } else if (name == "layer") {
        const double R = need_opt(o.R, "--R", name);
        fam.sampler = dist::SphericalLayer{R};
        fam.f = [R](int n, double a) { return spherical_generic(n, a, spherical_layer_radial(R)); };
    } else if (name == "normal") {
        fam.sampler = dist::StandardNormal{};
        fam.f = [](int n, double a) { return normal_exact(n, a); };
    } else if (name == "exponential") {
        fam.sampler = dist::SphericalExponential{};
        fam.f = [](int n, double a) { return exponential_exact(n, a); };
    } else if (name == "rot_general") {
        fam.f = [](int n, double a) { return rotgeneral_f(n, a); };
    } else if (name == "rot_simple") {
        fam.f = [](int n, double a) { return rotsimple_f(n, a); };
    } else if (name == "slc") {
        const double g = need_opt(o.gamma, "--gamma", name);
        fam.sampler = dist::GaussianSLC{g};
        fam.f = [g](int n, double a) { return slc_f(n, a, SlcParams{g, std::nullopt, 0.0}, true); };
    } else if (name == "cube" || name == "product") {
        const ComponentSpec comp = name == "cube" ? ComponentSpec{Uniform01{}}
                                                  : parse_component(o.component.empty() ? "uniform01" : o.component,
                                                                    o.sigma0);
        fam.sampler = name == "cube" ? DistributionSpec{dist::UniformCube{}} : DistributionSpec{dist::ProductIID{comp}};
        fam.f = [comp](int n, double a) {
            TwoPointResult r;
            r.f = LogProb{-2.0 * n * chernoff_gamma(comp, a).gamma};
            r.kind = FKind::upper_bound;
            return r;
        };
        fam.default_center = MeanCenter{};
        const double m = component_mean(comp);
        fam.mean_at = [m](int n) { return Eigen::VectorXd::Constant(n, m); };
    } else if (name == "bernstein" || name == "hoeffding") {
        const double s = need_opt(o.sigma0, "--sigma0", name);
        fam.sampler = dist::ProductIID{ThreePoint{s}};
        if (name == "bernstein") {
            fam.f = [s](int n, double a) { return product_bernstein_f(n, a, s); };
        } else {
            fam.f = [s](int n, double a) {
                return product_hoeffding_f(n, a, s, HoeffdingCenter{CenterKind::cube_center, 0.5, 0.0});
            };
        }
        fam.default_center = CubeCenter{};
        fam.mean_at = [](int n) { return Eigen::VectorXd::Constant(n, 0.5); };
    } else if (name == "dependent") {
        const double s = need_opt(o.sigma0, "--sigma0", name);
        fam.f = [s](int n, double a) { return dependent_f(n, a, s); };
        fam.default_center = CubeCenter{};
    } else if (name == "half-cube") {
        fam.sampler = dist::DependentHalfCube{};
        fam.f = [](int, double) { return TwoPointResult{LogProb::one(), FKind::exact, 0.0}; };
        fam.default_center = CubeCenter{};
        fam.mean_at = [](int n) { return Eigen::VectorXd::Constant(n, 0.5); };
    } else if (name == "laplace") {
        fam.sampler = dist::LaplaceProduct{};
    } else {
        throw UsageError("unknown family '" + name + "' (" + kFamilies + ")");
    }
    return fam;
}

// ---------------------------------------------------------------------------------------------
// bound and sweep

struct BoundFlags {
    std::vector<std::string> theorems;
    double alpha = 1.0, delta = 0.01;
    std::optional<double> gamma, sigma0, epsilon, R, r, C;
    std::string component, center = "origin", mode, format = "human", out;
};

TheoremParams theorem_params(const BoundFlags &b)
{
    TheoremParams p;
    p.gamma = b.gamma;
    p.sigma0 = b.sigma0;
    p.epsilon = b.epsilon;
    p.R = b.R;
    p.r = b.r;
    p.C = b.C;
    if (!b.component.empty()) p.component = parse_component(b.component, b.sigma0);
    if (b.R) p.radial = spherical_layer_radial(*b.R);
    if (b.mode == "exact") p.mode_override = MMode::exact;
    else if (b.mode == "simple") p.mode_override = MMode::simple;
    else if (!b.mode.empty()) throw UsageError("--mode for bound must be exact or simple");
    return p;
}

std::vector<std::string> resolve_theorems(const std::vector<std::string> &requested)
{
    std::vector<std::string> ids;
    for (const auto &item : requested)
        for (const auto &id : split(item, ',')) {
            if (id == "all") {
                ids.insert(ids.end(), theorem_ids().begin(), theorem_ids().end());
                continue;
            }
            if (std::find(theorem_ids().begin(), theorem_ids().end(), id) == theorem_ids().end())
                throw UsageError("unknown theorem id '" + id + "'");
            ids.push_back(id);
        }
    if (ids.empty()) ids = theorem_ids();
    return ids;
}

ReportRow bound_row(const std::string &id, int n, const BoundFlags &b, const TheoremParams &p)
{
    ReportRow row;
    row.theorem = id;
    row.n = n;
    row.alpha = b.alpha;
    row.delta = b.delta;
    try {
        const auto res = bound(SeparabilityQuery{n, b.alpha, b.delta, parse_center(b.center)}, id, p);
        row.log10_M = res.log10_M;
        row.display = format_display_log10(res.log10_M);
        row.mode = to_string(res.mode);
        row.b = res.b_exponent;
        row.notes = res.notes;
        row.notes.push_back(std::string("M formula ") + to_string(res.formula));
    } catch (const HypothesisError &e) {
        row.violated = true;
        row.mode = is_iff_theorem(id) ? "exact_necessary_sufficient" : "sufficient";
        row.notes.push_back(std::string("hypothesis violated: ") + e.what());
    } catch (const std::invalid_argument &e) {
        row.violated = true;
        row.mode = "n/a";
        row.notes.push_back(std::string("not evaluated: ") + e.what());
    } catch (const std::domain_error &e) {
        row.violated = true;
        row.mode = "n/a";
        row.notes.push_back(std::string("not evaluated: ") + e.what());
    }
    return row;
}

int cmd_bound(const BoundFlags &b, int n, std::ostream &out)
{
    const auto ids = resolve_theorems(b.theorems);
    const auto p = theorem_params(b);
    std::vector<ReportRow> rows;
    for (const auto &id : ids) rows.push_back(bound_row(id, n, b, p));
    auto o = open_output(b.out, out);
    write_rows(o.os(), rows, b.format == "csv" ? Format::csv : b.format == "json" ? Format::json : Format::human);
    return ids.size() == 1 && rows.front().violated ? kHypothesis : kOk;
}

// smallest delta in (0,1) whose bound reaches M, by bisection on log delta
std::optional<double> invert_delta(const std::string &id, int n, double alpha, double log10_target,
                                   const Center &center, const TheoremParams &p)
{
    auto lm = [&](double log_delta) {
        return bound(SeparabilityQuery{n, alpha, std::exp(log_delta), center}, id, p).log10_M;
    };
    double lo = std::log(1e-300), hi = std::log1p(-1e-12);
    if (lm(hi) < log10_target) return std::nullopt;
    if (lm(lo) >= log10_target) return 1e-300;
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        (lm(mid) >= log10_target ? hi : lo) = mid;
    }
    return std::exp(hi);
}

int cmd_sweep(const BoundFlags &b, const std::string &range, std::optional<double> M, std::ostream &out)
{
    const auto ids = resolve_theorems(b.theorems);
    const auto p = theorem_params(b);
    const auto r = parse_range(range);
    const Center center = parse_center(b.center);
    std::vector<ReportRow> rows;
    for (const auto &id : ids)
        for (int n = r.from; n <= r.to; n += r.step) {
            if (!M) {
                rows.push_back(bound_row(id, n, b, p));
                continue;
            }
            ReportRow row;
            row.theorem = id;
            row.n = n;
            row.alpha = b.alpha;
            row.log10_M = std::log10(*M);
            row.display = format_display(*M);
            row.mode = is_iff_theorem(id) ? "exact_necessary_sufficient" : "sufficient";
            try {
                if (auto f = two_point_log_f(id, n, b.alpha, p)) {
                    // expected number of inseparable ordered pairs
                    const double ld = f->log_value + std::log(*M) + std::log(*M - 1.0);
                    row.delta = std::exp(ld);
                    row.notes.push_back("delta = M(M-1) f");
                } else if (auto d = invert_delta(id, n, b.alpha, std::log10(*M), center, p)) {
                    row.delta = *d;
                    row.notes.push_back("delta from inverting the bound on M");
                } else {
                    row.delta = 1.0;
                    row.notes.push_back("vacuous: no delta below 1 admits this M");
                }
                row.notes.push_back("probability >= " + format_full(1.0 - row.delta));
                row.b = bound(SeparabilityQuery{n, b.alpha, 0.01, center}, id, p).b_exponent;
            } catch (const std::exception &e) {
                row.delta = std::nan("");
                row.notes.push_back(std::string("not evaluated: ") + e.what());
            }
            rows.push_back(row);
        }
    auto o = open_output(b.out, out);
    write_rows(o.os(), rows, b.format == "json" ? Format::json : b.format == "human" ? Format::human : Format::csv);
    return kOk;
}

// ---------------------------------------------------------------------------------------------
// table

// "1.5 \\cdot 10^{77}" as "1.5·10^77"
std::string latex_text(std::string s)
{
    for (std::size_t pos; (pos = s.find("\\cdot")) != std::string::npos;) s.replace(pos, 5, "·");
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '{' || c == '}'; }), s.end());
    return s;
}

void write_table(std::ostream &os, const Table &t, bool check, Format f)
{
    if (f == Format::csv) {
        os << "table,row,column,log10_value,probability,display,printed,rel_dev,match\n";
        for (const auto &c : t.cells)
            os << t.id << ',' << c.row << ',' << csv_field(c.column) << ','
               << (c.probability ? "" : format_full(c.log10_value)) << ','
               << (c.probability ? format_full(c.probability->probability) : "") << ',' << csv_field(c.display)
               << ',' << csv_field(c.printed) << ',' << format_full(c.match.rel_dev) << ','
               << (c.match.ok ? "yes" : "no") << '\n';
        return;
    }
    if (f == Format::json) {
        json cells = json::array();
        for (const auto &c : t.cells) {
            json o{{"row", c.row}, {"column", c.column}, {"display", c.display}, {"printed", c.printed},
                   {"match", c.match.ok}};
            o["rel_dev"] = std::isfinite(c.match.rel_dev) ? json(c.match.rel_dev) : json(nullptr);
            if (c.probability) {
                o["probability"] = c.probability->probability;
                o["log10_deficit"] = c.probability->log_deficit / std::log(10.0);
            } else {
                o["log10_value"] = c.log10_value;
            }
            cells.push_back(o);
        }
        os << json{{"table", t.id}, {"title", t.title}, {"tolerance", t.tolerance}, {"cells", cells}}.dump(2)
           << '\n';
        return;
    }
    os << "Table " << t.id << ": " << t.title << '\n';
    const std::size_t w = check ? 34 : 20;
    os << std::left << std::setw(9) << t.row_header;
    for (const auto &c : t.columns) os << pad(c, w);
    os << '\n';
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        os << std::setw(9) << t.rows[r];
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            const auto &cell = t.at(r, c);
            std::string s = cell.display;
            if (check) s += " [" + latex_text(cell.printed) + (cell.match.ok ? " ok]" : " MISMATCH]");
            os << pad(s, w);
        }
        os << '\n';
    }
}


int cmd_table(const std::string &which, bool check, const std::string &format, const std::string &out_path,
              std::ostream &out)
{
    std::vector<int> ids;
    if (which == "all") {
        for (int i = 1; i <= kTableCount; ++i) ids.push_back(i);
    } else {
        const double v = to_double(which, "table id");
        if (v < 1 || v > kTableCount || std::floor(v) != v) throw UsageError("table id must be 1..11 or all");
        ids.push_back(static_cast<int>(v));
    }
    const Format f = format == "csv" ? Format::csv : format == "json" ? Format::json : Format::human;
    auto o = open_output(out_path, out);
    bool ok = true;
    for (int id : ids) {
        const Table t = make_table(id);
        write_table(o.os(), t, check, f);
        if (check) {
            ok = ok && t.all_match();
            if (f == Format::human) {
                std::size_t bad = 0;
                for (const auto &c : t.cells) bad += !c.match.ok;
                o.os() << "check: table " << id << (bad ? " FAILED" : " passed") << ", "
                       << t.cells.size() - bad << "/" << t.cells.size() << " cells match, max relative deviation "
                       << std::setprecision(3) << 100.0 * t.max_rel_dev() << "% (tolerance "
                       << 100.0 * t.tolerance << "%, or agreement to the printed digits)\n";
            }
        }
        if (f == Format::human) o.os() << '\n';
    }
    return ok ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------------------------------------
// two-point

int cmd_two_point(const std::string &family, int n, double alpha, const FamilyOptions &fo, const std::string &format,
                  std::ostream &out)
{
    const Family fam = make_family(family, fo);
    if (!fam.f) throw UsageError("family " + family + " has no two-point formula");
    if (n < 1) throw UsageError("--n must be positive");
    const auto r = fam.f(n, alpha);
    if (format == "json") {
        out << json{{"family", family},          {"n", n},
                    {"alpha", alpha},            {"f", r.f.value()},
                    {"log_f", r.f.log_value},    {"log10_f", r.f.log10()},
                    {"kind", to_string(r.kind)}, {"numeric_error", r.numeric_error}}
                   .dump(2)
            << '\n';
    } else if (format == "csv") {
        out << "family,n,alpha,f,log_f,log10_f,kind,numeric_error\n"
            << family << ',' << n << ',' << format_full(alpha) << ',' << format_full(r.f.value()) << ','
            << format_full(r.f.log_value) << ',' << format_full(r.f.log10()) << ',' << to_string(r.kind) << ','
            << format_full(r.numeric_error) << '\n';
    } else {
        out << "f(" << n << ", " << format_full(alpha) << ") for " << family << " = " << std::setprecision(5)
            << r.f.value() << "  (log f = " << format_full(r.f.log_value) << ", " << to_string(r.kind)
            << ", relative numeric error " << std::setprecision(2) << r.numeric_error << ")\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------------------------
// verify

struct VerifyFlags {
    std::string family, mode = "two-point", center, format = "human";
    int n = 0;
    double alpha = 1.0, trials = 1e6;
    std::optional<double> M;
    std::uint64_t seed = kDefaultSeed;
};

int cmd_verify(const VerifyFlags &v, const FamilyOptions &fo, std::ostream &out)
{
    const Family fam = make_family(v.family, fo);
    if (!fam.sampler) throw UsageError("family " + v.family + " has no sampler");
    if (v.n < 1) throw UsageError("--n must be positive");
    const std::uint64_t trials = to_count(v.trials, "--trials");
    const Center centre = v.center.empty() ? fam.default_center : parse_center(v.center);
    const Eigen::VectorXd c = center_vector(centre, v.n, fam.mean_at(v.n));
    std::optional<TwoPointResult> theory;
    if (fam.f) theory = fam.f(v.n, v.alpha);

    json report{{"family", v.family}, {"n", v.n}, {"alpha", v.alpha}, {"trials", trials}, {"seed", v.seed},
                {"mode", v.mode}};
    bool pass = true;
    std::string verdict;
    if (v.mode == "two-point") {
        const auto e = estimate_two_point(*fam.sampler, v.n, v.alpha, c, trials, v.seed);
        report["estimate"] = e.p_hat;
        report["ci"] = {e.ci_low, e.ci_high};
        if (theory) {
            const double f = theory->f.value();
            report["theory"] = f;
            report["theory_kind"] = to_string(theory->kind);
            // bounds only have to dominate the estimate
            pass = theory->kind == FKind::exact ? e.contains(f) : e.ci_low <= f;
            verdict = theory->kind == FKind::exact ? "interval contains the exact value"
                                                   : "interval lies below the upper bound";
        }
    } else if (v.mode == "set") {
        if (!v.M) throw UsageError("--mode set needs --M");
        const auto M = static_cast<std::size_t>(to_count(*v.M, "--M"));
        const auto e = estimate_set_separability(*fam.sampler, v.n, M, v.alpha, c, trials, v.seed);
        report["p_separable"] = e.p_separable.p_hat;
        report["ci"] = {e.p_separable.ci_low, e.p_separable.ci_high};
        report["mean_inseparable_pairs"] = e.mean_inseparable_pairs;
        report["stderr_pairs"] = e.stderr_pairs;
        if (theory) {
            const double expected = theory->f.value() * double(M) * double(M - 1);
            const double se = std::max(e.stderr_pairs, std::sqrt(expected / double(trials)));
            report["theory"] = expected;
            report["theory_kind"] = to_string(theory->kind);
            pass = theory->kind == FKind::exact ? std::fabs(e.mean_inseparable_pairs - expected) <= 3.0 * se
                                                : e.mean_inseparable_pairs - 3.0 * se <= expected;
            verdict = theory->kind == FKind::exact ? "mean pair count within 3 sigma of M(M-1)f"
                                                   : "mean pair count below M(M-1)f";
        }
    } else {
        throw UsageError("--mode must be two-point or set");
    }
    if (!theory) verdict = "no theoretical value for this family; estimate only";
    report["pass"] = pass;
    report["verdict"] = verdict;

    if (v.format == "json") {
        out << report.dump(2) << '\n';
    } else {
        out << std::setprecision(6);
        out << "family " << v.family << " (" << describe(*fam.sampler) << "), n=" << v.n << ", alpha=" << v.alpha
            << ", trials=" << trials << ", seed=" << v.seed << '\n';
        if (v.mode == "two-point") {
            out << "estimate " << report["estimate"].get<double>() << ", 99.7% Wilson interval ["
                << report["ci"][0].get<double>() << ", " << report["ci"][1].get<double>() << "]\n";
        } else {
            out << "separable fraction " << report["p_separable"].get<double>() << ", interval ["
                << report["ci"][0].get<double>() << ", " << report["ci"][1].get<double>() << "]\n"
                << "mean inseparable ordered pairs " << report["mean_inseparable_pairs"].get<double>() << " +- "
                << report["stderr_pairs"].get<double>() << '\n';
        }
        if (theory)
            out << "theory (" << to_string(theory->kind) << ") " << report["theory"].get<double>() << '\n';
        out << (pass ? "PASS: " : "FAIL: ") << verdict << '\n';
    }
    return pass ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------------------------------------
// check-dataset

Eigen::MatrixXd read_points(const std::string &path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ','))
            row.push_back(to_double(cell, path + " line " + std::to_string(lineno)));
        if (!rows.empty() && row.size() != rows.front().size())
            throw UsageError(path + " line " + std::to_string(lineno) + ": ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().empty()) throw UsageError(path + ": no data");
    Eigen::MatrixXd pts(rows.front().size(), rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j)
        pts.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(rows[j].data(), pts.rows());
    return pts;
}

struct Offender {
    double ratio;
    Eigen::Index i, j;
    bool operator>(const Offender &o) const { return ratio > o.ratio; }
};

int cmd_check_dataset(const std::string &path, const std::string &center_name, double alpha,
                      const std::string &assume, const FamilyOptions &fo, const std::string &format,
                      std::ostream &out)
{
    const Eigen::MatrixXd pts = read_points(path);
    const int n = static_cast<int>(pts.rows());
    const auto M = pts.cols();
    const Eigen::VectorXd mean = pts.rowwise().mean();
    const Eigen::VectorXd c = center_vector(parse_center(center_name), n, mean);
    const Eigen::MatrixXd q = pts.colwise() - c;
    const std::uint64_t pairs = M >= 2 ? count_inseparable_pairs(pts, alpha, c) : 0;

    // largest (x-c, y-c) / alpha (x-c, x-c) over ordered pairs, one Gram block at a time
    std::priority_queue<Offender, std::vector<Offender>, std::greater<>> worst;
    constexpr std::size_t kKeep = 10;
    const Eigen::VectorXd sq = q.colwise().squaredNorm().transpose();
    constexpr Eigen::Index kBlock = 256;
    for (Eigen::Index b = 0; b < M; b += kBlock) {
        const Eigen::Index w = std::min(kBlock, M - b);
        const Eigen::MatrixXd g = q.transpose() * q.middleCols(b, w);
        for (Eigen::Index k = 0; k < w; ++k) {
            const Eigen::Index i = b + k;
            for (Eigen::Index j = 0; j < M; ++j) {
                if (j == i) continue;
                const double den = alpha * sq(i);
                const double ratio = den > 0 ? g(j, k) / den : (g(j, k) >= 0 ? INFINITY : -INFINITY);
                if (worst.size() < kKeep) worst.push({ratio, i, j});
                else if (ratio > worst.top().ratio) {
                    worst.pop();
                    worst.push({ratio, i, j});
                }
            }
        }
    }
    std::vector<Offender> top;
    for (; !worst.empty(); worst.pop()) top.push_back(worst.top());
    std::reverse(top.begin(), top.end());

    const Eigen::MatrixXd centred = pts.colwise() - mean;
    const Eigen::MatrixXd cov = M > 1 ? Eigen::MatrixXd(centred * centred.transpose() / double(M - 1))
                                      : Eigen::MatrixXd::Zero(n, n);
    const double dist_identity = (cov - Eigen::MatrixXd::Identity(n, n)).norm();
    const bool warn = dist_identity > 0.5 * std::sqrt(double(n));

    json report{{"M", M}, {"n", n}, {"alpha", alpha}, {"center", center_name}, {"inseparable_ordered_pairs", pairs},
                {"covariance_distance_from_identity", dist_identity}, {"covariance_warning", warn}};
    json offenders = json::array();
    for (const auto &o : top) offenders.push_back({{"i", o.i}, {"j", o.j}, {"ratio", o.ratio}});
    report["worst_offenders"] = offenders;
    if (!assume.empty()) {
        const Family fam = make_family(assume, fo);
        if (!fam.f) throw UsageError("family " + assume + " has no two-point formula");
        const auto f = fam.f(n, alpha);
        report["assumed_family"] = assume;
        report["expected_pairs"] = f.f.value() * double(M) * double(M - 1);
        report["expected_kind"] = to_string(f.kind);
    }

    if (format == "json") {
        out << report.dump(2) << '\n';
        return kOk;
    }
    out << std::setprecision(6) << "points M=" << M << ", dimension n=" << n << ", alpha=" << alpha
        << ", center " << center_name << '\n'
        << "inseparable ordered pairs: " << pairs << '\n';
    if (!assume.empty())
        out << "expected under " << assume << " (" << report["expected_kind"].get<std::string>()
            << "): " << report["expected_pairs"].get<double>() << '\n';
    out << "worst offenders (i, j, (x_i-c, x_j-c) / alpha |x_i-c|^2; >= 1 is inseparable):\n";
    for (const auto &o : top) out << "  " << o.i << ", " << o.j << ", " << o.ratio << '\n';
    if (warn)
        out << "warning: covariance is far from identity (Frobenius distance " << dist_identity << " > 0.5 sqrt(n) = "
            << 0.5 * std::sqrt(double(n)) << "); the bounds assume whitened data\n";
    return kOk;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Fisher separability bounds, table reproduction and Monte Carlo checks", "sepbound"};
    app.require_subcommand(1);

    BoundFlags bf;
    FamilyOptions fo;
    int n = 0;
    std::string n_range, table_id = "all", family, format = "human", center, assume, dataset;
    bool check = false;
    VerifyFlags vf;
    std::optional<double> sweep_M;

    auto add_theorem_params = [&](CLI::App *s) {
        s->add_option("--theorem", bf.theorems, "theorem ids (comma separated, or all)");
        s->add_option("--alpha", bf.alpha, "Fisher threshold alpha in (0,1]");
        s->add_option("--delta", bf.delta, "failure probability");
        s->add_option("--gamma", bf.gamma, "SLC modulus");
        s->add_option("--sigma0", bf.sigma0, "coordinate standard deviation bound");
        s->add_option("--epsilon", bf.epsilon, "perturbation radius");
        s->add_option("--R", bf.R, "inner radius of the spherical layer");
        s->add_option("--r", bf.r, "radius factor of the density bound");
        s->add_option("--C", bf.C, "density bound constant");
        s->add_option("--component", bf.component, "coordinate law for product theorems");
        s->add_option("--center", bf.center, "origin, mean, cube-center or comma-separated point");
        s->add_option("--format", bf.format, "human, csv or json")->check(CLI::IsMember({"human", "csv", "json"}));
        s->add_option("--out", bf.out, "write to a file instead of stdout");
    };
    auto add_family_params = [&](CLI::App *s) {
        s->add_option("--gamma", fo.gamma, "SLC modulus");
        s->add_option("--sigma0", fo.sigma0, "coordinate standard deviation");
        s->add_option("--R", fo.R, "inner radius of the spherical layer");
        s->add_option("--component", fo.component, "coordinate law for the product family");
    };

    auto *sb = app.add_subcommand("bound", "bounds on M for one or more theorems");
    add_theorem_params(sb);
    sb->add_option("--n", n, "dimension")->required();
    sb->add_option("--mode", bf.mode, "force the exact or simple M formula");

    auto *st = app.add_subcommand("table", "reproduce a reference table (1..11 or all)");
    st->add_option("id", table_id, "table id or all");
    st->add_flag("--check", check, "compare with the printed values");
    st->add_option("--format", format, "human, csv or json")->check(CLI::IsMember({"human", "csv", "json"}));
    st->add_option("--out", bf.out, "write to a file instead of stdout");

    auto *s2 = app.add_subcommand("two-point", "two-point probability f(n, alpha)");
    s2->add_option("--family", family, kFamilies)->required();
    s2->add_option("--n", n, "dimension")->required();
    s2->add_option("--alpha", bf.alpha, "Fisher threshold alpha in (0,1]");
    s2->add_option("--format", format, "human, csv or json")->check(CLI::IsMember({"human", "csv", "json"}));
    add_family_params(s2);

    auto *sv = app.add_subcommand("verify", "Monte Carlo check against the theory");
    sv->add_option("--family", vf.family, kFamilies)->required();
    sv->add_option("--n", vf.n, "dimension")->required();
    sv->add_option("--alpha", vf.alpha, "Fisher threshold alpha in (0,1]");
    sv->add_option("--trials", vf.trials, "number of pairs or sets");
    sv->add_option("--seed", vf.seed, "random seed");
    sv->add_option("--mode", vf.mode, "two-point or set")->check(CLI::IsMember({"two-point", "set"}));
    sv->add_option("--M", vf.M, "set size for --mode set");
    sv->add_option("--center", vf.center, "origin, mean, cube-center or comma-separated point");
    sv->add_option("--format", vf.format, "human or json")->check(CLI::IsMember({"human", "json"}));
    add_family_params(sv);

    auto *ss = app.add_subcommand("sweep", "bounds (or probabilities at fixed M) over a range of n");
    add_theorem_params(ss);
    ss->add_option("--n", n_range, "N or FROM:TO[:STEP]")->required();
    ss->add_option("--M", sweep_M, "fixed sample size: report the probability bound 1 - delta");
    ss->add_option("--mode", bf.mode, "force the exact or simple M formula");

    auto *sd = app.add_subcommand("check-dataset", "count inseparable pairs in a CSV of points (one per row)");
    sd->add_option("path", dataset, "CSV file")->required();
    sd->add_option("--center", center, "origin, mean or cube-center")->default_str("mean");
    sd->add_option("--alpha", bf.alpha, "Fisher threshold alpha in (0,1]");
    sd->add_option("--assume", assume, "family for the expected pair count");
    sd->add_option("--format", format, "human or json")->check(CLI::IsMember({"human", "json"}));
    add_family_params(sd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp &e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n' << app.help();
        return kUsage;
    }

    try {
        if (*sb) return cmd_bound(bf, n, out);
        if (*st) return cmd_table(table_id, check, format, bf.out, out);
        if (*s2) return cmd_two_point(family, n, bf.alpha, fo, format, out);
        if (*sv) return cmd_verify(vf, fo, out);
        if (*ss) {
            if (bf.format == "human") bf.format = "csv";
            return cmd_sweep(bf, n_range, sweep_M, out);
        }
        if (*sd) return cmd_check_dataset(dataset, center.empty() ? "mean" : center, bf.alpha, assume, fo, format,
                                          out);
    } catch (const UsageError &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const BudgetError &e) {
        err << "refused: " << e.what() << '\n';
        return kBudget;
    } catch (const HypothesisError &e) {
        err << "hypothesis violated: " << e.what() << '\n';
        return kHypothesis;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::domain_error &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

} // namespace sepbound::cli
