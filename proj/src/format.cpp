#include "sepbound/format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace sepbound {

namespace {

constexpr const char *kDot = "·";

std::string group_thousands(std::string digits)
{
    for (int i = static_cast<int>(digits.size()) - 3; i > 0; i -= 3) digits.insert(i, ",");
    return digits;
}

std::string fixed(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

// two significant digits, trailing ".0" dropped ("2·10^6")
std::string scientific(double log10_value)
{
    int e = static_cast<int>(std::floor(log10_value));
    double m = std::round(std::pow(10.0, log10_value - e) * 10.0) / 10.0;
    if (m >= 10.0) {
        m /= 10.0;
        ++e;
    }
    std::string ms = fixed(m, 1);
    if (ms.size() > 2 && ms.compare(ms.size() - 2, 2, ".0") == 0) ms.resize(ms.size() - 2);
    return ms + kDot + "10^" + std::to_string(e);
}

void replace_all(std::string &s, const std::string &from, const std::string &to)
{
    for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
        s.replace(pos, from.size(), to);
}

bool parse_decimal(const std::string &s, double &value, int &decimals)
{
    if (s.empty()) return false;
    std::string digits;
    decimals = 0;
    bool point = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char ch = s[i];
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            digits += ch;
            if (point) ++decimals;
        } else if (ch == '.' && !point) {
            digits += ch;
            point = true;
        } else if (ch == ',' && !point && i > 0) {
            continue;
        } else {
            return false;
        }
    }
    if (digits.empty() || digits == ".") return false;
    value = std::stod(digits);
    return true;
}

PrintedValue parse_number(const std::string &s, const std::string &original)
{
    PrintedValue p;
    p.text = original;
    std::string mant = s, exp;
    if (auto pos = s.find("*10^"); pos != std::string::npos) {
        mant = s.substr(0, pos);
        exp = s.substr(pos + 4);
    } else if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        mant = s.substr(0, e);
        exp = s.substr(e + 1);
    }
    if (!parse_decimal(mant, p.mantissa, p.decimals))
        throw std::invalid_argument("unparseable table value: " + original);
    if (!exp.empty()) {
        std::size_t used = 0;
        try {
            p.exponent = std::stoi(exp, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == 0 || used != exp.size())
            throw std::invalid_argument("unparseable exponent in table value: " + original);
    }
    return p;
}

} // namespace

std::string format_display_log10(double L)
{
    if (std::isnan(L)) return "nan";
    if (std::isinf(L)) return L > 0 ? "inf" : "0";
    if (L < -2.0 || L >= 6.0) return scientific(L);
    const double v = std::pow(10.0, L);
    if (v < 10.0) return fixed(v, 2);
    if (v < 100.0) return fixed(v, 1);
    const double r = std::round(v);
    if (r >= 1e6) return scientific(L);
    return group_thousands(fixed(r, 0));
}

std::string format_display(double value)
{
    if (value < 0) return "-" + format_display_log10(std::log10(-value));
    if (value == 0) return "0";
    return format_display_log10(std::log10(value));
}

std::string format_probability(const PerturbedResult &r)
{
    if (r.probability < 0) return "<0";
    const double ld = r.log_deficit / std::log(10.0);
    if (ld < -4.0) return "1-" + scientific(ld);
    return fixed(r.probability, 4);
}

std::string format_full(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double PrintedValue::log10() const { return std::log10(mantissa) + exponent; }

PrintedValue parse_printed(const std::string &text)
{
    std::string s = text;
    replace_all(s, "\\cdot", "*");
    replace_all(s, kDot, "*");
    s.erase(std::remove_if(s.begin(), s.end(),
                           [](char c) { return std::isspace(static_cast<unsigned char>(c)) || c == '$' ||
                                               c == '{' || c == '}'; }),
            s.end());
    if (s == "<0") {
        PrintedValue p;
        p.kind = PrintedValue::Kind::negative;
        p.text = text;
        return p;
    }
    if (s.rfind("1-", 0) == 0) {
        PrintedValue p = parse_number(s.substr(2), text);
        p.kind = PrintedValue::Kind::one_minus;
        return p;
    }
    return parse_number(s, text);
}

CellMatch match_magnitude(const PrintedValue &printed, double log10_value, double tol)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (printed.kind != PrintedValue::Kind::number || !std::isfinite(log10_value)) return {false, inf};
    CellMatch m;
    m.rel_dev = std::fabs(std::expm1((log10_value - printed.log10()) * std::log(10.0)));
    if (m.rel_dev <= tol) {
        m.ok = true;
        return m;
    }
    // the computed value in units of the last printed digit
    const double scaled = std::pow(10.0, log10_value - printed.exponent + printed.decimals);
    const double target = std::round(printed.mantissa * std::pow(10.0, printed.decimals));
    m.ok = std::round(scaled) == target || std::floor(scaled) == target;
    return m;
}

CellMatch match_probability(const PrintedValue &printed, const PerturbedResult &r, double tol)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (printed.kind) {
    case PrintedValue::Kind::negative:
        return r.probability < 0 ? CellMatch{true, 0.0} : CellMatch{false, inf};
    case PrintedValue::Kind::number:
        if (!(r.probability > 0)) return {false, inf};
        return match_magnitude(printed, std::log10(r.probability), tol);
    case PrintedValue::Kind::one_minus: {
        if (!(r.probability > 0)) return {false, inf};
        PrintedValue deficit = printed;
        deficit.kind = PrintedValue::Kind::number;
        return match_magnitude(deficit, r.log_deficit / std::log(10.0), tol);
    }
    }
    return {false, inf};
}

} // namespace sepbound
