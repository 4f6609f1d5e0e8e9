#pragma once

#include <string>

#include "sepbound/bounds.hpp"

namespace sepbound {

// Table-style display of a positive quantity given by its log10:
// "0.06", "13.5", "828,180", "1.5·10^77".
std::string format_display_log10(double log10_value);
std::string format_display(double value);

// "<0", "0.9998", "1-5.8·10^-18"
std::string format_probability(const PerturbedResult &r);

// Shortest round-trip-safe decimal with 12 significant digits.
std::string format_full(double v);

// A number as printed in a reference table cell.
struct PrintedValue {
    enum class Kind { number, one_minus, negative };
    Kind kind = Kind::number;
    double mantissa = 0.0; // value is mantissa * 10^exponent (for one_minus: the deficit)
    int exponent = 0;
    int decimals = 0;      // digits after the point in the mantissa
    std::string text;

    double log10() const;
};

// Accepts the LaTeX cell text ("1.5 \cdot 10^{77}", "828,180", "<0", "1 - 2.2 \cdot 10^{-255}")
// and the display form produced above. Throws std::invalid_argument on anything else.
PrintedValue parse_printed(const std::string &text);

struct CellMatch {
    bool ok = false;
    double rel_dev = 0.0; // |computed/printed - 1|, infinite for a sign mismatch
};

// A computed magnitude matches when its relative deviation is within tol, or when rounding or
// truncating it to the printed digits reproduces the print.
CellMatch match_magnitude(const PrintedValue &printed, double log10_value, double tol);
CellMatch match_probability(const PrintedValue &printed, const PerturbedResult &r, double tol);

} // namespace sepbound
