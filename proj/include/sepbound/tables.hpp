#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sepbound/bounds.hpp"
#include "sepbound/format.hpp"

namespace sepbound {

struct TableCell {
    std::string row, column;
    double log10_value = 0.0;                // magnitude cells
    std::optional<PerturbedResult> probability; // probability cells
    std::string display;
    std::string printed; // reference value, verbatim
    CellMatch match;
};

struct Table {
    int id = 0;
    std::string title;
    std::string row_header;
    std::vector<std::string> rows, columns;
    std::vector<TableCell> cells; // row-major
    double tolerance = 1e-3;

    const TableCell &at(std::size_t r, std::size_t c) const { return cells[r * columns.size() + c]; }
    bool all_match() const;
    double max_rel_dev() const; // over cells with a finite deviation
};

constexpr int kTableCount = 11;

// Computes every cell of table id (1..11) and compares it with the printed value.
Table make_table(int id);

} // namespace sepbound
