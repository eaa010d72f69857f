#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gridsens {

/// One `mpc.<name> = [ ... ];` block, kept verbatim so a case can be
/// re-emitted without losing columns the analysis does not use.
struct MatrixTable {
    std::string name;
    std::vector<std::vector<double>> rows;
    std::vector<long> row_lines;  // 1-based source lines, for diagnostics
};

struct BranchRecord {
    int from = 0;
    int to = 0;
    double reactance = 0.0;  // per-unit, column 4 of the branch table
};

/// Parsed MATPOWER case. Buses are classified generator/load purely by
/// membership in the gen table.
struct GridCase {
    std::vector<MatrixTable> tables;  // file order
    std::vector<int> bus_ids;         // bus table order
    std::vector<BranchRecord> branches;
    std::vector<int> gen_buses;

    bool is_generator(int bus) const;
    /// Position of a bus id in the bus table; -1 if absent.
    int bus_position(int bus) const;
    const MatrixTable* find_table(std::string_view name) const;
};

/// Parses the MATPOWER subset grammar: `mpc.<table> = [` blocks of
/// whitespace-separated numeric rows terminated by `;`, `%` comments,
/// required tables bus/branch/gen. Errors carry 1-based line numbers.
GridCase parse_matpower(std::string_view text);

/// Canonical emitter; parse(serialize(c)) reproduces identical tables.
std::string serialize_matpower(const GridCase& c);

}  // namespace gridsens
