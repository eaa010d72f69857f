#include "gridsens/matpower.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "gridsens/errors.hpp"
#include "gridsens/format.hpp"

namespace gridsens {

bool GridCase::is_generator(int bus) const {
    return std::find(gen_buses.begin(), gen_buses.end(), bus) != gen_buses.end();
}

int GridCase::bus_position(int bus) const {
    auto it = std::find(bus_ids.begin(), bus_ids.end(), bus);
    return it == bus_ids.end() ? -1 : static_cast<int>(it - bus_ids.begin());
}

const MatrixTable* GridCase::find_table(std::string_view name) const {
    for (const auto& t : tables) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

namespace {

std::string_view strip_comment(std::string_view line) {
    const size_t pos = line.find('%');
    return pos == std::string_view::npos ? line : line.substr(0, pos);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

/// Matches `mpc.<ident> = [` and returns the identifier, or empty.
std::string table_header(std::string_view line) {
    constexpr std::string_view prefix = "mpc.";
    if (!line.starts_with(prefix)) return {};
    size_t i = prefix.size();
    size_t start = i;
    while (i < line.size() &&
           (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) {
        ++i;
    }
    if (i == start) return {};
    std::string name(line.substr(start, i - start));
    std::string_view rest = trim(line.substr(i));
    if (rest != "= [" && rest != "=[") return {};
    return name;
}

std::vector<double> parse_row(std::string_view line, long line_no) {
    std::string_view body = line;
    if (body.ends_with(';')) body = trim(body.substr(0, body.size() - 1));
    std::vector<double> row;
    size_t i = 0;
    while (i < body.size()) {
        while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        size_t start = i;
        while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        if (start == i) break;
        double value = 0.0;
        std::string_view token = body.substr(start, i - start);
        if (!parse_double(token, value)) {
            throw ParseError("non-numeric token '" + std::string(token) + "'", line_no);
        }
        row.push_back(value);
    }
    return row;
}

int column_as_bus_id(const std::vector<double>& row, size_t col, long line_no) {
    const double v = row.at(col);
    const double rounded = std::round(v);
    if (std::abs(v - rounded) > 1e-9) {
        throw ParseError("bus id column holds non-integer value " + format_double(v), line_no);
    }
    return static_cast<int>(rounded);
}

}  // namespace

GridCase parse_matpower(std::string_view text) {
    GridCase c;
    std::istringstream in{std::string(text)};
    std::string raw;
    long line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        std::string name = table_header(line);
        if (name.empty()) continue;  // function header, scalar assignments, etc.

        MatrixTable table;
        table.name = std::move(name);
        const long block_line = line_no;
        bool terminated = false;
        while (std::getline(in, raw)) {
            ++line_no;
            std::string_view row_line = trim(strip_comment(raw));
            if (row_line.empty()) continue;
            if (row_line.starts_with("];")) {
                terminated = true;
                break;
            }
            table.rows.push_back(parse_row(row_line, line_no));
            table.row_lines.push_back(line_no);
        }
        if (!terminated) {
            throw ParseError("unterminated matrix block 'mpc." + table.name + "'", block_line);
        }
        c.tables.push_back(std::move(table));
    }

    const MatrixTable* bus = c.find_table("bus");
    const MatrixTable* branch = c.find_table("branch");
    const MatrixTable* gen = c.find_table("gen");
    if (!bus) throw ParseError("missing required table 'mpc.bus'");
    if (!branch) throw ParseError("missing required table 'mpc.branch'");
    if (!gen) throw ParseError("missing required table 'mpc.gen'");

    std::set<int> seen;
    for (size_t r = 0; r < bus->rows.size(); ++r) {
        if (bus->rows[r].empty()) throw ParseError("empty bus row", bus->row_lines[r]);
        const int id = column_as_bus_id(bus->rows[r], 0, bus->row_lines[r]);
        if (!seen.insert(id).second) {
            throw ParseError("duplicate bus id " + std::to_string(id), bus->row_lines[r]);
        }
        c.bus_ids.push_back(id);
    }
    for (size_t r = 0; r < branch->rows.size(); ++r) {
        if (branch->rows[r].size() < 4) {
            throw ParseError("branch row needs at least 4 columns (from, to, r, x)",
                             branch->row_lines[r]);
        }
        BranchRecord b;
        b.from = column_as_bus_id(branch->rows[r], 0, branch->row_lines[r]);
        b.to = column_as_bus_id(branch->rows[r], 1, branch->row_lines[r]);
        b.reactance = branch->rows[r][3];
        for (int end : {b.from, b.to}) {
            if (!seen.count(end)) {
                throw ParseError("branch references unknown bus " + std::to_string(end),
                                 branch->row_lines[r]);
            }
        }
        c.branches.push_back(b);
    }
    for (size_t r = 0; r < gen->rows.size(); ++r) {
        if (gen->rows[r].empty()) throw ParseError("empty gen row", gen->row_lines[r]);
        const int id = column_as_bus_id(gen->rows[r], 0, gen->row_lines[r]);
        if (!seen.count(id)) {
            throw ParseError("gen references unknown bus " + std::to_string(id),
                             gen->row_lines[r]);
        }
        if (!c.is_generator(id)) c.gen_buses.push_back(id);
    }
    return c;
}

std::string serialize_matpower(const GridCase& c) {
    std::string out;
    for (const auto& table : c.tables) {
        out += "mpc." + table.name + " = [\n";
        for (const auto& row : table.rows) {
            out += '\t';
            for (size_t i = 0; i < row.size(); ++i) {
                if (i) out += '\t';
                out += format_double(row[i]);
            }
            out += ";\n";
        }
        out += "];\n\n";
    }
    return out;
}

}  // namespace gridsens
