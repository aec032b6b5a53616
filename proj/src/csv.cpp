#include "glacia/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "glacia/errors.hpp"

namespace glacia {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (line.empty()) cells.emplace_back();
    return cells;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw RangeError("no column named '" + name + "'");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& out, const CsvTable& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out << ',';
        out << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            if (row[i]) out << format_double(*row[i]);
        }
        out << '\n';
    }
}

std::string to_csv_string(const CsvTable& table) {
    std::ostringstream os;
    write_csv(os, table);
    return os.str();
}

CsvTable parse_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line) || line.empty()) throw ConfigError("CSV header row missing");
    if (line.back() == '\r') line.pop_back();
    t.header = split(line);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto cells = split(line);
        if (cells.size() != t.header.size()) {
            throw ConfigError("CSV line " + std::to_string(lineno) + " has " +
                              std::to_string(cells.size()) + " fields, header has " +
                              std::to_string(t.header.size()));
        }
        std::vector<std::optional<double>> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            if (c.empty()) {
                row.emplace_back();
                continue;
            }
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (end != c.c_str() + c.size()) {
                throw ConfigError("CSV line " + std::to_string(lineno) + ": '" + c +
                                  "' is not a number");
            }
            row.emplace_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable parse_csv_string(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

}  // namespace glacia
