#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace glacia {

/// Numeric table with a mandatory header. Missing cells are empty fields.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::optional<double>>> rows;

    /// Index of a column; throws RangeError when absent.
    std::size_t column(const std::string& name) const;
};

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

void write_csv(std::ostream& out, const CsvTable& table);
std::string to_csv_string(const CsvTable& table);
/// Throws ConfigError on a missing header, ragged rows or non-numeric cells.
CsvTable parse_csv(std::istream& in);
CsvTable parse_csv_string(const std::string& text);

}  // namespace glacia
