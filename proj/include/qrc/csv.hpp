#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qrc::csv {

using Row = std::vector<std::string>;

// RFC 4180 style: comma separated, double-quoted fields may contain commas,
// newlines and doubled quotes. Accepts LF or CRLF line endings.
std::vector<Row> parse(std::istream& in);
std::vector<Row> read_file(const std::string& path);

// Throws DataError unless `row` equals `expected` field by field.
void expect_header(const Row& row, const std::vector<std::string_view>& expected,
                   std::string_view what);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace qrc::csv
