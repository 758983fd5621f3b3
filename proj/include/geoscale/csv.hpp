#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geoscale::csv {

// Shortest round-trip representation; integral values print without a
// trailing ".0" so counts stay readable.
std::string format_double(double v);

// Full-cell numeric parse. Rejects trailing garbage and empty cells.
std::optional<double> parse_double(std::string_view cell);
std::optional<std::int64_t> parse_int(std::string_view cell);

std::string escape_field(std::string_view field);

// Splits one CSV line honoring double-quote escaping. Separator is ','.
std::vector<std::string> split_line(std::string_view line);

// Splits on a raw separator with no quoting (TSV cells are opaque bytes).
std::vector<std::string_view> split_raw(std::string_view line, char sep);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Reads a whole CSV file; first line is the header.
Table read_file(const std::string& path);

void write_line(std::string& out, const std::vector<std::string>& fields);

}  // namespace geoscale::csv
