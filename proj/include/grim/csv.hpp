#pragma once

#include "grim/recombination.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace grim::csv {

/// Comma-separated numeric table. Blank lines and lines starting with '#'
/// are skipped. A first data line containing a non-numeric token is taken as
/// the header when `allow_header` is set; otherwise it is a parse error.
struct Table {
  std::vector<std::string> header;  // empty when absent
  Matrix values;
};

Table read_table(const std::filesystem::path& path, bool allow_header = false);

/// Numeric matrix, no header; all rows must have the same width.
Matrix read_matrix(const std::filesystem::path& path);

/// Every number in the file, row by row (one row or one column both work).
Vector read_vector(const std::filesystem::path& path);

/// Shortest round-trip decimal text for a double.
std::string format_number(double value);

}  // namespace grim::csv
