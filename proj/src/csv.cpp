#include "grim/csv.hpp"

#include "grim/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace grim::csv {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

Table read_table(const std::filesystem::path& path, bool allow_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  Table table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto tokens = split(content);
    std::vector<double> row;
    row.reserve(tokens.size());
    std::optional<std::size_t> bad_column;
    for (std::size_t c = 0; c < tokens.size(); ++c) {
      const auto v = parse_number(tokens[c]);
      if (!v) {
        bad_column = c;
        break;
      }
      row.push_back(*v);
    }
    if (bad_column) {
      if (allow_header && rows.empty() && table.header.empty()) {
        for (auto t : tokens) table.header.emplace_back(t);
        width = tokens.size();
        continue;
      }
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ", column " +
                      std::to_string(*bad_column + 1) + ": '" +
                      std::string(tokens[*bad_column]) + "' is not a number");
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(row.size()) + " fields, expected " + std::to_string(width));
    }
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      table.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
  }
  return table;
}

Matrix read_matrix(const std::filesystem::path& path) {
  Table t = read_table(path, false);
  if (t.values.size() == 0) throw DataError(path.string() + ": no numeric data");
  return std::move(t.values);
}

Vector read_vector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto tokens = split(content);
    for (std::size_t c = 0; c < tokens.size(); ++c) {
      const auto v = parse_number(tokens[c]);
      if (!v) {
        throw DataError(path.string() + ": line " + std::to_string(line_no) + ", column " +
                        std::to_string(c + 1) + ": '" + std::string(tokens[c]) +
                        "' is not a number");
      }
      values.push_back(*v);
    }
  }
  if (values.empty()) throw DataError(path.string() + ": no numeric data");
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace grim::csv
