#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>

#include <fmt/format.h>

#include "curesurv/error.hpp"
#include "curesurv/format.hpp"

namespace curesurv {

std::string format_number(double value, int digits) {
  if (value == 0.0) return "0";  // also folds -0
  return fmt::format("{:.{}g}", value, digits);
}

std::string format_exact(double value) {
  if (value == 0.0) return "0";
  return fmt::format("{}", value);
}

double round_significant(double value, int digits) {
  if (!std::isfinite(value) || value == 0.0) return value;
  return std::stod(fmt::format("{:.{}e}", value, digits - 1));
}

}  // namespace curesurv

namespace curesurv::detail {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      // Tolerate a UTF-8 byte order mark.
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      table.header = split_csv_line(line);
      have_header = true;
      continue;
    }
    ++row;
    auto fields = split_csv_line(line);
    if (fields.size() != table.header.size()) {
      throw DataError(fmt::format("expected {} fields, found {}", table.header.size(), fields.size()),
                      row);
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw DataError("missing header row");
  return table;
}

int column_index(const std::vector<std::string>& header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

double parse_double(std::string_view text, std::size_t row, std::string_view column) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw DataError(fmt::format("malformed number '{}' in column {}", text, column), row);
  }
  return value;
}

long long parse_integer(std::string_view text, std::size_t row, std::string_view column) {
  long long value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw DataError(fmt::format("malformed integer '{}' in column {}", text, column), row);
  }
  return value;
}

}  // namespace curesurv::detail
