#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace curesurv::detail {

/// Splits one CSV line. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // each row has header.size() fields
};

/// Reads a header row plus data rows; blank lines are skipped and a trailing
/// '\r' is stripped. Throws DataError on ragged rows (1-based data row numbers).
CsvTable read_csv(std::istream& in);

/// Index of `name` in `header`, or -1.
int column_index(const std::vector<std::string>& header, std::string_view name);

double parse_double(std::string_view text, std::size_t row, std::string_view column);
long long parse_integer(std::string_view text, std::size_t row, std::string_view column);

}  // namespace curesurv::detail
