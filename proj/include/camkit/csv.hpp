#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace camkit {

// RFC 4180-style table: comma separated, optional double-quoted fields,
// LF or CRLF line endings, leading UTF-8 BOM ignored, blank lines skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based source line of each row, for error messages.
  std::vector<std::size_t> lines;

  std::optional<std::size_t> column(std::string_view name) const;
  std::size_t require_column(std::string_view name) const;
};

// Throws ValidationError on unterminated quotes or ragged rows.
CsvTable parse_csv(std::string_view text);

// Quotes the field when it contains a comma, quote or newline.
std::string csv_field(std::string_view value);

}  // namespace camkit
