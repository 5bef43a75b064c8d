#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace latblock {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC-4180 parsing: quoted fields, doubled quotes, CRLF or LF records.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::string& path);

std::string quote_csv_field(std::string_view field);
/// LF-terminated records, fields quoted only when needed.
std::string to_csv(const CsvTable& table);

std::string read_text_file(const std::string& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace latblock
