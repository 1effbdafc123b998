#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace bugtriage::csv {

using Row = std::vector<std::string>;

/// Reads RFC 4180 style CSV: comma separated, double-quoted fields with ""
/// escapes, embedded newlines inside quotes, LF or CRLF line endings. A leading
/// UTF-8 byte order mark is skipped. Blank lines are ignored.
std::vector<Row> read(std::istream& in);
std::vector<Row> read_file(const std::string& path);

/// Writes one record, quoting fields that contain a comma, quote, CR or LF.
void write_row(std::ostream& out, std::span<const std::string> fields);
inline void write_row(std::ostream& out, const Row& fields) {
  write_row(out, std::span<const std::string>(fields));
}

}  // namespace bugtriage::csv
