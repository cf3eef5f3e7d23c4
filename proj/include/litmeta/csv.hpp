#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace litmeta {

/// Minimal CSV support: comma separator, optional double-quoted fields with
/// "" escapes, LF line endings (CR before LF tolerated on input).
namespace csv {

/// Splits one line into fields.
std::vector<std::string> parse_line(const std::string& line);

/// Reads all rows; drops a trailing empty line.
std::vector<std::vector<std::string>> read(std::istream& in);

/// Quotes a field only when needed.
std::string escape(const std::string& field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace csv

}  // namespace litmeta
