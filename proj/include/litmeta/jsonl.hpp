#pragma once

#include <istream>
#include <ostream>
#include <vector>

#include "litmeta/record.hpp"

namespace litmeta {

/// JSONL is the canonical interchange format: one object per line with the
/// Record field names verbatim. Set-valued fields are serialized in sorted
/// order, so write(parse(x)) == x for canonical input.
std::vector<Record> parse_jsonl(std::istream& in);

void write_jsonl(std::ostream& out, const std::vector<Record>& records);

std::string record_to_json_line(const Record& r);

}  // namespace litmeta
