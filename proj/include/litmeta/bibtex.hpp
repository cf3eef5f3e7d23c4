#pragma once

#include <istream>
#include <vector>

#include "litmeta/record.hpp"

namespace litmeta {

/// Parses the BibTeX subset `@TYPE{key, field = {value}, ...}`.
///
/// Recognized fields: title, author, year, journal, keywords, cites
/// (comma-separated reference keys), citations (integer), impactfactor
/// (decimal). Unknown fields are skipped with a warning. Values are either
/// brace-balanced groups or bare tokens. Full BibTeX (string macros,
/// cross-references, @preamble) is out of scope.
///
/// Defaults for fields absent from an entry: published = true iff a journal
/// field is present, impact_factor = 0, global_citations = 0,
/// doc_type = quantitative.
///
/// Throws Error naming the byte offset and entry index on malformed input,
/// and on a key occurring twice within the stream (both occurrences listed).
std::vector<Record> parse_bibtex(std::istream& in, Source source = Source::manual);

}  // namespace litmeta
