#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace litmeta {

/// ASCII lowercase.
std::string to_lower(std::string_view s);

/// Trim leading/trailing whitespace and collapse internal runs to one space.
std::string collapse_ws(std::string_view s);

/// Lowercased, whitespace-collapsed form used for normalization keys.
std::string norm_text(std::string_view s);

std::string trim(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

/// Split an author field on the literal " and " separator.
std::vector<std::string> split_authors(std::string_view field);

/// Surname of one author name: the part before a comma if present,
/// otherwise the last whitespace-separated token.
std::string surname(std::string_view author);

/// Canonical reference key: lowercase, whitespace runs become '_',
/// everything outside [a-z0-9_] dropped. Survives punctuation/case noise
/// across database exports.
std::string normalize_reference_key(std::string_view s);

/// Key a record contributes to the shared reference-key space:
/// "firstauthorsurname_year_firsttitleword".
std::string make_record_key(const std::vector<std::string>& authors, int year,
                            std::string_view title);

/// "%.17g" rendering; round-trips any double exactly.
std::string format_real(double v);

/// FNV-1a 64-bit, used for artifact hashes in the pipeline manifest.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace litmeta
