#include "litmeta/text.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>

namespace litmeta {

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) out.push_back(static_cast<char>(std::tolower(c)));
  return out;
}

std::string collapse_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

std::string norm_text(std::string_view s) { return to_lower(collapse_ws(s)); }

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

std::vector<std::string> split_authors(std::string_view field) {
  std::vector<std::string> out;
  std::string text(field);
  size_t start = 0;
  while (true) {
    size_t pos = text.find(" and ", start);
    std::string name = collapse_ws(
        pos == std::string::npos ? text.substr(start) : text.substr(start, pos - start));
    if (!name.empty()) out.push_back(name);
    if (pos == std::string::npos) break;
    start = pos + 5;
  }
  return out;
}

std::string surname(std::string_view author) {
  std::string name = collapse_ws(author);
  if (size_t comma = name.find(','); comma != std::string::npos)
    return trim(name.substr(0, comma));
  if (size_t sp = name.rfind(' '); sp != std::string::npos) return name.substr(sp + 1);
  return name;
}

std::string normalize_reference_key(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_sep = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      pending_sep = !out.empty();
      continue;
    }
    char lc = static_cast<char>(std::tolower(c));
    if ((lc >= 'a' && lc <= 'z') || (lc >= '0' && lc <= '9') || lc == '_') {
      if (pending_sep) out.push_back('_');
      pending_sep = false;
      out.push_back(lc);
    }
  }
  return out;
}

namespace {
std::string alnum_lower(std::string_view s) {
  std::string out;
  for (unsigned char c : s)
    if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
  return out;
}
}  // namespace

std::string make_record_key(const std::vector<std::string>& authors, int year,
                            std::string_view title) {
  std::string author_part = authors.empty() ? "" : alnum_lower(surname(authors.front()));
  std::string first_word = collapse_ws(title);
  if (size_t sp = first_word.find(' '); sp != std::string::npos) first_word.resize(sp);
  return author_part + "_" + std::to_string(year) + "_" + alnum_lower(first_word);
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace litmeta
