#include "litmeta/bibtex.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include "litmeta/error.hpp"
#include "litmeta/log.hpp"
#include "litmeta/text.hpp"

namespace litmeta {

namespace {

struct Cursor {
  std::string text;
  size_t pos = 0;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void fail(size_t entry_index, const std::string& what) const {
    throw Error("bibtex: entry " + std::to_string(entry_index) + ", byte offset " +
                std::to_string(pos) + ": " + what);
  }
};

// Reads a `{...}` group with balanced nesting; returns the inner text.
std::string read_braced(Cursor& c, size_t entry_index) {
  size_t open = c.pos;
  ++c.pos;  // consume '{'
  int depth = 1;
  std::string value;
  while (!c.eof()) {
    char ch = c.text[c.pos++];
    if (ch == '{') {
      ++depth;
    } else if (ch == '}') {
      if (--depth == 0) return value;
    }
    if (depth > 0) value.push_back(ch);
  }
  c.pos = open;
  c.fail(entry_index, "unbalanced braces in value");
}

std::string read_bare(Cursor& c) {
  std::string value;
  while (!c.eof()) {
    char ch = c.peek();
    if (ch == ',' || ch == '}' || std::isspace(static_cast<unsigned char>(ch))) break;
    value.push_back(ch);
    ++c.pos;
  }
  return value;
}

long parse_long(const std::string& s, Cursor& c, size_t entry_index,
                const std::string& field) {
  try {
    size_t used = 0;
    long v = std::stol(trim(s), &used);
    if (used != trim(s).size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    c.fail(entry_index, "field '" + field + "' is not an integer: '" + s + "'");
  }
}

double parse_double(const std::string& s, Cursor& c, size_t entry_index,
                    const std::string& field) {
  try {
    size_t used = 0;
    double v = std::stod(trim(s), &used);
    if (used != trim(s).size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    c.fail(entry_index, "field '" + field + "' is not a number: '" + s + "'");
  }
}

}  // namespace

std::vector<Record> parse_bibtex(std::istream& in, Source source) {
  Cursor c;
  {
    std::ostringstream buf;
    buf << in.rdbuf();
    c.text = buf.str();
  }

  std::vector<Record> records;
  std::map<std::string, std::pair<size_t, size_t>> seen_keys;  // key -> (entry, offset)
  size_t entry_index = 0;

  while (true) {
    // Anything outside @...{...} is commentary and skipped.
    while (!c.eof() && c.peek() != '@') ++c.pos;
    if (c.eof()) break;
    size_t entry_offset = c.pos;
    ++entry_index;
    ++c.pos;  // '@'

    std::string type;
    while (!c.eof() &&
           (std::isalpha(static_cast<unsigned char>(c.peek())) || c.peek() == '_'))
      type.push_back(c.text[c.pos++]);
    c.skip_ws();
    if (type.empty() || c.eof() || c.peek() != '{')
      c.fail(entry_index, "expected '@TYPE{' at start of entry");
    ++c.pos;  // '{'

    c.skip_ws();
    std::string key;
    while (!c.eof() && c.peek() != ',' && c.peek() != '}' &&
           !std::isspace(static_cast<unsigned char>(c.peek())))
      key.push_back(c.text[c.pos++]);
    if (key.empty()) c.fail(entry_index, "entry has no key");
    c.skip_ws();

    if (auto it = seen_keys.find(key); it != seen_keys.end()) {
      throw Error("bibtex: duplicate key '" + key + "': entry " +
                  std::to_string(it->second.first) + " at byte offset " +
                  std::to_string(it->second.second) + " and entry " +
                  std::to_string(entry_index) + " at byte offset " +
                  std::to_string(entry_offset));
    }
    seen_keys[key] = {entry_index, entry_offset};

    Record r;
    r.id = key;
    r.source = source;
    bool has_journal = false;
    bool has_year = false;

    while (true) {
      c.skip_ws();
      if (c.eof()) c.fail(entry_index, "unterminated entry (missing '}')");
      if (c.peek() == '}') {
        ++c.pos;
        break;
      }
      if (c.peek() == ',') {
        ++c.pos;
        continue;
      }

      std::string field;
      while (!c.eof() && (std::isalnum(static_cast<unsigned char>(c.peek())) ||
                          c.peek() == '_' || c.peek() == '-'))
        field.push_back(c.text[c.pos++]);
      if (field.empty()) c.fail(entry_index, "expected a field name");
      c.skip_ws();
      if (c.eof() || c.peek() != '=') c.fail(entry_index, "expected '=' after field '" + field + "'");
      ++c.pos;
      c.skip_ws();
      if (c.eof()) c.fail(entry_index, "missing value for field '" + field + "'");

      std::string value =
          c.peek() == '{' ? read_braced(c, entry_index) : read_bare(c);
      std::string fname = to_lower(field);

      if (fname == "title") {
        r.title = collapse_ws(value);
      } else if (fname == "author") {
        r.authors = split_authors(value);
      } else if (fname == "year") {
        r.year = static_cast<int>(parse_long(value, c, entry_index, fname));
        has_year = true;
      } else if (fname == "journal") {
        r.venue = collapse_ws(value);
        has_journal = true;
      } else if (fname == "keywords") {
        for (auto& part : split(value, ',')) {
          for (auto& kw : split(part, ';')) {
            std::string k = norm_text(kw);
            if (!k.empty()) r.keywords.insert(k);
          }
        }
      } else if (fname == "cites") {
        for (auto& part : split(value, ',')) {
          std::string ref = normalize_reference_key(part);
          if (!ref.empty()) r.references.insert(ref);
        }
      } else if (fname == "citations") {
        r.global_citations = parse_long(value, c, entry_index, fname);
      } else if (fname == "impactfactor") {
        r.impact_factor = parse_double(value, c, entry_index, fname);
      } else {
        log::warn("bibtex: entry '" + key + "': ignoring unknown field '" + fname + "'");
      }
    }

    if (!has_year) c.fail(entry_index, "entry '" + key + "' has no year field");
    r.published = has_journal;
    finalize_record(r);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace litmeta
